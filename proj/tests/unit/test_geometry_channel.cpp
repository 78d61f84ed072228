// SPDX-License-Identifier: Apache-2.0
//
// bdris: BS-side beyond-diagonal RIS massive MIMO simulation library
// Copyright (C) 2026 The bdris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include "bdris/geometry_channel.hpp"
#include "bdris/linalg.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace bdris;
using Catch::Approx;

// Covered tests:
// - UPA grid positions and ordering
// - BS-RIS element response: magnitude, phase, 1/d law, full matrix against scalar evaluation
// - Gram matrix properties
// - Path loss values
// - Local-scattering correlation: point-source limit, trace, quadrature oracle, square root
// - Channel sampling statistics and reproducibility
// - Composite channel shape, identity chain, isometry, linearity

namespace
{
    constexpr double lambda = 0.12;

    // Simpson rule over +-10 sigma of the Gaussian angle density, normalized on the same range.
    cdouble local_scattering_oracle(int lag, double spacing_wl, double angle, double sigma)
    {
        const int steps = 20000;
        const double lo = -10.0 * sigma, hi = 10.0 * sigma;
        const double h = (hi - lo) / steps;
        cdouble acc(0.0, 0.0);
        double mass = 0.0;
        for (int i = 0; i <= steps; ++i)
        {
            const double d = lo + i * h;
            const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            const double pdf = std::exp(-0.5 * d * d / (sigma * sigma));
            acc += w * pdf * std::polar(1.0, 2.0 * pi * spacing_wl * lag * std::sin(angle + d));
            mass += w * pdf;
        }
        return acc / mass;
    }
}

TEST_CASE("UPA positions follow the row-major grid")
{
    UpaConfig c;
    c.count_h = 2;
    c.count_v = 1;
    c.spacing = lambda / 2;
    c.origin = Point3::Zero();
    auto p = build_upa_positions(c);
    REQUIRE(p.size() == 2);
    CHECK((p[0] - Point3(0, 0, 0)).norm() < 1e-15);
    CHECK((p[1] - Point3(0, lambda / 2, 0)).norm() < 1e-15);

    c.count_v = 2;
    p = build_upa_positions(c);
    REQUIRE(p.size() == 4);
    CHECK((p[1] - p[0]).norm() == Approx(lambda / 2));
    CHECK((p[2] - p[0]).norm() == Approx(lambda / 2));
    CHECK((p[3] - p[0]).norm() == Approx(lambda / std::sqrt(2.0)));
    CHECK(std::abs((p[1] - p[0]).dot(p[2] - p[0])) < 1e-15);
    // horizontal index fastest
    CHECK(p[2].z() > p[0].z());
    CHECK(p[1].z() == Approx(p[0].z()));

    c.count_h = 16;
    c.count_v = 2;
    p = build_upa_positions(c);
    REQUIRE(p.size() == 32);
    CHECK(c.horizontal_extent() == Approx(15 * lambda / 2));
    CHECK((p[15] - p[0]).norm() == Approx(15 * lambda / 2));
}

TEST_CASE("UPA validation")
{
    UpaConfig c;
    c.count_h = 2;
    c.count_v = 4;
    c.spacing = lambda / 2;
    CHECK_THROWS_AS(c.validate(lambda), GeometryError);
    c.count_h = 4;
    CHECK_NOTHROW(c.validate(lambda));
    c.spacing = 0.4 * lambda;
    CHECK_THROWS_AS(c.validate(lambda), GeometryError);
}

TEST_CASE("BS-RIS element response")
{
    const double amp = std::sqrt(db_to_linear(3.0) * db_to_linear(3.0));
    const cdouble h = bs_ris_element_response(1.0, lambda, amp);
    CHECK(std::abs(h) == Approx(0.019053).epsilon(1e-4));
    CHECK(std::abs(h) == Approx(std::pow(10.0, 0.3) * lambda / (4 * pi)).epsilon(1e-12));

    const cdouble at_lambda = bs_ris_element_response(lambda, lambda, 1.0);
    CHECK(std::abs(std::arg(at_lambda)) < 1e-12);

    CHECK(std::abs(bs_ris_element_response(1.0, lambda, 1.0)) ==
          Approx(2.0 * std::abs(bs_ris_element_response(2.0, lambda, 1.0))));
}

TEST_CASE("BS-RIS channel from an explicit geometry")
{
    SystemGeometry g;
    g.wavelength = lambda;
    g.array.count_h = g.array.count_v = 1;
    g.array.spacing = lambda / 2;
    g.array.origin = Point3::Zero();
    // normal +y puts the horizontal axis along -x: RIS elements at x = -1 and x = -2
    g.ris.count_h = 2;
    g.ris.count_v = 1;
    g.ris.spacing = 1.0;
    g.ris.normal = Point3::UnitY();
    g.ris.origin = Point3(-1.0, 0.0, 0.0);
    const BsRisChannel ch = build_bs_ris_channel(g, 1.0, 3.0, 3.0);
    REQUIRE(ch.rows() == 1);
    REQUIRE(ch.cols() == 2);
    CHECK(std::abs(ch.h(0, 0)) == Approx(0.019053).epsilon(1e-4));
    CHECK(std::abs(ch.h(0, 0)) == Approx(2.0 * std::abs(ch.h(0, 1))));

    g.ris.origin = Point3::Zero();
    CHECK_THROWS_AS(build_bs_ris_channel(g, 1.0, 3.0, 3.0), GeometryError);
}

TEST_CASE("BS-side channel matches an independent scalar evaluation")
{
    const auto g = SystemGeometry::bs_side(6, 4, 8, 4, lambda, 10.0, 1.5);
    const auto ch = build_bs_ris_channel(g, 0.8, 3.0, 2.0);
    REQUIRE(ch.rows() == 24);
    REQUIRE(ch.cols() == 32);

    const auto a = build_upa_positions(g.array);
    const auto r = build_upa_positions(g.ris);
    const double amp = std::sqrt(0.8 * std::pow(10.0, 0.3) * std::pow(10.0, 0.2));
    double min_d = 1e9;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < r.size(); ++j)
        {
            const double d = (a[i] - r[j]).norm();
            min_d = std::min(min_d, d);
            const cdouble hij = ch.h(static_cast<Index>(i), static_cast<Index>(j));
            CHECK(std::abs(hij) == Approx(amp * lambda / (4 * pi * d)).epsilon(1e-12));
            const double phase = std::remainder(-2 * pi * d / lambda - std::arg(hij), 2 * pi);
            CHECK(std::abs(phase) < 1e-9);
        }
    CHECK(min_d >= 5.0 * lambda - 1e-12);

    // array and RIS planes lie 5 lambda apart and the array sits beside the RIS aperture
    CHECK(g.array.center().x() - g.ris.center().x() == Approx(5.0 * lambda));
    CHECK(g.array.center().y() == Approx(0.5 * g.ris.horizontal_extent() + lambda));

    // gram
    CHECK(linalg::relative_frobenius_error(ch.gram, ch.h.adjoint() * ch.h) < 1e-12);
    CHECK((ch.gram - ch.gram.adjoint()).norm() < 1e-14 * ch.gram.norm());
    const double lmin = linalg::min_hermitian_eigenvalue(ch.gram);
    const double lmax = linalg::max_hermitian_eigenvalue(ch.gram);
    CHECK(lmin >= -1e-10 * lmax);
}

TEST_CASE("Path loss")
{
    CHECK(pathloss_db(1.0) == Approx(-35.3));
    CHECK(pathloss_db(100.0) == Approx(-110.5));
    CHECK(pathloss_db(1000.0) == Approx(-148.1));
    CHECK_THROWS_AS(pathloss_db(0.0), GeometryError);
    CHECK_THROWS_AS(pathloss_db(-3.0), GeometryError);
}

TEST_CASE("Local-scattering correlation")
{
    const auto g = SystemGeometry::bs_side(4, 2, 8, 4, lambda, 10.0, 1.5);
    const double beta = 1e-9;

    SECTION("zero spread gives the steering-vector outer product")
    {
        const double az = 0.4, el = -0.2;
        const auto m = spatial_correlation(g, az, el, 0.0, 0.0, beta);
        const CVector a = upa_steering_vector(g.ris, lambda, az, el);
        CHECK(linalg::relative_frobenius_error(m.correlation, beta * a * a.adjoint()) < 1e-12);
        for (Index i = 0; i < a.size(); ++i)
            CHECK(std::abs(a(i)) == Approx(1.0));
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(m.correlation / beta);
        CHECK(eig.eigenvalues()(a.size() - 1) == Approx(32.0));
        CHECK(std::abs(eig.eigenvalues()(a.size() - 2)) < 1e-9);
    }

    SECTION("trace and square root")
    {
        for (double spread : {0.0, 0.05, 0.2, 0.6})
        {
            const auto m = spatial_correlation(g, 0.3, -0.1, spread, spread / 2, beta);
            CHECK(m.correlation.trace().real() == Approx(32 * beta).epsilon(1e-9));
            CHECK(linalg::relative_frobenius_error(m.sqrt_correlation * m.sqrt_correlation.adjoint(), m.correlation) < 1e-9);
            CHECK((m.correlation - m.correlation.adjoint()).norm() < 1e-15 * m.correlation.norm());
            CHECK(m.pathloss_linear == beta);
        }
    }

    SECTION("quadrature oracle")
    {
        const double sigma = 10.0 * pi / 180.0;
        const CMatrix r = ula_local_scattering(4, 0.5, 0.0, sigma);
        for (int l = 0; l < 4; ++l)
            for (int m = 0; m < 4; ++m)
            {
                const cdouble ref = l >= m ? local_scattering_oracle(l - m, 0.5, 0.0, sigma)
                                           : std::conj(local_scattering_oracle(m - l, 0.5, 0.0, sigma));
                CHECK(std::abs(r(l, m) - ref) < 1e-6);
            }
        // off-broadside with the same oracle
        const CMatrix r2 = ula_local_scattering(6, 0.5, 0.7, sigma);
        for (int l = 1; l < 6; ++l)
            CHECK(std::abs(r2(l, 0) - local_scattering_oracle(l, 0.5, 0.7, sigma)) < 1e-6);
    }

    SECTION("Kronecker ordering keeps the horizontal index fastest")
    {
        const auto m = spatial_correlation(g, 0.5, -0.3, 0.1, 0.05, 1.0);
        const double s = 0.5;
        const CMatrix rh = ula_local_scattering(8, s, 0.5, 0.1, std::cos(-0.3));
        const CMatrix rv = ula_local_scattering(4, s, -0.3, 0.05);
        // element (h, v) -> v * 8 + h
        for (int v1 = 0; v1 < 4; ++v1)
            for (int h1 = 0; h1 < 8; ++h1)
                for (int v2 = 0; v2 < 4; ++v2)
                    for (int h2 = 0; h2 < 8; ++h2)
                        CHECK(std::abs(m.correlation(v1 * 8 + h1, v2 * 8 + h2) - rv(v1, v2) * rh(h1, h2)) < 1e-12);
    }

    SECTION("non-PSD input is rejected")
    {
        CMatrix bad = CMatrix::Identity(2, 2);
        bad(1, 1) = -1.0;
        CHECK_THROWS_AS(UserChannelModel::from_correlation(bad, 1.0), ModelError);
        CHECK_THROWS_AS(ula_local_scattering(3, 0.5, 0.0, -0.1), ModelError);
    }
}

TEST_CASE("Channel sampling")
{
    const int n = 4;
    const int draws = 100000;

    SECTION("identity correlation")
    {
        std::vector<UserChannelModel> models{UserChannelModel::from_correlation(CMatrix::Identity(n, n), 1.0)};
        RngStream rng(11);
        CMatrix samples(n, draws);
        for (int d = 0; d < draws; ++d)
            samples.col(d) = sample_channels(models, rng)[0];
        CHECK(linalg::relative_frobenius_error(testing::sample_covariance(samples), CMatrix::Identity(n, n)) < 0.05);
        const CVector mean = samples.rowwise().mean();
        CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
    }

    SECTION("scaled correlation has zero mean")
    {
        const double beta = 1e-6;
        const auto g = SystemGeometry::bs_side(4, 2, 4, 1, lambda, 10.0, 1.5);
        std::vector<UserChannelModel> models{spatial_correlation(g, 0.2, -0.1, 0.1, 0.05, beta)};
        RngStream rng(12);
        CVector sum = CVector::Zero(4);
        for (int d = 0; d < draws; ++d)
            sum += sample_channels(models, rng)[0];
        CHECK((sum / draws).cwiseAbs().maxCoeff() < 0.02 * std::sqrt(beta));
    }

    SECTION("rank one correlation")
    {
        RngStream r0(3);
        const CVector a = r0.complex_normal_vector(n);
        std::vector<UserChannelModel> models{UserChannelModel::from_correlation(a * a.adjoint(), 1.0)};
        RngStream rng(4);
        for (int d = 0; d < 20; ++d)
        {
            const CVector h = sample_channels(models, rng)[0];
            const cdouble c = a.dot(h) / a.squaredNorm();
            CHECK((h - c * a).norm() < 1e-10 * std::max(1.0, h.norm()));
        }
    }

    SECTION("reproducible and independent across users")
    {
        std::vector<UserChannelModel> models(2, UserChannelModel::from_correlation(CMatrix::Identity(n, n), 1.0));
        RngStream a(99), b(99);
        const auto x = sample_channels(models, a);
        const auto y = sample_channels(models, b);
        REQUIRE(x.size() == 2);
        CHECK(x[0] == y[0]);
        CHECK(x[1] == y[1]);
        CHECK((x[0] - x[1]).norm() > 0.0);
        const auto z = sample_channels(models, a);
        CHECK((z[0] - x[0]).norm() > 0.0);
    }
}

TEST_CASE("Composite channel")
{
    RngStream rng(5);
    const CVector h = rng.complex_normal_vector(3);
    const auto eye = BsRisChannel::from_matrix(CMatrix::Identity(3, 3));
    CHECK((composite_channel(eye, RisMatrix::identity(3), h) - h).norm() == 0.0);

    const CMatrix q = testing::haar_unitary(rng, 3);
    const RisMatrix theta{q, RisArchitecture::beyond_diagonal};
    CHECK((theta.theta * h).norm() == Approx(h.norm()).epsilon(1e-12));

    const auto wide = BsRisChannel::from_matrix(rng.complex_normal_matrix(2, 3));
    const CVector g = composite_channel(wide, theta, h);
    CHECK(g.size() == 2);

    const CVector h2 = rng.complex_normal_vector(3);
    const cdouble alpha(0.3, -1.7);
    const CVector lhs = composite_channel(wide, theta, alpha * h + h2);
    const CVector rhs = alpha * composite_channel(wide, theta, h) + composite_channel(wide, theta, h2);
    CHECK((lhs - rhs).norm() <= 1e-12 * rhs.norm());

    CHECK_THROWS_AS(composite_channel(wide, RisMatrix::identity(4), h), ModelError);
    CHECK_THROWS_AS(composite_channel(wide, theta, rng.complex_normal_vector(4)), ModelError);
}
