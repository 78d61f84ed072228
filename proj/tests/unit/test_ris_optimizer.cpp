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

#include "bdris/linalg.hpp"
#include "bdris/ris_optimizer.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace bdris;
using Catch::Approx;

// Covered tests:
// - Cross-correlation cost: trivial cases, Monte Carlo oracle, invariances
// - Direct and factored evaluations agree
// - Euclidean gradient against central differences, symmetry
// - Tangent projection, Polak-Ribiere coefficient, retraction
// - Armijo backtracking
// - Conjugate gradient: toy problem, Haar oracle, monotone trace, determinism, feasibility
// - Diagonal architecture: structure and phase derivatives
// - Beyond-diagonal never worse than diagonal
// - Settings validation

namespace
{
    CostContext random_context(RngStream &rng, Index n, Index m, int k)
    {
        CostContext ctx;
        const CMatrix h = rng.complex_normal_matrix(m, n);
        ctx.gram = h.adjoint() * h;
        for (int i = 0; i < k; ++i)
            ctx.correlations.push_back(testing::random_psd(rng, n, std::max<Index>(1, n / 2)));
        return ctx;
    }

    RisMatrix haar(RngStream &rng, Index n) { return {testing::haar_unitary(rng, n), RisArchitecture::beyond_diagonal}; }

    // Central differences of f along every real and imaginary entry direction.
    CMatrix fd_gradient(const CostContext &ctx, const RisMatrix &theta, double h)
    {
        const Index n = theta.size();
        CMatrix g(n, n);
        for (Index i = 0; i < n; ++i)
            for (Index j = 0; j < n; ++j)
            {
                double parts[2];
                for (int p = 0; p < 2; ++p)
                {
                    const cdouble e = p == 0 ? cdouble(h, 0.0) : cdouble(0.0, h);
                    RisMatrix plus = theta, minus = theta;
                    plus.theta(i, j) += e;
                    minus.theta(i, j) -= e;
                    parts[p] = (cost(plus, ctx) - cost(minus, ctx)) / (2.0 * h);
                }
                g(i, j) = cdouble(parts[0], parts[1]);
            }
        return g;
    }

    OptimizerSettings quick_settings(int iterations = 300)
    {
        OptimizerSettings s;
        s.max_iterations = iterations;
        s.relative_tolerance = 1e-8;
        return s;
    }
}

TEST_CASE("Cross-correlation cost")
{
    RngStream rng(1);

    SECTION("a single user has no interference")
    {
        const CostContext ctx = random_context(rng, 5, 3, 1);
        CHECK(cost(haar(rng, 5), ctx) == 0.0);
        CHECK(euclidean_gradient(haar(rng, 5), ctx).norm() == 0.0);
    }

    SECTION("disjoint supports give zero cost at the identity")
    {
        CostContext ctx;
        ctx.gram = CMatrix::Identity(4, 4);
        CMatrix r1 = CMatrix::Zero(4, 4), r2 = CMatrix::Zero(4, 4);
        r1.topLeftCorner(2, 2) = testing::random_psd(rng, 2);
        r2.bottomRightCorner(2, 2) = testing::random_psd(rng, 2);
        ctx.correlations = {r1, r2};
        CHECK(std::abs(cost(RisMatrix::identity(4), ctx)) < 1e-15);
    }

    SECTION("Monte Carlo oracle E|h_k^H A h_j|^2")
    {
        const CostContext ctx = random_context(rng, 4, 3, 3);
        const RisMatrix theta = haar(rng, 4);
        const CMatrix a = theta.theta.adjoint() * ctx.gram * theta.theta;
        std::vector<CMatrix> roots;
        for (const auto &r : ctx.correlations)
            roots.push_back(linalg::hermitian_sqrt(r).sqrt);
        const int draws = 200000;
        double acc = 0.0;
        RngStream draw(3);
        for (int d = 0; d < draws; ++d)
        {
            std::vector<CVector> h;
            for (const auto &s : roots)
                h.push_back(s * draw.complex_normal_vector(4));
            for (std::size_t k = 0; k < 2; ++k)
                for (std::size_t j = k + 1; j < 3; ++j)
                    acc += std::norm(h[k].dot(a * h[j]));
        }
        CHECK(acc / draws == Approx(cost(theta, ctx)).epsilon(0.02));
    }

    SECTION("non-negative and invariant to a global phase")
    {
        const CostContext ctx = random_context(rng, 6, 4, 3);
        for (int t = 0; t < 10; ++t)
        {
            const RisMatrix theta = haar(rng, 6);
            const double f = cost(theta, ctx);
            CHECK(f >= 0.0);
            RisMatrix rotated = theta;
            rotated.theta *= std::polar(1.0, 0.7 * t);
            CHECK(cost(rotated, ctx) == Approx(f).epsilon(1e-12));
        }
    }
}

TEST_CASE("Factored objective matches the direct evaluation")
{
    RngStream rng(2);
    for (Index n : {4, 9, 16})
    {
        CostContext ctx = random_context(rng, n, 3, 4);
        // a rank-one user exercises the dropped eigenvalues
        const CVector a = rng.complex_normal_vector(n);
        ctx.correlations.push_back(a * a.adjoint());
        const Objective obj = make_objective(ctx);
        for (int t = 0; t < 3; ++t)
        {
            const RisMatrix theta = haar(rng, n);
            CHECK(obj.cost(theta.theta) == Approx(cost(theta, ctx)).epsilon(1e-10));
            CHECK(linalg::relative_frobenius_error(obj.gradient(theta.theta), euclidean_gradient(theta, ctx)) < 1e-10);
        }
    }

    CostContext one = random_context(rng, 4, 2, 1);
    const Objective obj = make_objective(one);
    CHECK(obj.cost(CMatrix::Identity(4, 4)) == 0.0);
    CHECK(obj.gradient(CMatrix::Identity(4, 4)).norm() == 0.0);
}

TEST_CASE("Euclidean gradient")
{
    RngStream rng(3);

    SECTION("central differences")
    {
        for (int t = 0; t < 5; ++t)
        {
            const CostContext ctx = random_context(rng, 6, 4, 3);
            const RisMatrix theta = haar(rng, 6);
            const CMatrix g = euclidean_gradient(theta, ctx);
            const CMatrix fd = fd_gradient(ctx, theta, 1e-5);
            CHECK(linalg::relative_frobenius_error(g, fd) < 1e-5);
        }
    }

    SECTION("invariant to the order of users")
    {
        CostContext ctx = random_context(rng, 5, 3, 3);
        const RisMatrix theta = haar(rng, 5);
        const CMatrix g = euclidean_gradient(theta, ctx);
        std::swap(ctx.correlations[0], ctx.correlations[2]);
        CHECK(linalg::relative_frobenius_error(euclidean_gradient(theta, ctx), g) < 1e-12);
    }

    SECTION("directional derivative")
    {
        const CostContext ctx = random_context(rng, 7, 3, 4);
        const RisMatrix theta = haar(rng, 7);
        const CMatrix e = rng.complex_normal_matrix(7, 7);
        const double h = 1e-6;
        RisMatrix plus = theta, minus = theta;
        plus.theta += h * e;
        minus.theta -= h * e;
        const double fd = (cost(plus, ctx) - cost(minus, ctx)) / (2 * h);
        CHECK(real_inner(euclidean_gradient(theta, ctx), e) == Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("Tangent projection and conjugate direction")
{
    RngStream rng(4);
    const RisMatrix theta = haar(rng, 5);
    const CMatrix z = rng.complex_normal_matrix(5, 5);

    SECTION("chdiag")
    {
        CMatrix m(2, 2);
        m << cdouble(1, 2), 3.0, 4.0, cdouble(0, -5);
        const CMatrix d = chdiag(m);
        CHECK(d(0, 0) == cdouble(1, 2));
        CHECK(d(1, 1) == cdouble(0, -5));
        CHECK(d(0, 1) == 0.0);
        CHECK(d(1, 0) == 0.0);
        CHECK_THROWS_AS(chdiag(CMatrix::Zero(2, 3)), ModelError);
    }

    SECTION("BD projection")
    {
        const CMatrix p = project_tangent(theta, z);
        CHECK((p - (z - theta.theta * chdiag(theta.theta.adjoint() * z))).norm() < 1e-13);
        CHECK((theta.theta.adjoint() * p).diagonal().norm() < 1e-13);
        CHECK((project_tangent(theta, p) - p).norm() < 1e-13);
    }

    SECTION("D projection")
    {
        RVector phases = RVector::Random(5) * pi;
        const RisMatrix d = RisMatrix::from_phases(phases, RisArchitecture::diagonal);
        const CMatrix p = project_tangent(d, z);
        for (Index i = 0; i < 5; ++i)
        {
            CHECK(std::abs((p(i, i) * std::conj(d.theta(i, i))).real()) < 1e-14);
            for (Index j = 0; j < 5; ++j)
                if (i != j)
                    CHECK(p(i, j) == 0.0);
        }
        CHECK((project_tangent(d, p) - p).norm() < 1e-14);
    }

    SECTION("Polak-Ribiere coefficient")
    {
        const CMatrix g = project_tangent(theta, z);
        CHECK(polak_ribiere(g, g, theta) == Approx(0.0).margin(1e-12));
        CHECK(polak_ribiere(g, CMatrix::Zero(5, 5), theta) == 0.0);
        const CMatrix g2 = project_tangent(theta, rng.complex_normal_matrix(5, 5));
        const double expected = real_inner(g2, g2 - project_tangent(theta, g)) / g.squaredNorm();
        CHECK(polak_ribiere(g2, g, theta) == Approx(expected));
        CHECK(polak_ribiere(2.0 * g, g, theta) == Approx(2.0));
    }
}

TEST_CASE("Retraction")
{
    RngStream rng(5);

    SECTION("zero step is the identity map")
    {
        const RisMatrix theta = haar(rng, 4);
        CHECK(retract(theta, rng.complex_normal_matrix(4, 4), 0.0).theta == theta.theta);
        CHECK_THROWS_AS(retract(theta, CMatrix::Identity(4, 4), -1.0), ModelError);
    }

    SECTION("closed form at the identity")
    {
        const cdouble i(0.0, 1.0);
        const RisMatrix out = retract(RisMatrix::identity(3), i * CMatrix::Identity(3, 3), 1.0);
        CHECK((out.theta - (1.0 + i) / std::sqrt(2.0) * CMatrix::Identity(3, 3)).norm() < 1e-14);
    }

    SECTION("tangent directions stay unitary without the safeguard")
    {
        for (int t = 0; t < 10; ++t)
        {
            const RisMatrix theta = haar(rng, 6);
            const CMatrix s = rng.complex_normal_matrix(6, 6);
            const CMatrix skew = 0.5 * (s - s.adjoint());
            const CMatrix xi = theta.theta * skew;
            for (double step : {1e-3, 0.1, 1.0, 5.0})
                CHECK(retract(theta, xi, step, false).constraint_violation() <= 1e-10);
        }
    }

    SECTION("safeguard restores unitarity for arbitrary directions")
    {
        for (int t = 0; t < 10; ++t)
        {
            const RisMatrix theta = haar(rng, 6);
            const CMatrix xi = project_tangent(theta, rng.complex_normal_matrix(6, 6));
            const RisMatrix out = retract(theta, xi, 0.8, true);
            CHECK(out.constraint_violation() <= 1e-8);
        }
    }

    SECTION("diagonal retraction normalizes every entry")
    {
        const RisMatrix d = RisMatrix::from_phases(RVector::LinSpaced(4, 0.0, 3.0), RisArchitecture::diagonal);
        CMatrix xi = CMatrix::Zero(4, 4);
        xi(1, 1) = cdouble(0.3, -0.4);
        xi(2, 2) = -d.theta(2, 2); // cancels the entry at unit step
        const RisMatrix out = retract(d, xi, 1.0);
        for (Index i = 0; i < 4; ++i)
            CHECK(std::abs(out.theta(i, i)) == Approx(1.0));
        CHECK(out.theta(2, 2) == d.theta(2, 2));
        CHECK(out.theta(0, 0) == d.theta(0, 0));
        const cdouble moved = d.theta(1, 1) + xi(1, 1);
        CHECK(std::abs(out.theta(1, 1) - moved / std::abs(moved)) < 1e-15);
    }
}

TEST_CASE("Armijo backtracking")
{
    RngStream rng(6);
    const CostContext ctx = random_context(rng, 5, 3, 3);
    const RisMatrix theta = haar(rng, 5);
    const Objective obj = make_objective(ctx);
    const double f0 = obj.cost(theta.theta);
    const CMatrix g = obj.gradient(theta.theta);
    const CMatrix xi = -project_tangent(theta, g);
    const ArmijoSettings armijo;

    const LineSearchResult ls = backtracking_step(theta, xi, ctx, armijo);
    REQUIRE_FALSE(ls.converged);
    CHECK(ls.cost < f0);
    CHECK(ls.cost <= f0 + armijo.sufficient_decrease * ls.step * real_inner(g, xi));
    // the step is initial_step * c^m / ||xi|| for an integer m
    const double m = std::log(ls.step * xi.norm() / armijo.initial_step) / std::log(armijo.contraction);
    CHECK(m == Approx(std::round(m)).margin(1e-9));
    CHECK(ls.theta.constraint_violation() <= 1e-8);

    // the previous (longer) step violates the condition
    if (std::round(m) > 0)
    {
        const double longer = ls.step / armijo.contraction;
        const double f_long = cost(retract(theta, xi, longer), ctx);
        CHECK(f_long > f0 + armijo.sufficient_decrease * longer * real_inner(g, xi));
    }

    SECTION("ascent and zero directions are rejected")
    {
        CHECK(backtracking_step(theta, -xi, ctx, armijo).converged);
        CHECK(backtracking_step(theta, CMatrix::Zero(5, 5), ctx, armijo).converged);
    }
}

TEST_CASE("Conjugate gradient")
{
    RngStream rng(7);

    SECTION("toy objective reaches a stationary point")
    {
        const CMatrix target = testing::haar_unitary(rng, 4);
        Objective toy{[target](const CMatrix &t) { return (t - target).squaredNorm(); },
                      [target](const CMatrix &t) -> CMatrix { return 2.0 * (t - target); }};
        OptimizerSettings s;
        s.max_iterations = 200;
        s.relative_tolerance = 1e-14;
        s.gradient_tolerance = 1e-6;
        const OptimizerResult r = minimize(toy, RisMatrix::identity(4), s);
        CHECK(r.trace.stop == StopReason::gradient_tolerance);
        CHECK(r.trace.iterations <= 200);
        CHECK(r.trace.gradient_norm.back() < 1e-6);
        CHECK(r.trace.final_cost() < r.trace.cost.front());
        // the projection removes only diag(Theta^H Z), so target * D (D diagonal unitary) is
        // stationary as well: the limit matches the target up to per-column phases
        const CMatrix d = target.adjoint() * r.theta.theta;
        CHECK((d - chdiag(d)).norm() < 1e-5);
    }

    SECTION("a single user returns the initialization")
    {
        const CostContext ctx = random_context(rng, 4, 2, 1);
        const OptimizerResult r = optimize(ctx, RisArchitecture::beyond_diagonal, quick_settings());
        CHECK(r.trace.iterations == 0);
        CHECK(r.trace.stop == StopReason::zero_gradient);
        CHECK(r.theta.theta == random_phase_initialization(4, RisArchitecture::beyond_diagonal, 1).theta);
    }

    SECTION("beats random unitaries, monotone, feasible")
    {
        for (int t = 0; t < 3; ++t)
        {
            const CostContext ctx = random_context(rng, 4, 2, 2);
            const OptimizerResult r = optimize(ctx, RisArchitecture::beyond_diagonal, quick_settings());
            double best = std::numeric_limits<double>::infinity();
            for (int s = 0; s < 2000; ++s)
                best = std::min(best, cost(haar(rng, 4), ctx));
            CHECK(r.trace.final_cost() <= best);
            for (std::size_t i = 1; i < r.trace.cost.size(); ++i)
                CHECK(r.trace.cost[i] <= r.trace.cost[i - 1]);
            CHECK(r.trace.max_constraint_violation() <= 1e-8);
            CHECK(r.theta.constraint_violation() <= 1e-8);
            CHECK(r.trace.cost.size() == static_cast<std::size_t>(r.trace.iterations) + 1);
        }
    }

    SECTION("deterministic for a fixed seed")
    {
        const CostContext ctx = random_context(rng, 6, 3, 3);
        const OptimizerResult a = optimize(ctx, RisArchitecture::beyond_diagonal, quick_settings(50));
        const OptimizerResult b = optimize(ctx, RisArchitecture::beyond_diagonal, quick_settings(50));
        CHECK(a.theta.theta == b.theta.theta);
        CHECK(a.trace.cost == b.trace.cost);
        OptimizerSettings other = quick_settings(50);
        other.seed = 2;
        CHECK(optimize(ctx, RisArchitecture::beyond_diagonal, other).theta.theta != a.theta.theta);
    }
}

TEST_CASE("Diagonal architecture")
{
    RngStream rng(8);
    const CostContext ctx = random_context(rng, 6, 3, 3);

    SECTION("structure is preserved")
    {
        const OptimizerResult r = optimize_diagonal(ctx, quick_settings());
        CHECK(r.theta.architecture == RisArchitecture::diagonal);
        CHECK(r.theta.constraint_violation() <= 1e-12);
        for (std::size_t i = 1; i < r.trace.cost.size(); ++i)
            CHECK(r.trace.cost[i] <= r.trace.cost[i - 1]);
    }

    SECTION("phase derivatives follow from the Euclidean gradient")
    {
        const RVector phases = RVector::Random(6) * pi;
        const RisMatrix theta = RisMatrix::from_phases(phases, RisArchitecture::diagonal);
        const CMatrix g = euclidean_gradient(theta, ctx);
        const double h = 1e-6;
        for (Index n = 0; n < 6; ++n)
        {
            RVector up = phases, down = phases;
            up(n) += h;
            down(n) -= h;
            const double fd = (cost(RisMatrix::from_phases(up, RisArchitecture::diagonal), ctx) -
                               cost(RisMatrix::from_phases(down, RisArchitecture::diagonal), ctx)) /
                              (2 * h);
            const double analytic = (std::conj(g(n, n)) * cdouble(0.0, 1.0) * theta.theta(n, n)).real();
            CHECK(analytic == Approx(fd).epsilon(1e-5).margin(1e-9 * g.norm()));
        }
    }
}

TEST_CASE("Beyond-diagonal is never worse than diagonal")
{
    std::vector<double> bd, d;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        RngStream rng(100 + seed);
        const CostContext ctx = random_context(rng, 6, 3, 3);
        OptimizerSettings s = quick_settings(200);
        s.seed = seed + 1;
        bd.push_back(optimize(ctx, RisArchitecture::beyond_diagonal, s).trace.final_cost());
        d.push_back(optimize(ctx, RisArchitecture::diagonal, s).trace.final_cost());
    }
    CHECK(testing::median(bd) <= testing::median(d));
}

TEST_CASE("Optimizer settings validation")
{
    OptimizerSettings s;
    CHECK_NOTHROW(s.validate());
    s.max_iterations = -1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.relative_tolerance = 0.0;
    s.gradient_tolerance = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.armijo.contraction = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.armijo.sufficient_decrease = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.armijo.initial_step = -1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);

    RngStream rng(9);
    const CostContext ctx = random_context(rng, 4, 2, 2);
    OptimizerSettings bad;
    bad.max_iterations = -5;
    CHECK_THROWS_AS(optimize(ctx, RisArchitecture::beyond_diagonal, bad), ConfigError);
}
