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

#include "bdris/geometry_channel.hpp"
#include "bdris/linalg.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <string>

namespace bdris
{
    namespace
    {
        constexpr int quadrature_panels = 64;
        constexpr double quadrature_half_width = 8.0; // in standard deviations

        // Gauss-Legendre rule on [-1, 1], expanded from Boost's non-negative abscissas.
        struct LegendreRule
        {
            std::vector<double> nodes;
            std::vector<double> weights;
        };

        const LegendreRule &legendre20()
        {
            static const LegendreRule rule = []
            {
                using gauss = boost::math::quadrature::gauss<double, 20>;
                LegendreRule r;
                const auto &x = gauss::abscissa();
                const auto &w = gauss::weights();
                for (std::size_t i = 0; i < x.size(); ++i)
                {
                    r.nodes.push_back(x[i]);
                    r.weights.push_back(w[i]);
                    if (x[i] != 0.0)
                    {
                        r.nodes.push_back(-x[i]);
                        r.weights.push_back(w[i]);
                    }
                }
                return r;
            }();
            return rule;
        }
    }

    // ---------- UPA ----------

    Point3 UpaConfig::horizontal_axis() const
    {
        Point3 h = Point3::UnitZ().cross(normal);
        if (h.norm() < 1e-12)
            return Point3::UnitX();
        return h.normalized();
    }

    Point3 UpaConfig::vertical_axis() const { return normal.normalized().cross(horizontal_axis()); }

    Point3 UpaConfig::center() const
    {
        return origin + 0.5 * (count_h - 1) * spacing * horizontal_axis() + 0.5 * (count_v - 1) * spacing * vertical_axis();
    }

    void UpaConfig::validate(double wavelength) const
    {
        if (count_v < 1 || count_h < count_v)
            throw GeometryError("UPA requires count_h >= count_v >= 1 (got " + std::to_string(count_h) + "x" +
                                std::to_string(count_v) + ")");
        if (total() > 1 && spacing < 0.5 * wavelength * (1.0 - 1e-12))
            throw GeometryError("UPA element spacing must be at least half a wavelength");
        if (std::abs(normal.norm() - 1.0) > 1e-9)
            throw GeometryError("UPA normal must be a unit vector");
    }

    std::vector<Point3> build_upa_positions(const UpaConfig &config)
    {
        const Point3 h_axis = config.horizontal_axis();
        const Point3 v_axis = config.vertical_axis();
        std::vector<Point3> points;
        points.reserve(static_cast<std::size_t>(config.total()));
        for (int v = 0; v < config.count_v; ++v)
            for (int h = 0; h < config.count_h; ++h)
                points.push_back(config.origin + (h * config.spacing) * h_axis + (v * config.spacing) * v_axis);
        return points;
    }

    SystemGeometry SystemGeometry::bs_side(int m_h, int m_v, int n_h, int n_v, double wavelength,
                                           double ris_height, double user_height, double separation_wavelengths)
    {
        if (wavelength <= 0.0)
            throw GeometryError("wavelength must be positive");

        SystemGeometry g;
        g.wavelength = wavelength;
        g.ris_height = ris_height;
        g.user_height = user_height;

        const double spacing = 0.5 * wavelength;

        g.ris.count_h = n_h;
        g.ris.count_v = n_v;
        g.ris.spacing = spacing;
        g.ris.normal = Point3::UnitX();
        const Point3 ris_center(0.0, 0.0, ris_height);
        g.ris.origin = ris_center - 0.5 * (n_h - 1) * spacing * g.ris.horizontal_axis() -
                       0.5 * (n_v - 1) * spacing * g.ris.vertical_axis();

        g.array.count_h = m_h;
        g.array.count_v = m_v;
        g.array.spacing = spacing;
        g.array.normal = -Point3::UnitX();
        const double lateral = 0.5 * g.ris.horizontal_extent() + wavelength;
        const Point3 array_center(separation_wavelengths * wavelength, lateral, ris_height);
        g.array.origin = array_center - 0.5 * (m_h - 1) * spacing * g.array.horizontal_axis() -
                         0.5 * (m_v - 1) * spacing * g.array.vertical_axis();

        g.validate();
        return g;
    }

    void SystemGeometry::validate() const
    {
        if (wavelength <= 0.0)
            throw GeometryError("wavelength must be positive");
        array.validate(wavelength);
        ris.validate(wavelength);
    }

    // ---------- BS-RIS channel ----------

    BsRisChannel BsRisChannel::from_matrix(CMatrix h)
    {
        BsRisChannel c;
        c.gram = h.adjoint() * h;
        c.h = std::move(h);
        return c;
    }

    cdouble bs_ris_element_response(double distance, double wavelength, double amplitude_gain)
    {
        const double magnitude = amplitude_gain * wavelength / (4.0 * pi * distance);
        return std::polar(magnitude, -2.0 * pi * distance / wavelength);
    }

    BsRisChannel build_bs_ris_channel(const SystemGeometry &geometry, double reflection_efficiency,
                                      double gain_a_db, double gain_r_db)
    {
        const auto array_pos = build_upa_positions(geometry.array);
        const auto ris_pos = build_upa_positions(geometry.ris);
        const double amplitude = std::sqrt(reflection_efficiency * db_to_linear(gain_a_db) * db_to_linear(gain_r_db));

        CMatrix h(static_cast<Index>(array_pos.size()), static_cast<Index>(ris_pos.size()));
        for (std::size_t j = 0; j < ris_pos.size(); ++j)
            for (std::size_t i = 0; i < array_pos.size(); ++i)
            {
                const double d = (array_pos[i] - ris_pos[j]).norm();
                if (!(d > 0.0))
                    throw GeometryError("BS-RIS distance must be positive (array element " + std::to_string(i) +
                                        ", RIS element " + std::to_string(j) + ")");
                h(static_cast<Index>(i), static_cast<Index>(j)) = bs_ris_element_response(d, geometry.wavelength, amplitude);
            }
        return BsRisChannel::from_matrix(std::move(h));
    }

    double pathloss_db(double distance_3d)
    {
        if (!(distance_3d > 0.0))
            throw GeometryError("path-loss distance must be positive");
        return -35.3 - 37.6 * std::log10(distance_3d);
    }

    // ---------- Spatial correlation ----------

    UserChannelModel UserChannelModel::from_correlation(const CMatrix &correlation, double pathloss_linear)
    {
        UserChannelModel m;
        m.correlation = linalg::hermitian_part(correlation);
        m.pathloss_linear = pathloss_linear;

        const auto root = linalg::hermitian_sqrt(m.correlation);
        const double n = static_cast<double>(m.correlation.rows());
        const double trace = m.correlation.trace().real();
        if (root.min_eigenvalue < -1e-6 * trace / n)
            throw ModelError("correlation matrix is not positive semidefinite (min eigenvalue " +
                             std::to_string(root.min_eigenvalue) + ")");
        m.sqrt_correlation = root.sqrt;
        return m;
    }

    CMatrix ula_local_scattering(int count, double spacing_wavelengths, double angle, double spread, double scale)
    {
        if (count < 1)
            throw ModelError("ULA needs at least one element");
        if (spread < 0.0)
            throw ModelError("angular spread must be non-negative");

        // First column r(x) = E{exp(i 2 pi s x scale sin(angle + delta))}, x = 0..count-1.
        std::vector<cdouble> first(static_cast<std::size_t>(count), cdouble(1.0, 0.0));
        const double k = 2.0 * pi * spacing_wavelengths * scale;

        if (spread == 0.0)
        {
            for (int x = 1; x < count; ++x)
                first[static_cast<std::size_t>(x)] = std::polar(1.0, k * x * std::sin(angle));
        }
        else
        {
            const auto &rule = legendre20();
            const double lo = -quadrature_half_width * spread;
            const double panel = 2.0 * quadrature_half_width * spread / quadrature_panels;
            std::vector<double> deltas, weights;
            double total = 0.0;
            for (int p = 0; p < quadrature_panels; ++p)
            {
                const double mid = lo + (p + 0.5) * panel;
                for (std::size_t q = 0; q < rule.nodes.size(); ++q)
                {
                    const double delta = mid + 0.5 * panel * rule.nodes[q];
                    const double w = 0.5 * panel * rule.weights[q] * std::exp(-0.5 * delta * delta / (spread * spread));
                    deltas.push_back(delta);
                    weights.push_back(w);
                    total += w;
                }
            }
            for (int x = 1; x < count; ++x)
            {
                cdouble acc(0.0, 0.0);
                for (std::size_t q = 0; q < deltas.size(); ++q)
                    acc += weights[q] * std::polar(1.0, k * x * std::sin(angle + deltas[q]));
                first[static_cast<std::size_t>(x)] = acc / total;
            }
        }

        CMatrix r(count, count);
        for (int l = 0; l < count; ++l)
            for (int m = 0; m < count; ++m)
                r(l, m) = l >= m ? first[static_cast<std::size_t>(l - m)] : std::conj(first[static_cast<std::size_t>(m - l)]);
        return r;
    }

    UserChannelModel upa_correlation(const UpaConfig &upa, double wavelength, double azimuth, double elevation,
                                     double azimuth_spread, double elevation_spread, double pathloss_linear)
    {
        const double s = upa.spacing / wavelength;
        const CMatrix r_h = ula_local_scattering(upa.count_h, s, azimuth, azimuth_spread, std::cos(elevation));
        const CMatrix r_v = ula_local_scattering(upa.count_v, s, elevation, elevation_spread, 1.0);
        return UserChannelModel::from_correlation(pathloss_linear * linalg::kron(r_v, r_h), pathloss_linear);
    }

    UserChannelModel spatial_correlation(const SystemGeometry &geometry, double user_azimuth, double user_elevation,
                                         double azimuth_spread, double elevation_spread, double pathloss_linear)
    {
        return upa_correlation(geometry.ris, geometry.wavelength, user_azimuth, user_elevation, azimuth_spread,
                               elevation_spread, pathloss_linear);
    }

    CVector upa_steering_vector(const UpaConfig &upa, double wavelength, double azimuth, double elevation)
    {
        const Point3 dir = std::cos(elevation) * std::cos(azimuth) * upa.normal +
                           std::cos(elevation) * std::sin(azimuth) * upa.horizontal_axis() +
                           std::sin(elevation) * upa.vertical_axis();
        const auto pos = build_upa_positions(upa);
        CVector a(static_cast<Index>(pos.size()));
        for (std::size_t i = 0; i < pos.size(); ++i)
            a(static_cast<Index>(i)) = std::polar(1.0, 2.0 * pi / wavelength * dir.dot(pos[i] - upa.origin));
        return a;
    }

    // ---------- Realizations ----------

    ChannelRealization sample_channels(const std::vector<UserChannelModel> &models, RngStream &rng)
    {
        ChannelRealization out;
        out.reserve(models.size());
        for (const auto &m : models)
            out.push_back(m.sqrt_correlation * rng.complex_normal_vector(m.size()));
        return out;
    }

    CVector composite_channel(const BsRisChannel &channel, const RisMatrix &theta, const CVector &h)
    {
        if (channel.cols() != theta.size() || theta.size() != h.size())
            throw ModelError("composite_channel: dimension mismatch (H " + std::to_string(channel.rows()) + "x" +
                             std::to_string(channel.cols()) + ", Theta " + std::to_string(theta.size()) +
                             ", h " + std::to_string(h.size()) + ")");
        return channel.h * (theta.theta * h);
    }
}
