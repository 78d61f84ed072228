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

#ifndef BDRIS_GEOMETRY_CHANNEL_HPP
#define BDRIS_GEOMETRY_CHANNEL_HPP

#include "bdris/ris_matrix.hpp"
#include "bdris/rng.hpp"
#include "bdris/types.hpp"

#include <vector>

namespace bdris
{
    // Uniform planar array. Elements are indexed row-major, horizontal index fastest:
    // element (h, v) has linear index v * count_h + h.
    struct UpaConfig
    {
        int count_h = 1;
        int count_v = 1;
        double spacing = 0.0;                         // [m]
        Point3 origin = Point3::Zero();               // position of element (0, 0) [m]
        Point3 normal = Point3::UnitX();              // unit normal of the array plane

        int total() const { return count_h * count_v; }

        // Horizontal and vertical in-plane unit vectors. For normal = +x these are +y and +z.
        Point3 horizontal_axis() const;
        Point3 vertical_axis() const;

        Point3 center() const;
        double horizontal_extent() const { return (count_h - 1) * spacing; }

        void validate(double wavelength) const;
    };

    std::vector<Point3> build_upa_positions(const UpaConfig &config);

    struct SystemGeometry
    {
        UpaConfig array;          // M active elements
        UpaConfig ris;            // N passive elements
        double wavelength = 0.0;  // [m]
        double ris_height = 10.0; // [m]
        double user_height = 1.5; // [m]

        // BS-side layout: the RIS plane faces +x with its lower-left element at (0, 0, ris_height)
        // minus half its vertical extent; the active array sits in a parallel plane
        // `separation_wavelengths` in front of it, its center shifted laterally by half the
        // RIS aperture plus one wavelength. Element spacing is wavelength / 2 on both arrays.
        static SystemGeometry bs_side(int m_h, int m_v, int n_h, int n_v, double wavelength,
                                      double ris_height, double user_height,
                                      double separation_wavelengths = 5.0);

        void validate() const;
    };

    // Deterministic BS-RIS channel H (M x N) and its Gram matrix G = H^H H.
    struct BsRisChannel
    {
        CMatrix h;
        CMatrix gram;

        Index rows() const { return h.rows(); }
        Index cols() const { return h.cols(); }

        static BsRisChannel from_matrix(CMatrix h);
    };

    BsRisChannel build_bs_ris_channel(const SystemGeometry &geometry, double reflection_efficiency,
                                      double gain_a_db, double gain_r_db);

    // Single-link form of the BS-RIS element response; used by build_bs_ris_channel.
    cdouble bs_ris_element_response(double distance, double wavelength, double amplitude_gain);

    // Large-scale fading in dB, -35.3 - 37.6 log10(d / 1 m).
    double pathloss_db(double distance_3d);

    struct UserChannelModel
    {
        CMatrix correlation;      // R_k, path loss folded in
        CMatrix sqrt_correlation; // sqrt(R_k)
        double pathloss_linear = 1.0;

        Index size() const { return correlation.rows(); }

        // Builds the square root by clamped Hermitian eigendecomposition. Throws ModelError when
        // the most negative eigenvalue exceeds 1e-6 * trace / N in magnitude.
        static UserChannelModel from_correlation(const CMatrix &correlation, double pathloss_linear);
    };

    // Toeplitz correlation of a uniform linear array with a Gaussian angular spread:
    // [R]_{l,m} = E{ exp(i 2 pi s (l - m) scale sin(angle + delta)) }, delta ~ N(0, spread^2),
    // with s the spacing in wavelengths. spread = 0 gives the point-source steering outer product.
    CMatrix ula_local_scattering(int count, double spacing_wavelengths, double angle, double spread,
                                 double scale = 1.0);

    // R = beta * (R_V kron R_H) for an arbitrary UPA; horizontal index fastest.
    UserChannelModel upa_correlation(const UpaConfig &upa, double wavelength, double azimuth,
                                     double elevation, double azimuth_spread, double elevation_spread,
                                     double pathloss_linear);

    // RIS-side correlation for one user.
    UserChannelModel spatial_correlation(const SystemGeometry &geometry, double user_azimuth,
                                         double user_elevation, double azimuth_spread,
                                         double elevation_spread, double pathloss_linear);

    // Unit-modulus UPA steering vector towards (azimuth, elevation) relative to the array normal.
    CVector upa_steering_vector(const UpaConfig &upa, double wavelength, double azimuth, double elevation);

    using ChannelRealization = std::vector<CVector>;

    // h_k = sqrt(R_k) * hbar_k, hbar_k ~ CN(0, I).
    ChannelRealization sample_channels(const std::vector<UserChannelModel> &models, RngStream &rng);

    // g = H Theta h
    CVector composite_channel(const BsRisChannel &channel, const RisMatrix &theta, const CVector &h);
}

#endif
