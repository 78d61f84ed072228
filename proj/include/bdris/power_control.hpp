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

#ifndef BDRIS_POWER_CONTROL_HPP
#define BDRIS_POWER_CONTROL_HPP

#include "bdris/geometry_channel.hpp"
#include "bdris/pilot_estimation.hpp"
#include "bdris/ris_matrix.hpp"
#include "bdris/rng.hpp"
#include "bdris/types.hpp"

#include <optional>
#include <span>
#include <vector>

namespace bdris
{
    // Hardening-bound statistics: a_k = |E{g_k^H w_k}|^2, b_ki = E{|g_k^H w_i|^2} (self term raw).
    struct LinkStatistics
    {
        RVector a;
        RVector a_stderr;
        RMatrix b;
        RMatrix b_stderr;
        int mc_count = 0;
        double noise_power = 0.0; // downlink noise [mW]

        int num_users() const { return static_cast<int>(a.size()); }
        void validate() const;
    };

    enum class PrecoderNormalization
    {
        average,      // w = v / sqrt(E||v||^2), the statistical MRT normalization
        instantaneous // w = v / ||v|| per realization
    };

    CVector mrt_precoder(const BsRisChannel &channel, const RisMatrix &theta, const CVector &estimate, const CMatrix &phi);

    // Everything fixed over the coherence blocks of one topology: BS-RIS channel, users' statistics,
    // training design, and the estimator built from them.
    struct LinkScenario
    {
        BsRisChannel channel;
        std::vector<UserChannelModel> users;
        StackedTrainingMatrix training;
        PilotBook pilots;
        LmmseEstimator estimator;
        double uplink_power = 0.0;   // [mW]
        double uplink_noise = 0.0;   // [mW]
        double downlink_noise = 0.0; // [mW]
        PrecoderNormalization normalization = PrecoderNormalization::average;
        bool perfect_csi = false;    // use h_k as its own estimate with Phi_k = R_k

        int num_users() const { return static_cast<int>(users.size()); }

        static LinkScenario build(BsRisChannel channel, std::vector<UserChannelModel> users,
                                  StackedTrainingMatrix training, PilotBook pilots, double uplink_power,
                                  double uplink_noise, double downlink_noise);
    };

    // Monte Carlo over realizations r = 0..mc_count-1, each drawn from rng.substream(r).
    LinkStatistics estimate_link_statistics(const LinkScenario &scenario, const RisMatrix &theta, int mc_count,
                                            const RngStream &rng);

    double sinr_lower_bound(std::span<const double> powers, const LinkStatistics &stats, int user);
    double se_lower_bound(double sinr, int tau_up, int tau);

    struct FeasiblePowers
    {
        RVector powers;
        bool zero_limit = false; // gamma = 0: the rho -> 0+ limit
    };

    // Balanced solve rho_k a_k = gamma (sum_i rho_i b'_ki + sigma^2) with b'_kk = b_kk - a_k;
    // feasible when the solution is entrywise positive and within the power budget.
    std::optional<FeasiblePowers> check_feasibility(double gamma, const LinkStatistics &stats, double total_power);

    struct BisectionSettings
    {
        double tolerance = 1e-4;     // nu, on linear SINR
        double relative_tolerance = 1e-6; // also required: width <= relative_tolerance * gamma_max
        double gamma_max_init = 0.0; // <= 0 selects max_k rho_dL a_k / sigma^2
        int max_iterations = 200;
    };

    struct PowerSolution
    {
        RVector powers;
        RVector sinr;            // per-user SINR at `powers`
        double achieved_sinr = 0.0;
        int iterations = 0;
        std::vector<double> feasible_history; // gamma_min after every iteration
    };

    PowerSolution bisection_maxmin(const LinkStatistics &stats, double total_power, const BisectionSettings &settings = {});
}

#endif
