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

#ifndef BDRIS_PILOT_ESTIMATION_HPP
#define BDRIS_PILOT_ESTIMATION_HPP

#include "bdris/geometry_channel.hpp"
#include "bdris/rng.hpp"
#include "bdris/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace bdris
{
    // Real pilot sequences, one column per user, each with squared norm equal to the length.
    struct PilotBook
    {
        RMatrix pilots; // tau_p x K
        RMatrix gram;   // psi_{k,i} = phi_k^T phi_i
        std::vector<std::string> warnings;

        int length() const { return static_cast<int>(pilots.rows()); }
        int num_users() const { return static_cast<int>(pilots.cols()); }
        bool contaminated() const { return length() < num_users(); }
    };

    // Scaled unit vectors sqrt(length) e_(k mod length). Users share a pilot when length < K.
    PilotBook make_pilots(int num_users, int length);

    // Q = ceil(N / M) diagonal unit-modulus RIS configurations, stored as phase vectors.
    struct TrainingSchedule
    {
        std::vector<CVector> diagonals;

        int epochs() const { return static_cast<int>(diagonals.size()); }
        CMatrix config(int q) const { return diagonals[static_cast<std::size_t>(q)].asDiagonal(); }

        // Q = 1 with Theta_tr = I (conventional array without RIS).
        static TrainingSchedule identity(Index n);
    };

    int training_epochs(int n, int m);
    TrainingSchedule make_training_configs(int n, int m, std::uint64_t seed);

    // H_tr = [H Theta^(1); ...; H Theta^(Q)] and its thin SVD H_tr = U diag(s) V^H.
    struct StackedTrainingMatrix
    {
        CMatrix matrix;          // MQ x N
        CMatrix u;               // MQ x N
        RVector singular_values; // N, descending
        CMatrix v;               // N x N
        int epochs = 1;
        Index array_size = 0;    // M

        Index observations() const { return matrix.rows(); }
        Index unknowns() const { return matrix.cols(); }
    };

    // Throws EstimationRankError when any singular value falls below 1e-9 * largest.
    StackedTrainingMatrix stack_training_matrix(const BsRisChannel &channel, const TrainingSchedule &schedule);

    // Draws training configs from `seed`, re-drawing with a shifted seed on rank failure.
    StackedTrainingMatrix build_training(const BsRisChannel &channel, std::uint64_t seed, int max_attempts = 16);

    // Per-user projected and stacked observations y_k (length MQ), simulated from the
    // received pilot signal Y^(q) = sum_k sqrt(p) H Theta^(q) h_k phi_k^T + N^(q).
    std::vector<CVector> simulate_uplink_training(const StackedTrainingMatrix &stacked,
                                                  const ChannelRealization &realization, const PilotBook &pilots,
                                                  double uplink_power, double noise_power, RngStream &rng);

    class LmmseEstimator
    {
    public:
        LmmseEstimator() = default;

        CVector estimate(const CVector &observation, int user) const;

        const CMatrix &filter(int user) const { return filters_[static_cast<std::size_t>(user)]; }
        const CMatrix &estimate_covariance(int user) const { return phi_[static_cast<std::size_t>(user)]; }
        const CMatrix &error_covariance(int user) const { return error_[static_cast<std::size_t>(user)]; }
        int num_users() const { return static_cast<int>(filters_.size()); }

    private:
        friend LmmseEstimator build_lmmse(const StackedTrainingMatrix &, const std::vector<UserChannelModel> &,
                                          const PilotBook &, double, double);

        std::vector<CMatrix> filters_; // N x MQ
        std::vector<CMatrix> phi_;     // N x N
        std::vector<CMatrix> error_;   // R_k - Phi_k
    };

    LmmseEstimator build_lmmse(const StackedTrainingMatrix &stacked, const std::vector<UserChannelModel> &models,
                               const PilotBook &pilots, double uplink_power, double noise_power);
}

#endif
