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

#include "bdris/pilot_estimation.hpp"
#include "bdris/linalg.hpp"

#include <cmath>

namespace bdris
{
    PilotBook make_pilots(int num_users, int length)
    {
        if (num_users < 1)
            throw ModelError("make_pilots: need at least one user");
        if (length < 1)
            throw ModelError("make_pilots: pilot length must be at least 1");

        PilotBook book;
        book.pilots = RMatrix::Zero(length, num_users);
        const double amplitude = std::sqrt(static_cast<double>(length));
        for (int k = 0; k < num_users; ++k)
            book.pilots(k % length, k) = amplitude;
        book.gram = book.pilots.transpose() * book.pilots;

        if (length < num_users)
            book.warnings.push_back("pilot length " + std::to_string(length) + " < " + std::to_string(num_users) +
                                    " users: pilots are reused (contaminated)");
        return book;
    }

    TrainingSchedule TrainingSchedule::identity(Index n)
    {
        TrainingSchedule s;
        s.diagonals.push_back(CVector::Ones(n));
        return s;
    }

    int training_epochs(int n, int m)
    {
        if (n < 1 || m < 1)
            throw ModelError("training_epochs: n and m must be positive");
        return (n + m - 1) / m;
    }

    TrainingSchedule make_training_configs(int n, int m, std::uint64_t seed)
    {
        const int q = training_epochs(n, m);
        RngStream rng(seed);
        TrainingSchedule s;
        s.diagonals.reserve(static_cast<std::size_t>(q));
        for (int e = 0; e < q; ++e)
        {
            CVector d(n);
            for (int i = 0; i < n; ++i)
                d(i) = std::polar(1.0, rng.uniform(0.0, 2.0 * pi));
            s.diagonals.push_back(std::move(d));
        }
        return s;
    }

    StackedTrainingMatrix stack_training_matrix(const BsRisChannel &channel, const TrainingSchedule &schedule)
    {
        const Index m = channel.rows();
        const Index n = channel.cols();
        const int q = schedule.epochs();
        if (q < 1)
            throw ModelError("stack_training_matrix: empty training schedule");

        StackedTrainingMatrix out;
        out.epochs = q;
        out.array_size = m;
        out.matrix.resize(m * q, n);
        for (int e = 0; e < q; ++e)
        {
            const CVector &d = schedule.diagonals[static_cast<std::size_t>(e)];
            if (d.size() != n)
                throw ModelError("stack_training_matrix: training config dimension mismatch");
            out.matrix.middleRows(e * m, m) = channel.h * d.asDiagonal();
        }

        if (out.matrix.rows() < n)
            throw EstimationRankError("training has fewer observables (" + std::to_string(out.matrix.rows()) +
                                      ") than unknowns (" + std::to_string(n) + ")");

        Eigen::BDCSVD<CMatrix> svd(out.matrix, Eigen::ComputeThinU | Eigen::ComputeThinV);
        out.u = svd.matrixU();
        out.v = svd.matrixV();
        out.singular_values = svd.singularValues();

        const double largest = out.singular_values(0);
        const double smallest = out.singular_values(n - 1);
        if (!(largest > 0.0) || smallest <= 1e-9 * largest)
            throw EstimationRankError("stacked training matrix is rank deficient (singular value ratio " +
                                      std::to_string(largest > 0.0 ? smallest / largest : 0.0) + ")");
        return out;
    }

    StackedTrainingMatrix build_training(const BsRisChannel &channel, std::uint64_t seed, int max_attempts)
    {
        const int n = static_cast<int>(channel.cols());
        const int m = static_cast<int>(channel.rows());
        for (int attempt = 0;; ++attempt)
        {
            const auto schedule = make_training_configs(n, m, splitmix64(seed + static_cast<std::uint64_t>(attempt)));
            try
            {
                return stack_training_matrix(channel, schedule);
            }
            catch (const EstimationRankError &)
            {
                if (attempt + 1 >= max_attempts)
                    throw;
            }
        }
    }

    std::vector<CVector> simulate_uplink_training(const StackedTrainingMatrix &stacked,
                                                  const ChannelRealization &realization, const PilotBook &pilots,
                                                  double uplink_power, double noise_power, RngStream &rng)
    {
        const int k_users = pilots.num_users();
        if (static_cast<int>(realization.size()) != k_users)
            throw ModelError("simulate_uplink_training: realization and pilot book disagree on K");

        const Index n = stacked.unknowns();
        CMatrix channels(n, k_users);
        for (int k = 0; k < k_users; ++k)
        {
            if (realization[static_cast<std::size_t>(k)].size() != n)
                throw ModelError("simulate_uplink_training: channel dimension mismatch");
            channels.col(k) = realization[static_cast<std::size_t>(k)];
        }

        // Received pilot matrix over all epochs, MQ x tau_p.
        const CMatrix phi = pilots.pilots.cast<cdouble>();
        CMatrix received = std::sqrt(uplink_power) * (stacked.matrix * channels) * phi.transpose();
        if (noise_power > 0.0)
            received += std::sqrt(noise_power) * rng.complex_normal_matrix(received.rows(), received.cols());

        std::vector<CVector> y;
        y.reserve(static_cast<std::size_t>(k_users));
        for (int k = 0; k < k_users; ++k)
            y.push_back(received * phi.col(k));
        return y;
    }

    CVector LmmseEstimator::estimate(const CVector &observation, int user) const
    {
        const CMatrix &f = filter(user);
        if (observation.size() != f.cols())
            throw ModelError("LmmseEstimator::estimate: observation length mismatch");
        return f * observation;
    }

    LmmseEstimator build_lmmse(const StackedTrainingMatrix &stacked, const std::vector<UserChannelModel> &models,
                               const PilotBook &pilots, double uplink_power, double noise_power)
    {
        const int k_users = pilots.num_users();
        if (static_cast<int>(models.size()) != k_users)
            throw ModelError("build_lmmse: models and pilot book disagree on K");

        const Index n = stacked.unknowns();
        const double tau_p = static_cast<double>(pilots.length());
        const CMatrix lambda = stacked.singular_values.cast<cdouble>().asDiagonal();
        const CMatrix &v = stacked.v;

        // V^H R_j V for every user, reused across the K estimators.
        std::vector<CMatrix> rotated;
        rotated.reserve(models.size());
        for (const auto &m : models)
        {
            if (m.size() != n)
                throw ModelError("build_lmmse: correlation dimension mismatch");
            rotated.push_back(v.adjoint() * m.correlation * v);
        }

        LmmseEstimator est;
        for (int k = 0; k < k_users; ++k)
        {
            const CMatrix r_vy = tau_p * std::sqrt(uplink_power) * rotated[static_cast<std::size_t>(k)] * lambda;

            CMatrix r_yy = noise_power * tau_p * CMatrix::Identity(n, n);
            for (int j = 0; j < k_users; ++j)
            {
                const double psi = pilots.gram(j, k);
                if (psi != 0.0)
                    r_yy += psi * psi * uplink_power * lambda * rotated[static_cast<std::size_t>(j)] * lambda;
            }
            r_yy = linalg::hermitian_part(r_yy);

            Eigen::LLT<CMatrix> llt(r_yy);
            if (llt.info() != Eigen::Success)
                throw NumericError("build_lmmse: observation covariance is singular for user " + std::to_string(k));

            // X = R_vy R_yy^{-1}, via R_yy X^H = R_vy^H.
            const CMatrix x = llt.solve(r_vy.adjoint()).adjoint();

            est.filters_.push_back(v * x * stacked.u.adjoint());
            CMatrix phi = linalg::hermitian_part(v * x * r_vy.adjoint() * v.adjoint());
            est.error_.push_back(models[static_cast<std::size_t>(k)].correlation - phi);
            est.phi_.push_back(std::move(phi));
        }
        return est;
    }
}
