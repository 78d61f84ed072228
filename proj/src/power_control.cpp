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

#include "bdris/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

namespace bdris
{
    void LinkStatistics::validate() const
    {
        const Index k = a.size();
        if (b.rows() != k || b.cols() != k)
            throw ModelError("LinkStatistics: b must be K x K");
        if ((a.array() < 0.0).any() || (b.array() < 0.0).any())
            throw ModelError("LinkStatistics: negative moment");
        if (!(noise_power > 0.0))
            throw ModelError("LinkStatistics: noise power must be positive");
    }

    CVector mrt_precoder(const BsRisChannel &channel, const RisMatrix &theta, const CVector &estimate, const CMatrix &phi)
    {
        const CMatrix effective = channel.h * theta.theta;
        const double normalizer = (effective * phi * effective.adjoint()).trace().real();
        if (!(normalizer > 0.0))
            throw ModelError("mrt_precoder: degenerate user (zero precoder normalization)");
        return effective * estimate / std::sqrt(normalizer);
    }

    LinkScenario LinkScenario::build(BsRisChannel channel, std::vector<UserChannelModel> users,
                                     StackedTrainingMatrix training, PilotBook pilots, double uplink_power,
                                     double uplink_noise, double downlink_noise)
    {
        LinkScenario s;
        s.estimator = build_lmmse(training, users, pilots, uplink_power, uplink_noise);
        s.channel = std::move(channel);
        s.users = std::move(users);
        s.training = std::move(training);
        s.pilots = std::move(pilots);
        s.uplink_power = uplink_power;
        s.uplink_noise = uplink_noise;
        s.downlink_noise = downlink_noise;
        return s;
    }

    namespace
    {
        // g_k^H w_i for one realization, K x K.
        CMatrix realization_products(const LinkScenario &s, const CMatrix &effective, const RVector &avg_norm,
                                     RngStream rng)
        {
            const int k_users = s.num_users();
            const ChannelRealization h = sample_channels(s.users, rng);

            std::vector<CVector> estimates;
            if (s.perfect_csi)
                estimates = h;
            else
            {
                const auto y = simulate_uplink_training(s.training, h, s.pilots, s.uplink_power, s.uplink_noise, rng);
                estimates.reserve(static_cast<std::size_t>(k_users));
                for (int k = 0; k < k_users; ++k)
                    estimates.push_back(s.estimator.estimate(y[static_cast<std::size_t>(k)], k));
            }

            const Index m = effective.rows();
            CMatrix g(m, k_users), w(m, k_users);
            for (int k = 0; k < k_users; ++k)
            {
                g.col(k) = effective * h[static_cast<std::size_t>(k)];
                const CVector v = effective * estimates[static_cast<std::size_t>(k)];
                const double norm = s.normalization == PrecoderNormalization::average ? avg_norm(k) : v.norm();
                w.col(k) = norm > 0.0 ? CVector(v / norm) : CVector::Zero(m);
            }
            return g.adjoint() * w;
        }
    }

    LinkStatistics estimate_link_statistics(const LinkScenario &scenario, const RisMatrix &theta, int mc_count,
                                            const RngStream &rng)
    {
        if (mc_count < 2)
            throw ModelError("estimate_link_statistics: mc_count must be at least 2");
        const int k_users = scenario.num_users();
        const CMatrix effective = scenario.channel.h * theta.theta;

        RVector avg_norm(k_users);
        for (int k = 0; k < k_users; ++k)
        {
            const CMatrix &phi = scenario.perfect_csi ? scenario.users[static_cast<std::size_t>(k)].correlation
                                                      : scenario.estimator.estimate_covariance(k);
            const double tr = (effective * phi * effective.adjoint()).trace().real();
            if (!(tr > 0.0))
                throw ModelError("estimate_link_statistics: degenerate user " + std::to_string(k));
            avg_norm(k) = std::sqrt(tr);
        }

        // Realizations are independent sub-streams; workers fill disjoint slots and the
        // reduction below runs in realization order.
        std::vector<CMatrix> products(static_cast<std::size_t>(mc_count));
        const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16u));
        auto work = [&](unsigned id)
        {
            for (int r = static_cast<int>(id); r < mc_count; r += static_cast<int>(workers))
                products[static_cast<std::size_t>(r)] =
                    realization_products(scenario, effective, avg_norm, rng.substream(static_cast<std::uint64_t>(r)));
        };
        if (workers == 1)
            work(0);
        else
        {
            std::vector<std::thread> pool;
            for (unsigned id = 0; id < workers; ++id)
                pool.emplace_back(work, id);
            for (auto &t : pool)
                t.join();
        }

        CVector sum_diag = CVector::Zero(k_users);
        RMatrix sum_sq = RMatrix::Zero(k_users, k_users);
        RMatrix sum_quad = RMatrix::Zero(k_users, k_users);
        for (const auto &x : products)
        {
            sum_diag += x.diagonal();
            const RMatrix sq = x.cwiseAbs2();
            sum_sq += sq;
            sum_quad += sq.cwiseAbs2();
        }

        const double n = static_cast<double>(mc_count);
        LinkStatistics st;
        st.mc_count = mc_count;
        st.noise_power = scenario.downlink_noise;
        st.b = sum_sq / n;
        st.b_stderr = ((sum_quad / n - st.b.cwiseAbs2()).cwiseMax(0.0) / n).cwiseSqrt();
        st.a.resize(k_users);
        st.a_stderr.resize(k_users);
        for (int k = 0; k < k_users; ++k)
        {
            const cdouble mean = sum_diag(k) / n;
            st.a(k) = std::norm(mean);
            const double var = std::max(0.0, st.b(k, k) - st.a(k));
            st.a_stderr(k) = 2.0 * std::abs(mean) * std::sqrt(var / n);
        }
        return st;
    }

    double sinr_lower_bound(std::span<const double> powers, const LinkStatistics &stats, int user)
    {
        const int k_users = stats.num_users();
        if (static_cast<int>(powers.size()) != k_users || user < 0 || user >= k_users)
            throw ModelError("sinr_lower_bound: dimension mismatch");

        const double desired = powers[static_cast<std::size_t>(user)] * stats.a(user);
        double denom = stats.noise_power - desired;
        for (int i = 0; i < k_users; ++i)
            denom += powers[static_cast<std::size_t>(i)] * stats.b(user, i);
        if (!(denom > 0.0))
            throw NumericError("sinr_lower_bound: non-positive denominator (invalid statistics)");
        return desired / denom;
    }

    double se_lower_bound(double sinr, int tau_up, int tau)
    {
        if (tau_up < 0 || tau_up >= tau)
            throw ModelError("se_lower_bound: requires 0 <= tau_up < tau (tau_up " + std::to_string(tau_up) +
                             ", tau " + std::to_string(tau) + ")");
        return (1.0 - static_cast<double>(tau_up) / tau) * std::log2(1.0 + sinr);
    }

    std::optional<FeasiblePowers> check_feasibility(double gamma, const LinkStatistics &stats, double total_power)
    {
        if (gamma < 0.0)
            throw ModelError("check_feasibility: gamma must be non-negative");
        const int k_users = stats.num_users();
        if (gamma == 0.0)
            return FeasiblePowers{RVector::Zero(k_users), true};

        // (diag(a) - gamma B') rho = gamma sigma^2 1
        RMatrix system = -gamma * stats.b;
        for (int k = 0; k < k_users; ++k)
            system(k, k) += gamma * stats.a(k) + stats.a(k);
        const RVector rhs = RVector::Constant(k_users, gamma * stats.noise_power);

        Eigen::FullPivLU<RMatrix> lu(system);
        if (!lu.isInvertible())
            return std::nullopt;
        RVector rho = lu.solve(rhs);

        if ((rho.array() <= 0.0).any() || !rho.allFinite())
            return std::nullopt;
        if (rho.sum() > total_power * (1.0 + 1e-12))
            return std::nullopt;
        return FeasiblePowers{std::move(rho), false};
    }

    PowerSolution bisection_maxmin(const LinkStatistics &stats, double total_power, const BisectionSettings &settings)
    {
        stats.validate();
        if (!(settings.tolerance > 0.0))
            throw ConfigError("bisection: tolerance must be positive");
        if (!(settings.relative_tolerance >= 0.0))
            throw ConfigError("bisection: relative tolerance must be non-negative");
        if (!(total_power > 0.0))
            throw ConfigError("bisection: total power must be positive");

        const int k_users = stats.num_users();
        double hi = settings.gamma_max_init;
        if (!(hi > 0.0))
            hi = total_power * stats.a.maxCoeff() / stats.noise_power;
        if (!(hi > 0.0))
            throw NumericError("bisection: every user has zero desired-signal moment");

        if (check_feasibility(hi, stats, total_power))
        {
            hi *= 2.0;
            if (check_feasibility(hi, stats, total_power))
                throw NumericError("bisection: upper bracket is feasible after widening");
        }

        double lo = 0.0;
        PowerSolution sol;
        std::optional<RVector> best;
        // Keep going past the tolerance until some strictly positive gamma is feasible. The relative
        // test matters when every SINR is far below nu, as with weak RIS links.
        auto open_bracket = [&] { return hi - lo > settings.tolerance || hi - lo > settings.relative_tolerance * hi; };
        while ((open_bracket() || !best) && sol.iterations < settings.max_iterations)
        {
            const double mid = 0.5 * (hi + lo);
            if (auto feasible = check_feasibility(mid, stats, total_power))
            {
                lo = mid;
                best = std::move(feasible->powers);
            }
            else
                hi = mid;
            ++sol.iterations;
            sol.feasible_history.push_back(lo);
        }
        if (!best)
            throw NumericError("bisection: no feasible SINR target found");

        sol.powers = std::move(*best);
        sol.sinr.resize(k_users);
        const std::span<const double> rho(sol.powers.data(), static_cast<std::size_t>(k_users));
        for (int k = 0; k < k_users; ++k)
            sol.sinr(k) = sinr_lower_bound(rho, stats, k);
        sol.achieved_sinr = sol.sinr.minCoeff();
        return sol;
    }
}
