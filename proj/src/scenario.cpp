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

#include "bdris/scenario.hpp"
#include "bdris/pilot_estimation.hpp"
#include "bdris/ris_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace bdris
{
    namespace
    {
        double deg(double d) { return d * pi / 180.0; }

        std::string context(const ScenarioConfig &c)
        {
            return "[seed " + std::to_string(c.seed) + ", arch " + to_string(c.arch) + ", M " + std::to_string(c.m()) +
                   ", N " + std::to_string(c.n()) + ", K " + std::to_string(c.k) + "] ";
        }

        // Re-throws a library error with the scenario context prepended, keeping its category.
        template <typename F>
        auto with_context(const ScenarioConfig &c, F &&f) -> decltype(f())
        {
            try
            {
                return f();
            }
            catch (const ConfigError &e)
            {
                throw ConfigError(context(c) + e.what());
            }
            catch (const EstimationRankError &e)
            {
                throw EstimationRankError(context(c) + e.what());
            }
            catch (const Error &e)
            {
                throw NumericError(context(c) + e.what());
            }
        }

        std::vector<UserChannelModel> user_models(const UpaConfig &upa, double wavelength,
                                                  const std::vector<UserDrop> &users, const ScenarioConfig &c)
        {
            std::vector<UserChannelModel> models;
            models.reserve(users.size());
            for (const auto &u : users)
            {
                const double beta = db_to_linear(pathloss_db(u.distance_3d));
                models.push_back(upa_correlation(upa, wavelength, u.azimuth, u.elevation, deg(c.azimuth_spread_deg),
                                                 deg(c.elevation_spread_deg), beta));
            }
            return models;
        }

        void check_overhead(const ScenarioConfig &c, int tau_up)
        {
            if (tau_up >= c.tau)
                throw ConfigError("tau: uplink training needs tau_up = " + std::to_string(tau_up) +
                                  " samples, which leaves no downlink samples in tau = " + std::to_string(c.tau));
        }

        void finalize(ResultRecord &rec, const LinkStatistics &stats, const ScenarioConfig &c, int tau_up)
        {
            BisectionSettings bs;
            bs.tolerance = c.bisection_tol;
            const PowerSolution sol = bisection_maxmin(stats, c.rho_dl_mw, bs);
            rec.powers = sol.powers;
            rec.achieved_sinr = sol.achieved_sinr;
            rec.se.clear();
            for (int k = 0; k < c.k; ++k)
                rec.se.push_back(se_lower_bound(sol.sinr(k), tau_up, c.tau));
            rec.min_se = *std::min_element(rec.se.begin(), rec.se.end());
            rec.avg_se = std::accumulate(rec.se.begin(), rec.se.end(), 0.0) / static_cast<double>(rec.se.size());
        }
    }

    std::vector<UserDrop> drop_users(const ScenarioConfig &config, RngStream &rng)
    {
        if (config.k < 1)
            throw ConfigError("K: must be at least 1");
        const double half = deg(config.sector_half_deg);
        const double height_gap = config.h_ris_m - config.h_user_m;
        std::vector<UserDrop> users(static_cast<std::size_t>(config.k));
        for (auto &u : users)
        {
            u.azimuth = rng.uniform(-half, half);
            u.ground_distance = rng.uniform(config.d_min_m, config.d_max_m);
            u.distance_3d = std::hypot(u.ground_distance, height_gap);
            u.elevation = -std::atan2(height_gap, u.ground_distance);
            u.position = Point3(u.ground_distance * std::cos(u.azimuth), u.ground_distance * std::sin(u.azimuth),
                                config.h_user_m);
        }
        return users;
    }

    PreparedScenario prepare_ris_scenario(const ScenarioConfig &c)
    {
        return with_context(c, [&]
        {
            c.validate();
            const RngStream rng(c.seed);
            PreparedScenario p;
            p.geometry = SystemGeometry::bs_side(c.m_h, c.m_v, c.n_h, c.n_v, c.wavelength(), c.h_ris_m, c.h_user_m,
                                                 c.separation_wavelengths);
            BsRisChannel channel = build_bs_ris_channel(p.geometry, c.reflection_efficiency, c.gain_a_db, c.gain_r_db);

            RngStream drop_rng = rng.substream(StreamTag::user_drop);
            p.users = drop_users(c, drop_rng);
            auto models = user_models(p.geometry.ris, p.geometry.wavelength, p.users, c);

            PilotBook pilots = make_pilots(c.k, c.pilot_length());
            StackedTrainingMatrix training = build_training(channel, rng.substream(StreamTag::training).seed());
            p.tau_up = training.epochs * pilots.length();
            check_overhead(c, p.tau_up);

            p.link = LinkScenario::build(std::move(channel), std::move(models), std::move(training), std::move(pilots),
                                         c.rho_ul_mw, c.uplink_noise_mw(), c.downlink_noise_mw());
            p.link.normalization = c.precoder;
            return p;
        });
    }

    PreparedScenario prepare_baseline_scenario(const ScenarioConfig &c)
    {
        return with_context(c, [&]
        {
            c.validate();
            const RngStream rng(c.seed);
            PreparedScenario p;
            p.geometry = SystemGeometry::bs_side(c.m_h, c.m_v, c.n_h, c.n_v, c.wavelength(), c.h_ris_m, c.h_user_m,
                                                 c.separation_wavelengths);

            // The conventional array takes the RIS position and faces the same sector.
            UpaConfig array = p.geometry.array;
            array.normal = Point3::UnitX();
            array.origin = p.geometry.ris.center() - 0.5 * (array.count_h - 1) * array.spacing * array.horizontal_axis() -
                           0.5 * (array.count_v - 1) * array.spacing * array.vertical_axis();

            RngStream drop_rng = rng.substream(StreamTag::user_drop);
            p.users = drop_users(c, drop_rng);
            auto models = user_models(array, p.geometry.wavelength, p.users, c);

            const Index m = c.m();
            BsRisChannel channel = BsRisChannel::from_matrix(CMatrix::Identity(m, m));
            PilotBook pilots = make_pilots(c.k, c.pilot_length());
            StackedTrainingMatrix training = stack_training_matrix(channel, TrainingSchedule::identity(m));
            p.tau_up = pilots.length();
            check_overhead(c, p.tau_up);

            p.link = LinkScenario::build(std::move(channel), std::move(models), std::move(training), std::move(pilots),
                                         c.rho_ul_mw, c.uplink_noise_mw(), c.downlink_noise_mw());
            p.link.normalization = c.precoder;
            return p;
        });
    }

    ResultRecord run_baseline_mamimo(const ScenarioConfig &config)
    {
        const auto start = std::chrono::steady_clock::now();
        ScenarioConfig c = config;
        c.arch = SystemArchitecture::none;
        PreparedScenario p = prepare_baseline_scenario(c);

        ResultRecord rec;
        rec.seed = c.seed;
        rec.arch = SystemArchitecture::none;
        rec.m = c.m();
        rec.n = c.n();
        rec.k = c.k;
        rec.q = 1;
        rec.tau_up = p.tau_up;

        with_context(c, [&]
        {
            const RngStream rng(c.seed);
            const RisMatrix identity = RisMatrix::identity(c.m());
            const LinkStatistics stats = estimate_link_statistics(p.link, identity, c.mc, rng.substream(StreamTag::monte_carlo));
            finalize(rec, stats, c, p.tau_up);
            return 0;
        });
        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        return rec;
    }

    ResultRecord run_scenario(const ScenarioConfig &config)
    {
        if (config.arch == SystemArchitecture::none)
            return run_baseline_mamimo(config);

        const auto start = std::chrono::steady_clock::now();
        const ScenarioConfig &c = config;
        PreparedScenario p = prepare_ris_scenario(c);

        ResultRecord rec;
        rec.seed = c.seed;
        rec.arch = c.arch;
        rec.m = c.m();
        rec.n = c.n();
        rec.k = c.k;
        rec.q = p.link.training.epochs;
        rec.tau_up = p.tau_up;

        with_context(c, [&]
        {
            const RngStream rng(c.seed);
            CostContext ctx;
            ctx.gram = p.link.channel.gram;
            for (const auto &u : p.link.users)
                ctx.correlations.push_back(u.correlation);

            OptimizerSettings settings = c.optimizer;
            settings.seed = rng.substream(StreamTag::optimizer).seed();
            const RisArchitecture arch =
                c.arch == SystemArchitecture::bd ? RisArchitecture::beyond_diagonal : RisArchitecture::diagonal;
            const OptimizerResult opt = optimize(ctx, arch, settings);

            rec.opt_cost = opt.trace.final_cost();
            rec.opt_iters = opt.trace.iterations;
            rec.opt_stop = to_string(opt.trace.stop);
            rec.theta_violation = opt.theta.constraint_violation();

            const LinkStatistics stats = estimate_link_statistics(p.link, opt.theta, c.mc, rng.substream(StreamTag::monte_carlo));
            finalize(rec, stats, c, p.tau_up);
            return 0;
        });
        rec.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
        return rec;
    }
}
