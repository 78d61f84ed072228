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

#ifndef BDRIS_SCENARIO_HPP
#define BDRIS_SCENARIO_HPP

#include "bdris/config.hpp"
#include "bdris/geometry_channel.hpp"
#include "bdris/power_control.hpp"
#include "bdris/rng.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bdris
{
    struct UserDrop
    {
        double azimuth = 0.0;         // [rad], relative to the RIS broadside
        double ground_distance = 0.0; // [m]
        double distance_3d = 0.0;     // [m]
        double elevation = 0.0;       // [rad], negative: users are below the RIS
        Point3 position = Point3::Zero();
    };

    // Uniform azimuth in the sector and uniform ground distance in [d_min, d_max].
    std::vector<UserDrop> drop_users(const ScenarioConfig &config, RngStream &rng);

    struct ResultRecord
    {
        std::uint64_t seed = 0;
        SystemArchitecture arch = SystemArchitecture::bd;
        int m = 0, n = 0, k = 0, q = 1, tau_up = 0;
        std::vector<double> se; // per user [bit/s/Hz]
        double min_se = 0.0;
        double avg_se = 0.0;
        RVector powers;
        double achieved_sinr = 0.0;
        std::optional<double> opt_cost;
        std::optional<int> opt_iters;
        std::optional<std::string> opt_stop;
        double theta_violation = 0.0;
        long long wall_ms = 0;
    };

    // Everything derived from one topology before Monte Carlo; exposed for tests.
    struct PreparedScenario
    {
        SystemGeometry geometry;
        std::vector<UserDrop> users;
        LinkScenario link;
        int tau_up = 0;
    };

    PreparedScenario prepare_ris_scenario(const ScenarioConfig &config);
    PreparedScenario prepare_baseline_scenario(const ScenarioConfig &config);

    // Dispatches on config.arch; `none` runs the conventional baseline.
    ResultRecord run_scenario(const ScenarioConfig &config);
    ResultRecord run_baseline_mamimo(const ScenarioConfig &config);
}

#endif
