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

#ifndef BDRIS_SWEEP_HPP
#define BDRIS_SWEEP_HPP

#include "bdris/config.hpp"
#include "bdris/scenario.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bdris
{
    enum class SweepAxis
    {
        n,
        m,
        k
    };

    std::string to_string(SweepAxis axis);
    SweepAxis parse_axis(const std::string &text);

    struct SweepSpec
    {
        ScenarioConfig base;
        SweepAxis axis = SweepAxis::n;
        std::vector<int> values;
        std::vector<SystemArchitecture> architectures;
        int topologies = 20;      // topology seeds base.seed, base.seed + 1, ...
        bool equal_horizontal = false; // enforce N_H = M_H >= K for every point
    };

    // fig2: M = 24 (6x4), K = 4, N in {32, 64, 128}, bd vs d.
    // fig3a: K = 8, M = 24 (12x2), N in {48, 72, 96} with N_H = M_H, bd vs none.
    // fig3b: M = 32 (16x2), N = 128 (16x8), K in {4, 8, 12, 16}, bd vs none.
    SweepSpec sweep_preset(const std::string &name);

    // Configuration of one sweep point. Along N (or M) the horizontal count follows the other
    // array when equal_horizontal is set, otherwise the vertical count stays fixed.
    ScenarioConfig sweep_point(const SweepSpec &spec, int value, SystemArchitecture arch, int topology);

    // Checks every point before running anything; throws ConfigError on violation.
    void validate_sweep(const SweepSpec &spec);

    // Records ordered by (value, topology, architecture). Points run on a worker pool.
    std::vector<ResultRecord> run_sweep(const SweepSpec &spec, unsigned workers = 0);

    // CSV: seed, arch, M, N, K, Q, tau_up, min_se, avg_se, se_user_1..K, opt_cost, opt_iters, wall_ms.
    std::string csv_header(int max_users);
    std::string csv_row(const ResultRecord &record, int max_users);

    // Writes header and rows through a temporary file renamed into place. An existing file with
    // the same header is extended instead of replaced.
    void write_csv(const std::filesystem::path &path, const std::vector<ResultRecord> &records);
}

#endif
