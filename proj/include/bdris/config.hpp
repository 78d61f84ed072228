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

#ifndef BDRIS_CONFIG_HPP
#define BDRIS_CONFIG_HPP

#include "bdris/power_control.hpp"
#include "bdris/ris_optimizer.hpp"
#include "bdris/types.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace bdris
{
    enum class SystemArchitecture
    {
        bd,  // fully-connected beyond-diagonal RIS
        d,   // diagonal RIS
        none // conventional massive MIMO, no RIS
    };

    std::string to_string(SystemArchitecture arch);
    SystemArchitecture parse_architecture(const std::string &text);

    // One scenario. Defaults follow the reference simulation table; see config_keys().
    struct ScenarioConfig
    {
        double fc_ghz = 2.5;
        double bandwidth_mhz = 20.0;
        int m_h = 6, m_v = 4;
        int n_h = 8, n_v = 4;
        int k = 4;
        int tau = 200;
        int tau_p = 0; // 0: tau_p = K
        double rho_ul_mw = 400.0;
        double rho_dl_mw = 1200.0;
        double sigma2_ul_dbm = -94.0;
        double sigma2_dl_dbm = -94.0;
        double reflection_efficiency = 1.0;
        double gain_a_db = 3.0;
        double gain_r_db = 3.0;
        double h_ris_m = 10.0;
        double h_user_m = 1.5;
        double sector_half_deg = 60.0;
        double d_min_m = 10.0;
        double d_max_m = 400.0;
        double azimuth_spread_deg = 10.0;
        double elevation_spread_deg = 5.0;
        double separation_wavelengths = 5.0;
        SystemArchitecture arch = SystemArchitecture::bd;
        int mc = 500;
        std::uint64_t seed = 1;
        OptimizerSettings optimizer;
        double bisection_tol = 1e-4;
        PrecoderNormalization precoder = PrecoderNormalization::average;

        int m() const { return m_h * m_v; }
        int n() const { return n_h * n_v; }
        int pilot_length() const { return tau_p > 0 ? tau_p : k; }
        double wavelength() const { return speed_of_light / (fc_ghz * 1e9); }
        double uplink_noise_mw() const { return dbm_to_mw(sigma2_ul_dbm); }
        double downlink_noise_mw() const { return dbm_to_mw(sigma2_dl_dbm); }

        // Throws ConfigError naming the offending key.
        void validate() const;
    };

    enum class KeyType
    {
        integer,
        unsigned_integer,
        real,
        boolean,
        text
    };

    struct ConfigKey
    {
        std::string name;
        KeyType type;
        std::string description;
    };

    const std::vector<ConfigKey> &config_keys();

    // Current value of a key as text, as it would be written in an override.
    std::string config_value(const ScenarioConfig &config, const std::string &key);

    // Sets one key from its textual form; throws ConfigError on unknown key or bad value.
    void apply_override(ScenarioConfig &config, const std::string &key, const std::string &value);

    // Parses a flat JSON object; keys not present keep their defaults.
    ScenarioConfig parse_config_json(const std::string &text);

    // Loads `path` (when given), then applies overrides, then validates.
    ScenarioConfig load_config(const std::optional<std::filesystem::path> &path,
                               const std::map<std::string, std::string> &overrides = {});
}

#endif
