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

#include "bdris/config.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace bdris
{
    std::string to_string(SystemArchitecture arch)
    {
        switch (arch)
        {
        case SystemArchitecture::bd:
            return "bd";
        case SystemArchitecture::d:
            return "d";
        case SystemArchitecture::none:
            return "none";
        }
        return "unknown";
    }

    SystemArchitecture parse_architecture(const std::string &text)
    {
        if (text == "bd")
            return SystemArchitecture::bd;
        if (text == "d")
            return SystemArchitecture::d;
        if (text == "none")
            return SystemArchitecture::none;
        throw ConfigError("arch: expected one of bd, d, none (got '" + text + "')");
    }

    namespace
    {
        std::string format_real(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return buf;
        }

        long long parse_int(const std::string &key, const std::string &s)
        {
            long long v = 0;
            const auto *end = s.data() + s.size();
            auto [ptr, ec] = std::from_chars(s.data(), end, v);
            if (ec != std::errc() || ptr != end)
                throw ConfigError(key + ": expected an integer (got '" + s + "')");
            return v;
        }

        std::uint64_t parse_unsigned(const std::string &key, const std::string &s)
        {
            std::uint64_t v = 0;
            const auto *end = s.data() + s.size();
            auto [ptr, ec] = std::from_chars(s.data(), end, v);
            if (ec != std::errc() || ptr != end)
                throw ConfigError(key + ": expected a non-negative integer (got '" + s + "')");
            return v;
        }

        double parse_real(const std::string &key, const std::string &s)
        {
            char *end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (s.empty() || end != s.c_str() + s.size())
                throw ConfigError(key + ": expected a number (got '" + s + "')");
            return v;
        }

        bool parse_bool(const std::string &key, const std::string &s)
        {
            if (s == "true" || s == "1")
                return true;
            if (s == "false" || s == "0")
                return false;
            throw ConfigError(key + ": expected true or false (got '" + s + "')");
        }

        struct KeyBinding
        {
            ConfigKey key;
            std::function<std::string(const ScenarioConfig &)> get;
            std::function<void(ScenarioConfig &, const std::string &)> set;
        };

        template <typename Member>
        KeyBinding int_key(std::string name, std::string desc, Member member)
        {
            return {{name, KeyType::integer, std::move(desc)},
                    [member](const ScenarioConfig &c) { return std::to_string(std::invoke(member, c)); },
                    [member, name](ScenarioConfig &c, const std::string &s)
                    { std::invoke(member, c) = static_cast<int>(parse_int(name, s)); }};
        }

        template <typename Member>
        KeyBinding real_key(std::string name, std::string desc, Member member)
        {
            return {{name, KeyType::real, std::move(desc)},
                    [member](const ScenarioConfig &c) { return format_real(std::invoke(member, c)); },
                    [member, name](ScenarioConfig &c, const std::string &s) { std::invoke(member, c) = parse_real(name, s); }};
        }

        const std::vector<KeyBinding> &bindings()
        {
            static const std::vector<KeyBinding> table = []
            {
                std::vector<KeyBinding> t;
                t.push_back(real_key("fc_ghz", "carrier frequency [GHz]", &ScenarioConfig::fc_ghz));
                t.push_back(real_key("bandwidth_mhz", "bandwidth [MHz]", &ScenarioConfig::bandwidth_mhz));
                t.push_back(int_key("M_H", "active array horizontal elements", &ScenarioConfig::m_h));
                t.push_back(int_key("M_V", "active array vertical elements", &ScenarioConfig::m_v));
                t.push_back(int_key("N_H", "RIS horizontal elements", &ScenarioConfig::n_h));
                t.push_back(int_key("N_V", "RIS vertical elements", &ScenarioConfig::n_v));
                t.push_back(int_key("K", "number of users", &ScenarioConfig::k));
                t.push_back(int_key("tau", "coherence block length [samples]", &ScenarioConfig::tau));
                t.push_back(int_key("tau_p", "pilot length [samples], 0 means K", &ScenarioConfig::tau_p));
                t.push_back(real_key("rho_ul_mw", "uplink power per user [mW]", &ScenarioConfig::rho_ul_mw));
                t.push_back(real_key("rho_dl_mw", "total downlink power [mW]", &ScenarioConfig::rho_dl_mw));
                t.push_back(real_key("sigma2_ul_dbm", "uplink noise power [dBm]", &ScenarioConfig::sigma2_ul_dbm));
                t.push_back(real_key("sigma2_dl_dbm", "downlink noise power [dBm]", &ScenarioConfig::sigma2_dl_dbm));
                t.push_back(real_key("reflection_efficiency", "RIS reflection efficiency", &ScenarioConfig::reflection_efficiency));
                t.push_back(real_key("gain_a_db", "active element gain [dB]", &ScenarioConfig::gain_a_db));
                t.push_back(real_key("gain_r_db", "RIS element gain [dB]", &ScenarioConfig::gain_r_db));
                t.push_back(real_key("h_ris_m", "RIS height [m]", &ScenarioConfig::h_ris_m));
                t.push_back(real_key("h_user_m", "user height [m]", &ScenarioConfig::h_user_m));
                t.push_back(real_key("sector_half_deg", "half width of the user sector [deg]", &ScenarioConfig::sector_half_deg));
                t.push_back(real_key("d_min_m", "minimum user ground distance [m]", &ScenarioConfig::d_min_m));
                t.push_back(real_key("d_max_m", "maximum user ground distance [m]", &ScenarioConfig::d_max_m));
                t.push_back(real_key("azimuth_spread_deg", "azimuth angular spread [deg]", &ScenarioConfig::azimuth_spread_deg));
                t.push_back(real_key("elevation_spread_deg", "elevation angular spread [deg]", &ScenarioConfig::elevation_spread_deg));
                t.push_back(real_key("separation_wavelengths", "array-RIS plane separation [wavelengths]", &ScenarioConfig::separation_wavelengths));
                t.push_back({{"arch", KeyType::text, "architecture: bd, d or none"},
                             [](const ScenarioConfig &c) { return to_string(c.arch); },
                             [](ScenarioConfig &c, const std::string &s) { c.arch = parse_architecture(s); }});
                t.push_back(int_key("mc", "Monte Carlo realizations per expectation", &ScenarioConfig::mc));
                t.push_back({{"seed", KeyType::unsigned_integer, "topology seed"},
                             [](const ScenarioConfig &c) { return std::to_string(c.seed); },
                             [](ScenarioConfig &c, const std::string &s) { c.seed = parse_unsigned("seed", s); }});
                t.push_back({{"opt_max_iters", KeyType::integer, "optimizer iteration cap"},
                             [](const ScenarioConfig &c) { return std::to_string(c.optimizer.max_iterations); },
                             [](ScenarioConfig &c, const std::string &s)
                             { c.optimizer.max_iterations = static_cast<int>(parse_int("opt_max_iters", s)); }});
                t.push_back({{"opt_rel_tol", KeyType::real, "optimizer tolerance relative to the initial gradient norm"},
                             [](const ScenarioConfig &c) { return format_real(c.optimizer.relative_tolerance); },
                             [](ScenarioConfig &c, const std::string &s) { c.optimizer.relative_tolerance = parse_real("opt_rel_tol", s); }});
                t.push_back({{"armijo_step", KeyType::real, "Armijo initial step (per unit direction norm)"},
                             [](const ScenarioConfig &c) { return format_real(c.optimizer.armijo.initial_step); },
                             [](ScenarioConfig &c, const std::string &s) { c.optimizer.armijo.initial_step = parse_real("armijo_step", s); }});
                t.push_back({{"armijo_contraction", KeyType::real, "Armijo contraction factor"},
                             [](const ScenarioConfig &c) { return format_real(c.optimizer.armijo.contraction); },
                             [](ScenarioConfig &c, const std::string &s) { c.optimizer.armijo.contraction = parse_real("armijo_contraction", s); }});
                t.push_back({{"armijo_c1", KeyType::real, "Armijo sufficient-decrease constant"},
                             [](const ScenarioConfig &c) { return format_real(c.optimizer.armijo.sufficient_decrease); },
                             [](ScenarioConfig &c, const std::string &s) { c.optimizer.armijo.sufficient_decrease = parse_real("armijo_c1", s); }});
                t.push_back({{"safeguard", KeyType::boolean, "re-unitarize BD iterates that drift off the manifold"},
                             [](const ScenarioConfig &c) { return std::string(c.optimizer.safeguard_reunitarize ? "true" : "false"); },
                             [](ScenarioConfig &c, const std::string &s) { c.optimizer.safeguard_reunitarize = parse_bool("safeguard", s); }});
                t.push_back(real_key("bisection_tol", "bisection tolerance on linear SINR", &ScenarioConfig::bisection_tol));
                t.push_back({{"precoder", KeyType::text, "MRT normalization: average or instantaneous"},
                             [](const ScenarioConfig &c)
                             { return std::string(c.precoder == PrecoderNormalization::average ? "average" : "instantaneous"); },
                             [](ScenarioConfig &c, const std::string &s)
                             {
                                 if (s == "average")
                                     c.precoder = PrecoderNormalization::average;
                                 else if (s == "instantaneous")
                                     c.precoder = PrecoderNormalization::instantaneous;
                                 else
                                     throw ConfigError("precoder: expected average or instantaneous (got '" + s + "')");
                             }});
                return t;
            }();
            return table;
        }

        const KeyBinding &find_binding(const std::string &key)
        {
            for (const auto &b : bindings())
                if (b.key.name == key)
                    return b;
            throw ConfigError("unknown config key '" + key + "'");
        }

        void require_positive(const std::string &key, double v)
        {
            if (!(v > 0.0))
                throw ConfigError(key + ": must be positive");
        }
    }

    const std::vector<ConfigKey> &config_keys()
    {
        static const std::vector<ConfigKey> keys = []
        {
            std::vector<ConfigKey> k;
            for (const auto &b : bindings())
                k.push_back(b.key);
            return k;
        }();
        return keys;
    }

    std::string config_value(const ScenarioConfig &config, const std::string &key) { return find_binding(key).get(config); }

    void apply_override(ScenarioConfig &config, const std::string &key, const std::string &value)
    {
        find_binding(key).set(config, value);
    }

    void ScenarioConfig::validate() const
    {
        require_positive("fc_ghz", fc_ghz);
        require_positive("bandwidth_mhz", bandwidth_mhz);
        if (m_v < 1)
            throw ConfigError("M_V: must be at least 1");
        if (m_h < m_v)
            throw ConfigError("M_H: must be at least M_V");
        if (n_v < 1)
            throw ConfigError("N_V: must be at least 1");
        if (n_h < n_v)
            throw ConfigError("N_H: must be at least N_V");
        if (k < 1)
            throw ConfigError("K: must be at least 1");
        if (tau < 1)
            throw ConfigError("tau: must be positive");
        if (tau_p < 0)
            throw ConfigError("tau_p: must be non-negative");
        require_positive("rho_ul_mw", rho_ul_mw);
        require_positive("rho_dl_mw", rho_dl_mw);
        require_positive("reflection_efficiency", reflection_efficiency);
        if (h_ris_m <= h_user_m)
            throw ConfigError("h_ris_m: RIS must be above the users");
        require_positive("sector_half_deg", sector_half_deg);
        if (sector_half_deg > 90.0)
            throw ConfigError("sector_half_deg: must not exceed 90");
        require_positive("d_min_m", d_min_m);
        if (d_max_m < d_min_m)
            throw ConfigError("d_max_m: must be at least d_min_m");
        if (azimuth_spread_deg < 0.0)
            throw ConfigError("azimuth_spread_deg: must be non-negative");
        if (elevation_spread_deg < 0.0)
            throw ConfigError("elevation_spread_deg: must be non-negative");
        require_positive("separation_wavelengths", separation_wavelengths);
        if (mc < 2)
            throw ConfigError("mc: must be at least 2");
        require_positive("bisection_tol", bisection_tol);
        try
        {
            optimizer.validate();
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(std::string("opt_*: ") + e.what());
        }
    }

    ScenarioConfig parse_config_json(const std::string &text)
    {
        nlohmann::json doc;
        try
        {
            doc = text.find_first_not_of(" \t\r\n") == std::string::npos ? nlohmann::json::object()
                                                                          : nlohmann::json::parse(text);
        }
        catch (const nlohmann::json::parse_error &e)
        {
            throw ConfigError(std::string("config: JSON parse error: ") + e.what());
        }
        if (!doc.is_object())
            throw ConfigError("config: top level must be a flat JSON object");

        ScenarioConfig cfg;
        for (const auto &[key, value] : doc.items())
        {
            const KeyBinding &b = find_binding(key);
            std::string textual;
            switch (b.key.type)
            {
            case KeyType::integer:
                if (!value.is_number_integer())
                    throw ConfigError(key + ": expected an integer");
                textual = std::to_string(value.get<long long>());
                break;
            case KeyType::unsigned_integer:
                if (!value.is_number_unsigned())
                    throw ConfigError(key + ": expected a non-negative integer");
                textual = std::to_string(value.get<std::uint64_t>());
                break;
            case KeyType::real:
                if (!value.is_number())
                    throw ConfigError(key + ": expected a number");
                textual = format_real(value.get<double>());
                break;
            case KeyType::boolean:
                if (!value.is_boolean())
                    throw ConfigError(key + ": expected a boolean");
                textual = value.get<bool>() ? "true" : "false";
                break;
            case KeyType::text:
                if (!value.is_string())
                    throw ConfigError(key + ": expected a string");
                textual = value.get<std::string>();
                break;
            }
            b.set(cfg, textual);
        }
        return cfg;
    }

    ScenarioConfig load_config(const std::optional<std::filesystem::path> &path,
                               const std::map<std::string, std::string> &overrides)
    {
        ScenarioConfig cfg;
        if (path)
        {
            std::ifstream in(*path);
            if (!in)
                throw ConfigError("config: cannot open '" + path->string() + "'");
            std::stringstream ss;
            ss << in.rdbuf();
            cfg = parse_config_json(ss.str());
        }
        for (const auto &[key, value] : overrides)
            apply_override(cfg, key, value);
        cfg.validate();
        return cfg;
    }
}
