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

// Command line front end: single scenarios and preset sweeps.

#include "bdris/config.hpp"
#include "bdris/scenario.hpp"
#include "bdris/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

namespace
{
    nlohmann::json to_json(const bdris::ResultRecord &r)
    {
        nlohmann::json j;
        j["seed"] = r.seed;
        j["arch"] = bdris::to_string(r.arch);
        j["M"] = r.m;
        j["N"] = r.n;
        j["K"] = r.k;
        j["Q"] = r.q;
        j["tau_up"] = r.tau_up;
        j["se"] = r.se;
        j["min_se"] = r.min_se;
        j["avg_se"] = r.avg_se;
        j["powers_mw"] = std::vector<double>(r.powers.data(), r.powers.data() + r.powers.size());
        j["achieved_sinr"] = r.achieved_sinr;
        if (r.opt_cost)
        {
            j["opt_cost"] = *r.opt_cost;
            j["opt_iters"] = *r.opt_iters;
            j["opt_stop"] = *r.opt_stop;
            j["theta_violation"] = r.theta_violation;
        }
        j["wall_ms"] = r.wall_ms;
        return j;
    }

    int run(int argc, char **argv)
    {
        CLI::App app{"BS-side RIS massive MIMO simulator"};
        app.require_subcommand(1);

        // simulate: every configuration key is also an option.
        auto *simulate = app.add_subcommand("simulate", "Run one scenario and print the result as JSON");
        std::string config_path;
        std::string sim_out;
        simulate->add_option("--config", config_path, "Flat JSON configuration file");
        simulate->add_option("--out", sim_out, "Append the result row to this CSV file");
        const bdris::ScenarioConfig defaults;
        std::map<std::string, std::string> overrides;
        for (const auto &key : bdris::config_keys())
        {
            auto *opt = simulate->add_option_function<std::string>(
                "--" + key.name, [&overrides, name = key.name](const std::string &v) { overrides[name] = v; },
                key.description);
            opt->default_str(bdris::config_value(defaults, key.name));
        }

        auto *sweep = app.add_subcommand("sweep", "Run a preset sweep and write CSV rows");
        std::string preset;
        std::string sweep_out;
        int topologies = 0;
        std::optional<std::uint64_t> sweep_seed;
        std::optional<int> sweep_mc;
        unsigned workers = 0;
        std::vector<std::string> sets;
        sweep->add_option("--preset", preset, "fig2, fig3a or fig3b")->required();
        sweep->add_option("--out", sweep_out, "CSV output file")->required();
        sweep->add_option("--topologies", topologies, "Number of topology seeds (default 20)");
        sweep->add_option("--seed", sweep_seed, "Seed of the first topology");
        sweep->add_option("--mc", sweep_mc, "Monte Carlo realizations per point");
        sweep->add_option("--workers", workers, "Worker threads, 0 for all cores");
        sweep->add_option("--set", sets, "Extra key=value overrides of the base configuration");

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::ParseError &e)
        {
            const int code = app.exit(e);
            return code == 0 ? 0 : 1;
        }

        try
        {
            if (simulate->parsed())
            {
                std::optional<std::filesystem::path> path;
                if (!config_path.empty())
                    path = config_path;
                const bdris::ScenarioConfig cfg = bdris::load_config(path, overrides);
                const bdris::ResultRecord rec = bdris::run_scenario(cfg);
                if (!sim_out.empty())
                    bdris::write_csv(sim_out, {rec});
                std::cout << to_json(rec).dump(2) << "\n";
            }
            else
            {
                bdris::SweepSpec spec = bdris::sweep_preset(preset);
                if (topologies != 0)
                    spec.topologies = topologies;
                if (sweep_seed)
                    spec.base.seed = *sweep_seed;
                if (sweep_mc)
                    spec.base.mc = *sweep_mc;
                for (const auto &s : sets)
                {
                    const auto eq = s.find('=');
                    if (eq == std::string::npos)
                        throw bdris::ConfigError("set: expected key=value (got '" + s + "')");
                    bdris::apply_override(spec.base, s.substr(0, eq), s.substr(eq + 1));
                }
                const auto records = bdris::run_sweep(spec, workers);
                bdris::write_csv(sweep_out, records);
                std::cerr << "wrote " << records.size() << " rows to " << sweep_out << "\n";
            }
        }
        catch (const bdris::ConfigError &e)
        {
            std::cerr << "configuration error: " << e.what() << "\n";
            return 1;
        }
        catch (const bdris::Error &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        return 0;
    }
}

int main(int argc, char **argv)
{
    return run(argc, argv);
}
