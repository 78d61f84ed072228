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

#include "bdris/sweep.hpp"
#include "bdris/pilot_estimation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace bdris
{
    std::string to_string(SweepAxis axis)
    {
        switch (axis)
        {
        case SweepAxis::n:
            return "N";
        case SweepAxis::m:
            return "M";
        case SweepAxis::k:
            return "K";
        }
        return "?";
    }

    SweepAxis parse_axis(const std::string &text)
    {
        if (text == "N" || text == "n")
            return SweepAxis::n;
        if (text == "M" || text == "m")
            return SweepAxis::m;
        if (text == "K" || text == "k")
            return SweepAxis::k;
        throw ConfigError("axis: expected N, M or K (got '" + text + "')");
    }

    SweepSpec sweep_preset(const std::string &name)
    {
        SweepSpec s;
        if (name == "fig2")
        {
            s.base.m_h = 6;
            s.base.m_v = 4;
            s.base.n_v = 4;
            s.base.k = 4;
            s.axis = SweepAxis::n;
            s.values = {32, 64, 128};
            s.architectures = {SystemArchitecture::bd, SystemArchitecture::d};
        }
        else if (name == "fig3a")
        {
            s.base.m_h = 12;
            s.base.m_v = 2;
            s.base.k = 8;
            s.axis = SweepAxis::n;
            s.values = {48, 72, 96};
            s.architectures = {SystemArchitecture::bd, SystemArchitecture::none};
            s.equal_horizontal = true;
        }
        else if (name == "fig3b")
        {
            s.base.m_h = 16;
            s.base.m_v = 2;
            s.base.n_h = 16;
            s.base.n_v = 8;
            s.axis = SweepAxis::k;
            s.values = {4, 8, 12, 16};
            s.architectures = {SystemArchitecture::bd, SystemArchitecture::none};
            s.equal_horizontal = true;
        }
        else
            throw ConfigError("preset: expected fig2, fig3a or fig3b (got '" + name + "')");
        return s;
    }

    namespace
    {
        int exact_quotient(int total, int divisor, const std::string &what)
        {
            if (divisor < 1 || total % divisor != 0)
                throw ConfigError(what + ": " + std::to_string(total) + " is not divisible by " + std::to_string(divisor));
            return total / divisor;
        }
    }

    ScenarioConfig sweep_point(const SweepSpec &spec, int value, SystemArchitecture arch, int topology)
    {
        ScenarioConfig c = spec.base;
        c.arch = arch;
        c.seed = spec.base.seed + static_cast<std::uint64_t>(topology);
        switch (spec.axis)
        {
        case SweepAxis::n:
            if (spec.equal_horizontal)
            {
                c.n_h = c.m_h;
                c.n_v = exact_quotient(value, c.n_h, "N");
            }
            else
                c.n_h = exact_quotient(value, c.n_v, "N");
            break;
        case SweepAxis::m:
            if (spec.equal_horizontal)
            {
                c.m_h = c.n_h;
                c.m_v = exact_quotient(value, c.m_h, "M");
            }
            else
                c.m_h = exact_quotient(value, c.m_v, "M");
            break;
        case SweepAxis::k:
            c.k = value;
            break;
        }
        return c;
    }

    void validate_sweep(const SweepSpec &spec)
    {
        if (spec.values.empty())
            throw ConfigError("sweep: no axis values");
        if (spec.architectures.empty())
            throw ConfigError("sweep: no architectures");
        if (spec.topologies < 1)
            throw ConfigError("topologies: must be at least 1");
        for (int v : spec.values)
            for (auto arch : spec.architectures)
            {
                const ScenarioConfig c = sweep_point(spec, v, arch, 0);
                c.validate();
                if (spec.equal_horizontal && (c.n_h != c.m_h || c.m_h < c.k))
                    throw ConfigError("sweep: N_H = M_H >= K is violated at " + to_string(spec.axis) + " = " +
                                      std::to_string(v));
                const int tau_up = arch == SystemArchitecture::none
                                       ? c.pilot_length()
                                       : training_epochs(c.n(), c.m()) * c.pilot_length();
                if (tau_up >= c.tau)
                    throw ConfigError("tau: tau_up = " + std::to_string(tau_up) + " exceeds the coherence block at " +
                                      to_string(spec.axis) + " = " + std::to_string(v));
            }
    }

    std::vector<ResultRecord> run_sweep(const SweepSpec &spec, unsigned workers)
    {
        validate_sweep(spec);

        std::vector<ScenarioConfig> jobs;
        for (int v : spec.values)
            for (int t = 0; t < spec.topologies; ++t)
                for (auto arch : spec.architectures)
                    jobs.push_back(sweep_point(spec, v, arch, t));

        if (workers == 0)
            workers = std::max(1u, std::thread::hardware_concurrency());
        workers = std::min<unsigned>(workers, static_cast<unsigned>(jobs.size()));

        std::vector<ResultRecord> results(jobs.size());
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto work = [&]
        {
            for (std::size_t i = next++; i < jobs.size(); i = next++)
            {
                try
                {
                    results[i] = run_scenario(jobs[i]);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = jobs.size();
                }
            }
        };
        if (workers <= 1)
            work();
        else
        {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < workers; ++w)
                pool.emplace_back(work);
            for (auto &t : pool)
                t.join();
        }
        if (failure)
            std::rethrow_exception(failure);
        return results;
    }

    namespace
    {
        std::string fmt9(double v)
        {
            char buf[48];
            std::snprintf(buf, sizeof buf, "%.9g", v);
            return buf;
        }
    }

    std::string csv_header(int max_users)
    {
        std::string h = "seed,arch,M,N,K,Q,tau_up,min_se,avg_se";
        for (int k = 1; k <= max_users; ++k)
            h += ",se_user_" + std::to_string(k);
        h += ",opt_cost,opt_iters,wall_ms";
        return h;
    }

    std::string csv_row(const ResultRecord &r, int max_users)
    {
        std::ostringstream os;
        os << r.seed << ',' << to_string(r.arch) << ',' << r.m << ',' << r.n << ',' << r.k << ',' << r.q << ','
           << r.tau_up << ',' << fmt9(r.min_se) << ',' << fmt9(r.avg_se);
        for (int k = 0; k < max_users; ++k)
        {
            os << ',';
            if (k < static_cast<int>(r.se.size()))
                os << fmt9(r.se[static_cast<std::size_t>(k)]);
        }
        os << ',';
        if (r.opt_cost)
            os << fmt9(*r.opt_cost);
        os << ',';
        if (r.opt_iters)
            os << *r.opt_iters;
        os << ',' << r.wall_ms;
        return os.str();
    }

    void write_csv(const std::filesystem::path &path, const std::vector<ResultRecord> &records)
    {
        int max_users = 0;
        for (const auto &r : records)
            max_users = std::max(max_users, r.k);
        const std::string header = csv_header(max_users);

        std::string existing;
        if (std::filesystem::exists(path))
        {
            std::ifstream in(path);
            std::stringstream ss;
            ss << in.rdbuf();
            existing = ss.str();
            const std::string first_line = existing.substr(0, existing.find('\n'));
            if (first_line != header)
                existing.clear(); // different schema: replace the file
            else if (!existing.empty() && existing.back() != '\n')
                existing += '\n';
        }

        std::string content = existing.empty() ? header + "\n" : existing;
        for (const auto &r : records)
            content += csv_row(r, max_users) + "\n";

        std::filesystem::path tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out)
                throw ConfigError("out: cannot write '" + tmp.string() + "'");
            out << content;
            if (!out)
                throw ConfigError("out: write failed for '" + tmp.string() + "'");
        }
        std::filesystem::rename(tmp, path);
    }
}
