// SPDX-License-Identifier: Apache-2.0
//
// crasim — joint EM- and baseband-domain beamforming simulator for secure
// integrated sensing and communication with reconfigurable antenna arrays
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

#include "crasim/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace crasim
{

namespace
{

std::string fmt(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string join_db(const std::vector<double> &values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        if (i)
            out += ';';
        out += fmt(values[i]);
    }
    return out;
}

double now_ms()
{
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

} // namespace

std::uint64_t realization_seed(const ScenarioConfig &config, int realization_index)
{
    return Rng::derive(config.seed, 0xC0FFEEULL + std::uint64_t(realization_index));
}

ScenarioConfig apply_axis(const ScenarioConfig &config, const std::string &axis, double value)
{
    ScenarioConfig c = config;
    if (axis == "none")
        return c;
    if (axis == "power")
        c.power_budget_w = value;
    else if (axis == "eps_bob")
        c.bob_sinr_floor_db = {value};
    else if (axis == "eps_eve")
        c.eve_sinr_ceiling_db = {value};
    else if (axis == "p_pat")
        c.dictionary.num_patterns = int(std::lround(value));
    else if (axis == "p_pol")
        c.dictionary.num_polarizations = int(std::lround(value));
    else if (axis == "target_angle")
    {
        const double range = c.geometry.target_position ? (*c.geometry.target_position)[1]
                                                        : 0.5 * (c.geometry.target_range_min_m +
                                                                 c.geometry.target_range_max_m);
        c.geometry.target_position = std::array<double, 2>{value, range};
    }
    else
        throw std::runtime_error("apply_axis: unknown axis " + axis);
    c.validate();
    return c;
}

ResultRecord run_single(const ScenarioConfig &config, Scheme scheme, int realization_index, IterationTrace *trace_out)
{
    const double start = now_ms();
    ResultRecord rec;
    rec.config_hash = config_hash(config);
    rec.scheme = scheme;
    rec.realization = realization_index;
    rec.seed = realization_seed(config, realization_index);

    try
    {
        const ChannelSet channels = generate_channels(config, rec.seed);
        const EmDictionary dict = apply_scheme(config, scheme);
        const DesignProblem problem = make_problem(config, channels, dict);

        Rng init_rng(Rng::derive(rec.seed, 1 + std::uint64_t(scheme)));
        const auto [state, trace] = run(problem, config.algorithm, init_rng);
        if (trace_out)
            *trace_out = trace;

        rec.converged = trace.converged;
        rec.iterations = trace.iterations();
        if (!trace.failure.empty())
        {
            rec.status = trace.failure;
        }
        else if (!state.feasible)
        {
            rec.status = "constraint_audit_failed";
        }
        else
        {
            rec.status = "ok";
            const EmBeamformer tx = assemble_em_beamformer(dict, state.sel_tx);
            const EmBeamformer rx = assemble_em_beamformer(dict, state.sel_rx);
            rec.scnr_db = lin_to_db(std::max(radar_scnr(channels, tx, rx, state, problem.noise), 1e-300));
            for (int k = 0; k < problem.num_users(); ++k)
            {
                rec.bob_sinr_db.push_back(
                    lin_to_db(std::max(bob_sinr(k, channels, tx, state, problem.noise), 1e-300)));
                rec.eve_sinr_db.push_back(
                    lin_to_db(std::max(eve_sinr(k, channels, tx, state, problem.noise), 1e-300)));
            }
            rec.power_w = transmit_power(state);
        }
    }
    catch (const std::exception &e)
    {
        rec.status = std::string("error: ") + e.what();
    }
    rec.wall_ms = now_ms() - start;
    return rec;
}

SweepResult run_sweep(const ScenarioConfig &config, const SweepAxis &axis, int n_realizations,
                      const std::vector<Scheme> &schemes, int jobs)
{
    config.validate();
    if (n_realizations < 1)
        throw std::invalid_argument("run_sweep: need at least one realization");
    if (schemes.empty())
        throw std::invalid_argument("run_sweep: need at least one scheme");
    if (axis.values.empty())
        throw std::invalid_argument("run_sweep: need at least one axis value");

    const double start = now_ms();

    struct Task
    {
        std::size_t value_idx;
        std::size_t scheme_idx;
        int realization;
    };
    std::vector<Task> tasks;
    std::vector<ScenarioConfig> configs;
    for (std::size_t v = 0; v < axis.values.size(); ++v)
    {
        configs.push_back(apply_axis(config, axis.name, axis.values[v]));
        for (int r = 0; r < n_realizations; ++r)
            for (std::size_t s = 0; s < schemes.size(); ++s)
                tasks.push_back({v, s, r});
    }

    std::vector<ResultRecord> rows(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true)
        {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            const Task &t = tasks[i];
            ResultRecord rec = run_single(configs[t.value_idx], schemes[t.scheme_idx], t.realization);
            rec.axis = axis.name;
            rec.axis_value = axis.values[t.value_idx];
            rows[i] = std::move(rec);
        }
    };
    if (jobs <= 1)
    {
        worker();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back(worker);
        for (auto &th : pool)
            th.join();
    }

    SweepResult result;
    result.rows = std::move(rows);
    result.wall_ms_total = now_ms() - start;
    return result;
}

std::string SweepResult::to_csv() const
{
    std::ostringstream os;
    os << "row_type,axis,axis_value,scheme,realization,seed,config_hash,status,converged,iterations,"
          "scnr_db,bob_sinr_db,eve_sinr_db,power_w,binariness\n";
    for (const auto &r : rows)
    {
        os << "realization," << r.axis << ',' << fmt(r.axis_value) << ',' << to_string(r.scheme) << ','
           << r.realization << ',' << r.seed << ',' << r.config_hash << ',' << '"' << r.status << '"' << ','
           << (r.converged ? 1 : 0) << ',' << r.iterations << ',' << fmt(r.scnr_db) << ',' << join_db(r.bob_sinr_db)
           << ',' << join_db(r.eve_sinr_db) << ',' << fmt(r.power_w) << ',' << fmt(r.binariness) << '\n';
    }

    // aggregate rows: mean dB over successful realizations per (value, scheme)
    struct Key
    {
        double value;
        Scheme scheme;
        bool operator<(const Key &o) const
        {
            if (value != o.value)
                return value < o.value;
            return int(scheme) < int(o.scheme);
        }
    };
    std::map<Key, std::pair<int, double>> agg; // count, sum scnr_db
    for (const auto &r : rows)
        if (r.status == "ok")
        {
            auto &slot = agg[{r.axis_value, r.scheme}];
            slot.first += 1;
            slot.second += r.scnr_db;
        }
    for (const auto &[key, slot] : agg)
    {
        os << "mean," << (rows.empty() ? "none" : rows.front().axis) << ',' << fmt(key.value) << ','
           << to_string(key.scheme) << ",-1,0," << (rows.empty() ? "" : rows.front().config_hash) << ','
           << "\"agg_over_" << slot.first << "\",0,0," << fmt(slot.second / std::max(1, slot.first)) << ",,,0,0\n";
    }
    return os.str();
}

RocResult run_roc(const ScenarioConfig &config, const std::vector<Scheme> &schemes,
                  const std::vector<double> &pfa_grid, int n_trials)
{
    config.validate();
    const double start = now_ms();
    RocResult result;

    const std::uint64_t seed = realization_seed(config, 0);
    const ChannelSet channels = generate_channels(config, seed);
    DetectionModel model;
    model.target = target_scattering_model(config);
    model.clutter = clutter_scattering_model(config);
    model.block_len = config.detector.block_len;

    for (const Scheme scheme : schemes)
    {
        const EmDictionary dict = apply_scheme(config, scheme);
        const DesignProblem problem = make_problem(config, channels, dict);
        Rng init_rng(Rng::derive(seed, 1 + std::uint64_t(scheme)));
        const auto [state, trace] = run(problem, config.algorithm, init_rng);

        ResultRecord rec;
        rec.config_hash = config_hash(config);
        rec.scheme = scheme;
        rec.seed = seed;
        rec.converged = trace.converged;
        rec.iterations = trace.iterations();
        rec.status = trace.failure.empty() ? (state.feasible ? "ok" : "constraint_audit_failed") : trace.failure;
        result.optimizer_rows.push_back(rec);
        if (rec.status != "ok")
            continue;

        Rng det_rng(Rng::derive(seed, 0xDE7EC7ULL + std::uint64_t(scheme)));
        const std::vector<RocPoint> roc = roc_curve(problem, state, model, n_trials, pfa_grid, det_rng);
        for (const auto &pt : roc)
            result.rows.push_back({scheme, pt.pfa, pt.pd, pt.threshold, n_trials});
    }
    result.wall_ms_total = now_ms() - start;
    return result;
}

std::string RocResult::to_csv() const
{
    std::ostringstream os;
    os << "scheme,pfa,pd,threshold,n_trials\n";
    for (const auto &r : rows)
        os << to_string(r.scheme) << ',' << fmt(r.pfa) << ',' << fmt(r.pd) << ',' << fmt(r.threshold) << ','
           << r.n_trials << '\n';
    return os.str();
}

std::string run_metadata_json(const ScenarioConfig &config, double wall_ms, int rows)
{
    nlohmann::json j;
    j["config"] = nlohmann::json::parse(save_config(config));
    j["config_hash"] = config_hash(config);
    j["wall_ms"] = wall_ms;
    j["rows"] = rows;
    return j.dump(2);
}

} // namespace crasim
