// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "crasim/harness.hpp"
#include "crasim/oracle.hpp"

using namespace crasim;

namespace
{

ScenarioConfig resolve_config(const std::string &path, const std::string &preset, std::uint64_t seed_override,
                              bool has_seed, const std::string &scheme_override)
{
    ScenarioConfig cfg;
    if (!path.empty())
        cfg = load_config(path);
    else if (preset == "tiny")
        cfg = tiny_scenario();
    else if (preset == "roc")
        cfg = roc_scenario();
    else
        cfg = default_scenario();
    if (has_seed)
        cfg.seed = seed_override;
    if (!scheme_override.empty())
        cfg.scheme = scheme_from_string(scheme_override);
    cfg.validate();
    return cfg;
}

std::vector<Scheme> parse_schemes(const std::vector<std::string> &names, Scheme fallback)
{
    if (names.empty())
        return {fallback};
    std::vector<Scheme> out;
    for (const auto &n : names)
        out.push_back(scheme_from_string(n));
    return out;
}

void write_file(const std::filesystem::path &path, const std::string &content)
{
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << content;
}

int cmd_run(const ScenarioConfig &cfg, const std::string &out_dir)
{
    IterationTrace trace;
    const ResultRecord rec = run_single(cfg, cfg.scheme, 0, &trace);

    std::cout << "scheme:      " << to_string(rec.scheme) << "\n"
              << "status:      " << rec.status << "\n"
              << "iterations:  " << rec.iterations << (rec.converged ? " (converged)" : "") << "\n";
    if (rec.status == "ok")
    {
        std::cout << "scnr_db:     " << rec.scnr_db << "\n"
                  << "power_w:     " << rec.power_w << "\n";
        for (std::size_t k = 0; k < rec.bob_sinr_db.size(); ++k)
            std::cout << "user " << k << ":      sinr_db=" << rec.bob_sinr_db[k]
                      << " eve_sinr_db=" << rec.eve_sinr_db[k] << "\n";
    }
    write_file(std::filesystem::path(out_dir) / "trace.csv", trace.to_csv());
    write_file(std::filesystem::path(out_dir) / "meta.json", run_metadata_json(cfg, rec.wall_ms, trace.iterations()));
    std::cout << "trace:       " << (std::filesystem::path(out_dir) / "trace.csv").string() << "\n";
    return rec.status == "ok" ? 0 : 1;
}

int cmd_sweep(const ScenarioConfig &cfg, const std::string &axis_name, std::vector<double> values, int realizations,
              const std::vector<std::string> &scheme_names, int jobs, const std::string &out_dir)
{
    SweepAxis axis;
    axis.name = axis_name;
    if (!values.empty())
        axis.values = std::move(values);
    const std::vector<Scheme> schemes = parse_schemes(scheme_names, cfg.scheme);

    const SweepResult result = run_sweep(cfg, axis, realizations, schemes, jobs);
    write_file(std::filesystem::path(out_dir) / "sweep.csv", result.to_csv());
    write_file(std::filesystem::path(out_dir) / "meta.json",
               run_metadata_json(cfg, result.wall_ms_total, int(result.rows.size())));

    int failures = 0;
    for (const auto &r : result.rows)
        failures += (r.status != "ok");
    std::cout << "rows:     " << result.rows.size() << " (" << failures << " failed)\n"
              << "output:   " << (std::filesystem::path(out_dir) / "sweep.csv").string() << "\n";
    return 0;
}

int cmd_roc(const ScenarioConfig &cfg, std::vector<double> pfa, int trials,
            const std::vector<std::string> &scheme_names, const std::string &out_dir)
{
    if (pfa.empty())
        pfa = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1, 3e-1};
    const std::vector<Scheme> schemes = parse_schemes(scheme_names, cfg.scheme);
    const RocResult result = run_roc(cfg, schemes, pfa, trials);
    write_file(std::filesystem::path(out_dir) / "roc.csv", result.to_csv());
    write_file(std::filesystem::path(out_dir) / "meta.json",
               run_metadata_json(cfg, result.wall_ms_total, int(result.rows.size())));
    for (const auto &r : result.optimizer_rows)
        std::cout << to_string(r.scheme) << ": " << r.status << "\n";
    std::cout << "output:   " << (std::filesystem::path(out_dir) / "roc.csv").string() << "\n";
    return 0;
}

int cmd_validate(int seeds)
{
    int failures = 0;
    auto report = [&failures](const std::string &name, bool ok) {
        std::cout << (ok ? "PASS " : "FAIL ") << name << "\n";
        failures += !ok;
    };

    // factored metrics against the dense recomputation
    {
        ScenarioConfig cfg = tiny_scenario();
        bool ok = true;
        for (int s = 0; s < seeds && ok; ++s)
        {
            const std::uint64_t seed = realization_seed(cfg, s);
            const ChannelSet channels = generate_channels(cfg, seed);
            const EmDictionary dict = apply_scheme(cfg, Scheme::cra);
            const DesignProblem problem = make_problem(cfg, channels, dict);
            Rng rng(Rng::derive(seed, 7));
            AlgorithmConfig acfg = cfg.algorithm;
            const BeamformerState state = initialize(problem, acfg, rng);
            if (!state.feasible)
                continue;
            const DenseMetrics dense = dense_recompute(problem, state);
            const EmBeamformer tx = assemble_em_beamformer(dict, state.sel_tx);
            const EmBeamformer rx = assemble_em_beamformer(dict, state.sel_rx);
            const double fast = radar_scnr(channels, tx, rx, state, problem.noise);
            ok = ok && std::abs(fast - dense.scnr) <= 1e-10 * std::max(1e-300, dense.scnr);
            for (int k = 0; k < problem.num_users(); ++k)
            {
                const double fb = bob_sinr(k, channels, tx, state, problem.noise);
                ok = ok && std::abs(fb - dense.bob_sinr[std::size_t(k)]) <=
                               1e-10 * std::max(1e-300, dense.bob_sinr[std::size_t(k)]);
            }
        }
        report("factored metrics match dense recomputation", ok);
    }

    // optimizer against the exhaustive mode search
    {
        ScenarioConfig cfg = tiny_scenario();
        bool ok = true;
        for (int s = 0; s < std::min(seeds, 3); ++s)
        {
            const std::uint64_t seed = realization_seed(cfg, s);
            const ChannelSet channels = generate_channels(cfg, seed);
            const EmDictionary dict = apply_scheme(cfg, Scheme::cra);
            const DesignProblem problem = make_problem(cfg, channels, dict);
            Rng rng(Rng::derive(seed, 1));
            const auto [state, trace] = run(problem, cfg.algorithm, rng);
            if (!state.feasible)
                continue;
            const ExhaustiveResult ex = exhaustive_em_search(problem, cfg.algorithm, 1e-6, 200, &state);
            const EmBeamformer tx = assemble_em_beamformer(dict, state.sel_tx);
            const EmBeamformer rx = assemble_em_beamformer(dict, state.sel_rx);
            const double got = radar_scnr(channels, tx, rx, state, problem.noise);
            ok = ok && ex.any_feasible && got <= ex.best_scnr * (1.0 + 1e-6);
        }
        report("optimizer does not beat the exhaustive mode search", ok);
    }

    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"crasim: joint EM/baseband beamforming simulator for secure sensing-and-communication"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path, preset = "default", out_dir = ".", scheme_override;
    std::uint64_t seed = 0;
    bool has_seed = false;
    app.add_option("--config", config_path, "scenario JSON file");
    app.add_option("--preset", preset, "built-in scenario: default|tiny|roc")
        ->check(CLI::IsMember({"default", "tiny", "roc"}));
    app.add_option("--seed", seed, "override the scenario seed")->each([&](const std::string &) { has_seed = true; });
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--scheme", scheme_override, "override the configured scheme");

    auto *run_cmd = app.add_subcommand("run", "optimize one realization and write its trace");

    auto *sweep_cmd = app.add_subcommand("sweep", "sweep an axis over seeded realizations");
    std::string axis = "none";
    std::vector<double> values;
    std::vector<std::string> schemes;
    int realizations = 20, jobs = 1;
    sweep_cmd->add_option("--axis", axis, "none|power|eps_bob|eps_eve|p_pat|p_pol|target_angle")
        ->check(CLI::IsMember({"none", "power", "eps_bob", "eps_eve", "p_pat", "p_pol", "target_angle"}));
    sweep_cmd->add_option("--values", values, "axis values")->delimiter(',');
    sweep_cmd->add_option("--realizations", realizations, "realizations per point");
    sweep_cmd->add_option("--schemes", schemes, "comma-separated scheme tags")->delimiter(',');
    sweep_cmd->add_option("--jobs", jobs, "worker threads");

    auto *roc_cmd = app.add_subcommand("roc", "detection ROC for optimized schemes");
    std::vector<double> pfa;
    int trials = 100000;
    std::vector<std::string> roc_schemes;
    roc_cmd->add_option("--pfa", pfa, "false-alarm grid")->delimiter(',');
    roc_cmd->add_option("--trials", trials, "Monte Carlo trials per hypothesis");
    roc_cmd->add_option("--schemes", roc_schemes, "comma-separated scheme tags")->delimiter(',');

    auto *validate_cmd = app.add_subcommand("validate", "run the desk-scale oracle checks");
    int validate_seeds = 10;
    validate_cmd->add_option("--seeds", validate_seeds, "tiny instances to check");

    auto *print_cmd = app.add_subcommand("print-config", "write the resolved config to stdout");

    CLI11_PARSE(app, argc, argv);

    try
    {
        const ScenarioConfig cfg = resolve_config(config_path, preset, seed, has_seed, scheme_override);
        if (run_cmd->parsed())
            return cmd_run(cfg, out_dir);
        if (sweep_cmd->parsed())
            return cmd_sweep(cfg, axis, values, realizations, schemes, jobs, out_dir);
        if (roc_cmd->parsed())
            return cmd_roc(cfg, pfa, trials, roc_schemes, out_dir);
        if (validate_cmd->parsed())
            return cmd_validate(validate_seeds);
        if (print_cmd->parsed())
        {
            std::cout << save_config(cfg) << "\n";
            return 0;
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
