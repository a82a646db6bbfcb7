// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance suite. Each test case prints one PASS/FAIL line; the
// heavy scheme-comparison runs are shared across cases.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <functional>
#include <cstdio>
#include <optional>
#include <thread>

#include "crasim/harness.hpp"
#include "crasim/oracle.hpp"

using namespace crasim;

namespace
{

constexpr int kRealizations = 20;

int worker_count()
{
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : int(hc);
}

void parallel_for(int n, const std::function<void(int)> &fn)
{
    std::atomic<int> next{0};
    auto work = [&]() {
        while (true)
        {
            const int i = next.fetch_add(1);
            if (i >= n)
                return;
            fn(i);
        }
    };
    const int jobs = std::min(worker_count(), n);
    if (jobs <= 1)
    {
        work();
        return;
    }
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back(work);
    for (auto &t : pool)
        t.join();
}

struct CraRun
{
    BeamformerState state;
    IterationTrace trace;
    ResultRecord record;
    bool ok = false;
};

// One full realization of the reference scenario for the cra scheme,
// replicated from the harness path so seeds line up with run_sweep.
CraRun run_cra_realization(const ScenarioConfig &cfg, int realization)
{
    const std::uint64_t seed = realization_seed(cfg, realization);
    const ChannelSet channels = generate_channels(cfg, seed);
    const EmDictionary dict = apply_scheme(cfg, Scheme::cra);
    const DesignProblem problem = make_problem(cfg, channels, dict);
    Rng rng(Rng::derive(seed, 1 + std::uint64_t(Scheme::cra)));
    auto [state, trace] = run(problem, cfg.algorithm, rng);

    CraRun out{std::move(state), std::move(trace), {}, false};
    out.record.scheme = Scheme::cra;
    out.record.realization = realization;
    out.record.seed = seed;
    out.record.converged = out.trace.converged;
    out.record.iterations = out.trace.iterations();
    out.ok = out.trace.failure.empty() && out.state.feasible;
    out.record.status = out.ok ? "ok" : (out.trace.failure.empty() ? "constraint_audit_failed" : out.trace.failure);
    if (out.ok)
    {
        const EmBeamformer tx = assemble_em_beamformer(dict, out.state.sel_tx);
        const EmBeamformer rx = assemble_em_beamformer(dict, out.state.sel_rx);
        out.record.scnr_db = lin_to_db(radar_scnr(channels, tx, rx, out.state, problem.noise));
        for (int k = 0; k < problem.num_users(); ++k)
        {
            out.record.bob_sinr_db.push_back(lin_to_db(bob_sinr(k, channels, tx, out.state, problem.noise)));
            out.record.eve_sinr_db.push_back(lin_to_db(eve_sinr(k, channels, tx, out.state, problem.noise)));
        }
        out.record.power_w = transmit_power(out.state);
    }
    return out;
}

struct SharedRuns
{
    ScenarioConfig cfg;
    std::vector<CraRun> cra;            // 20 reference-scenario cra realizations
    std::vector<ResultRecord> baseline; // pattern/pol/bb rows at the reference scenario

    double mean_scnr_db(Scheme scheme) const
    {
        double sum = 0.0;
        int n = 0;
        if (scheme == Scheme::cra)
        {
            for (const auto &r : cra)
                if (r.ok)
                {
                    sum += r.record.scnr_db;
                    ++n;
                }
        }
        else
        {
            for (const auto &r : baseline)
                if (r.scheme == scheme && r.status == "ok")
                {
                    sum += r.scnr_db;
                    ++n;
                }
        }
        return n ? sum / n : std::nan("");
    }

    static const SharedRuns &instance()
    {
        static SharedRuns s = [] {
            SharedRuns built;
            built.cfg = default_scenario();
            std::vector<std::optional<CraRun>> slots(kRealizations);
            parallel_for(kRealizations, [&](int i) { slots[std::size_t(i)] = run_cra_realization(built.cfg, i); });
            for (auto &slot : slots)
                built.cra.push_back(std::move(*slot));
            const SweepResult others =
                run_sweep(built.cfg, {"none", {0.0}}, kRealizations,
                          {Scheme::polarization_only, Scheme::pattern_only, Scheme::bb_only}, worker_count());
            built.baseline = others.rows;
            return built;
        }();
        return s;
    }
};

void report(int criterion, bool pass, const std::string &detail)
{
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
}

std::string fmt1(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Constraint audit of one result row against its thresholds, with 0.05 dB
// of reporting slack in the dB domain.
bool row_meets_constraints(const ResultRecord &r, double floor_db, double ceiling_db, double budget_w)
{
    if (r.status != "ok")
        return true; // only accepted runs are audited
    for (double v : r.bob_sinr_db)
        if (v < floor_db - 0.05)
            return false;
    for (double v : r.eve_sinr_db)
        if (v > ceiling_db + 0.05)
            return false;
    return r.power_w <= budget_w * (1.0 + 1e-9);
}

} // namespace

TEST_CASE("criterion 1: scheme ordering at the reference power budget")
{
    const SharedRuns &s = SharedRuns::instance();
    const double cra = s.mean_scnr_db(Scheme::cra);
    const double pol = s.mean_scnr_db(Scheme::polarization_only);
    const double pat = s.mean_scnr_db(Scheme::pattern_only);
    const double bb = s.mean_scnr_db(Scheme::bb_only);

    const bool ordering = cra > pol && pol > pat && pat > bb;
    const bool gaps = (cra - pol >= 1.0) && (cra - pat >= 4.0) && (cra - bb >= 6.0);
    report(1, ordering && gaps,
           "mean SCNR dB: cra=" + fmt1(cra) + " pol=" + fmt1(pol) + " pattern=" + fmt1(pat) + " bb=" + fmt1(bb) +
               " | gaps cra-pol=" + fmt1(cra - pol) + " cra-pat=" + fmt1(cra - pat) + " cra-bb=" + fmt1(cra - bb));
    CHECK(ordering);
    CHECK(cra - pol >= 1.0);
    CHECK(cra - pat >= 4.0);
    CHECK(cra - bb >= 6.0);
}

TEST_CASE("criterion 2: rapid and consistent convergence")
{
    const SharedRuns &s = SharedRuns::instance();
    int converged_in_30 = 0;
    bool monotone = true;
    for (const auto &r : s.cra)
    {
        // first outer iteration whose consecutive relative SCNR change
        // drops below the tolerance
        int first_below = -1;
        for (std::size_t i = 1; i < r.trace.records.size(); ++i)
        {
            const double prev = r.trace.records[i - 1].scnr_linear;
            const double cur = r.trace.records[i].scnr_linear;
            if (std::abs(cur - prev) / std::max(prev, 1e-300) < s.cfg.algorithm.scnr_rel_tol)
            {
                first_below = int(i);
                break;
            }
        }
        if (r.trace.converged && first_below >= 0 && first_below <= 30)
            ++converged_in_30;
        for (std::size_t i = 1; i < r.trace.records.size(); ++i)
            monotone = monotone && (r.trace.records[i].scnr_db >= r.trace.records[i - 1].scnr_db - 0.1);
    }
    const double rate = double(converged_in_30) / kRealizations;
    report(2, rate >= 0.9 && monotone,
           fmt1(100.0 * rate) + "% of seeds converged within 30 iterations; trace monotone within 0.1 dB: " +
               (monotone ? "yes" : "no"));
    CHECK(rate >= 0.9);
    CHECK(monotone);
}

TEST_CASE("criterion 3: constraints hold on every accepted run")
{
    const SharedRuns &s = SharedRuns::instance();
    int audited = 0;
    bool all_ok = true;
    bool one_hot = true;
    for (const auto &r : s.cra)
    {
        if (!r.ok)
            continue;
        ++audited;
        all_ok = all_ok && row_meets_constraints(r.record, 5.0, -20.0, s.cfg.power_budget_w);
        one_hot = one_hot && r.state.sel_tx.mode() == SelectionMatrix::Mode::binary &&
                  r.state.sel_rx.mode() == SelectionMatrix::Mode::binary;
    }
    for (const auto &r : s.baseline)
        if (r.status == "ok")
        {
            ++audited;
            all_ok = all_ok && row_meets_constraints(r, 5.0, -20.0, s.cfg.power_budget_w);
        }
    report(3, all_ok && one_hot && audited > 0,
           std::to_string(audited) + " accepted runs audited; SINR floors/ceilings, power and one-hot selections: " +
               ((all_ok && one_hot) ? "all satisfied" : "violated"));
    CHECK(all_ok);
    CHECK(one_hot);
    CHECK(audited > 0);
}

TEST_CASE("criterion 4: trade-off directions")
{
    const SharedRuns &s = SharedRuns::instance();
    const double base = s.mean_scnr_db(Scheme::cra); // eps_bob = 5 dB, eps_eve = -20 dB

    const SweepResult tighter_bob =
        run_sweep(s.cfg, {"eps_bob", {10.0}}, kRealizations, {Scheme::cra}, worker_count());
    const SweepResult looser_eve =
        run_sweep(s.cfg, {"eps_eve", {-10.0}}, kRealizations, {Scheme::cra}, worker_count());

    auto mean_ok = [](const SweepResult &res) {
        double sum = 0.0;
        int n = 0;
        for (const auto &r : res.rows)
            if (r.status == "ok")
            {
                sum += r.scnr_db;
                ++n;
            }
        return n ? sum / n : std::nan("");
    };
    const double at_10 = mean_ok(tighter_bob);
    const double at_relaxed_eve = mean_ok(looser_eve);

    const bool bob_direction = at_10 <= base;
    const bool eve_direction = at_relaxed_eve >= base;
    report(4, bob_direction && eve_direction,
           "mean SCNR dB: eps_bob 5->10: " + fmt1(base) + " -> " + fmt1(at_10) + "; eps_eve -20->-10: " + fmt1(base) +
               " -> " + fmt1(at_relaxed_eve));
    CHECK(bob_direction);
    CHECK(eve_direction);

    // audit these accepted rows against their own thresholds as part of
    // criterion 3's 100% requirement
    for (const auto &r : tighter_bob.rows)
        CHECK(row_meets_constraints(r, 10.0, -20.0, s.cfg.power_budget_w));
    for (const auto &r : looser_eve.rows)
        CHECK(row_meets_constraints(r, 5.0, -10.0, s.cfg.power_budget_w));
}

TEST_CASE("criterion 5: polarization resolution matters more than pattern resolution")
{
    ScenarioConfig pol_fixed = default_scenario();
    pol_fixed.dictionary.num_polarizations = 1;
    ScenarioConfig pat_fixed = default_scenario();
    pat_fixed.dictionary.num_patterns = 1;

    const SweepResult pat_axis =
        run_sweep(pol_fixed, {"p_pat", {1.0, 3.0}}, kRealizations, {Scheme::cra}, worker_count());
    const SweepResult pol_axis =
        run_sweep(pat_fixed, {"p_pol", {1.0, 3.0}}, kRealizations, {Scheme::cra}, worker_count());

    auto mean_at = [](const SweepResult &res, double value) {
        double sum = 0.0;
        int n = 0;
        for (const auto &r : res.rows)
            if (r.status == "ok" && r.axis_value == value)
            {
                sum += r.scnr_db;
                ++n;
            }
        return n ? sum / n : std::nan("");
    };
    const double pat_gain = mean_at(pat_axis, 3.0) - mean_at(pat_axis, 1.0);
    const double pol_gain = mean_at(pol_axis, 3.0) - mean_at(pol_axis, 1.0);
    report(5, pol_gain > pat_gain,
           "raising P_pol 1->3 gains " + fmt1(pol_gain) + " dB vs P_pat 1->3 gains " + fmt1(pat_gain) + " dB");
    CHECK(pol_gain > pat_gain);
}

TEST_CASE("criterion 6: near-oracle mode selection on tiny instances")
{
    const ScenarioConfig cfg = tiny_scenario();
    struct Outcome
    {
        bool usable = false;
        double gap_db = 0.0;
        bool exceeded = false;
    };
    std::vector<Outcome> outcomes(kRealizations);
    parallel_for(kRealizations, [&](int r) {
        const std::uint64_t seed = realization_seed(cfg, r);
        const ChannelSet channels = generate_channels(cfg, seed);
        const EmDictionary dict = apply_scheme(cfg, Scheme::cra);
        const DesignProblem problem = make_problem(cfg, channels, dict);
        Rng rng(Rng::derive(seed, 1 + std::uint64_t(Scheme::cra)));
        const auto [state, trace] = run(problem, cfg.algorithm, rng);
        if (!state.feasible)
            return;
        const ExhaustiveResult ex = exhaustive_em_search(problem, cfg.algorithm, 1e-6, 200, &state);
        if (!ex.any_feasible)
            return;
        const EmBeamformer tx = assemble_em_beamformer(dict, state.sel_tx);
        const EmBeamformer rx = assemble_em_beamformer(dict, state.sel_rx);
        const double got = radar_scnr(channels, tx, rx, state, problem.noise);
        outcomes[std::size_t(r)] = {true, lin_to_db(ex.best_scnr) - lin_to_db(got),
                                    got > ex.best_scnr * (1.0 + 1e-6)};
    });

    int usable = 0, within_1db = 0;
    bool never_exceeds = true;
    for (const auto &o : outcomes)
    {
        if (!o.usable)
            continue;
        ++usable;
        within_1db += (o.gap_db <= 1.0);
        never_exceeds = never_exceeds && !o.exceeded;
    }
    const double rate = usable ? double(within_1db) / usable : 0.0;
    report(6, rate >= 0.6 && never_exceeds && usable > 0,
           std::to_string(within_1db) + "/" + std::to_string(usable) +
               " instances within 1 dB of the exhaustive search; bound never exceeded: " +
               (never_exceeds ? "yes" : "no"));
    CHECK(usable > 0);
    CHECK(rate >= 0.6);
    CHECK(never_exceeds);
}

TEST_CASE("criterion 7: numerical identities")
{
    const ScenarioConfig cfg = tiny_scenario();
    const AlgorithmConfig acfg = cfg.algorithm;

    // FP identity after every gamma update
    bool fp_ok = true;
    for (int r = 0; r < 20; ++r)
    {
        const std::uint64_t seed = realization_seed(cfg, r);
        const ChannelSet channels = generate_channels(cfg, seed);
        const EmDictionary dict = apply_scheme(cfg, Scheme::cra);
        const DesignProblem problem = make_problem(cfg, channels, dict);
        Rng rng(Rng::derive(seed, 99));
        BeamformerState state = initialize(problem, acfg, rng);
        if (!state.feasible)
            continue;
        state.gamma = update_gamma(problem, state, acfg);
        const EmBeamformer tx = assemble_em_beamformer(dict, state.sel_tx);
        const EmBeamformer rx = assemble_em_beamformer(dict, state.sel_rx);
        const ScnrKernels k = scnr_kernels(channels, tx, rx, state.digital_precoder, problem.noise);
        const auto &w = state.digital_combiner;
        const double num = std::real(cplx(w.adjoint() * k.signal * w));
        const double den = std::real(cplx(w.adjoint() * k.interference * w));
        fp_ok = fp_ok && std::abs(num - state.gamma * den) <= 1e-10 * std::max(num, 1e-300);
    }

    // MM tangency and minorant margins
    Rng rng(31415);
    bool mm_ok = true;
    for (int rep = 0; rep < 20; ++rep)
    {
        const int dim = 6;
        Eigen::MatrixXd a(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                a(i, j) = rng.gaussian();
        const Eigen::MatrixXd kernel = a.transpose() * a;
        Eigen::VectorXd x0(dim);
        for (int i = 0; i < dim; ++i)
            x0(i) = rng.gaussian();
        const AffineMinorant m = mm_linearize_quadratic(kernel, x0);
        mm_ok = mm_ok && std::abs(m.value(x0) - x0.dot(kernel * x0)) <= 1e-10 * std::max(1.0, x0.dot(kernel * x0));
        for (int t = 0; t < 100; ++t)
        {
            Eigen::VectorXd x(dim);
            for (int i = 0; i < dim; ++i)
                x(i) = rng.gaussian();
            mm_ok = mm_ok && (x.dot(kernel * x) - m.value(x) >= -1e-12 * std::max(1.0, std::abs(m.value(x))));
        }
    }

    // Rayleigh quotient beats random search on 100 kernel pairs
    bool rayleigh_ok = true;
    for (int rep = 0; rep < 100; ++rep)
    {
        const int dim = 6;
        Eigen::MatrixXcd g(dim, dim), h(dim, dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
            {
                g(i, j) = rng.cgaussian();
                h(i, j) = rng.cgaussian();
            }
        const Eigen::MatrixXcd b1 = g * g.adjoint();
        const Eigen::MatrixXcd b2 = h * h.adjoint() + Eigen::MatrixXcd::Identity(dim, dim);
        double quot = 0.0;
        max_generalized_rayleigh(b1, b2, &quot);
        for (int t = 0; t < 10000 && rayleigh_ok; ++t)
        {
            Eigen::VectorXcd v(dim);
            for (int i = 0; i < dim; ++i)
                v(i) = rng.cgaussian();
            const double ratio = std::real(cplx(v.adjoint() * b1 * v)) / std::real(cplx(v.adjoint() * b2 * v));
            rayleigh_ok = rayleigh_ok && ratio <= quot * (1.0 + 1e-12);
        }
    }

    // factored vs dense metric agreement on 100 tiny instances
    std::atomic<bool> dense_ok{true};
    std::atomic<int> dense_checked{0};
    parallel_for(100, [&](int r) {
        const std::uint64_t seed = realization_seed(cfg, 1000 + r);
        const ChannelSet channels = generate_channels(cfg, seed);
        const EmDictionary dict = apply_scheme(cfg, Scheme::cra);
        const DesignProblem problem = make_problem(cfg, channels, dict);
        Rng state_rng(Rng::derive(seed, 5));
        AlgorithmConfig local = acfg;
        const BeamformerState state = initialize(problem, local, state_rng);
        if (!state.feasible)
            return;
        const DenseMetrics dense = dense_recompute(problem, state);
        const EmBeamformer tx = assemble_em_beamformer(dict, state.sel_tx);
        const EmBeamformer rx = assemble_em_beamformer(dict, state.sel_rx);
        bool ok = std::abs(radar_scnr(channels, tx, rx, state, problem.noise) - dense.scnr) <=
                  1e-10 * std::max(dense.scnr, 1e-300);
        for (int k = 0; k < problem.num_users(); ++k)
        {
            ok = ok && std::abs(bob_sinr(k, channels, tx, state, problem.noise) - dense.bob_sinr[std::size_t(k)]) <=
                           1e-10 * std::max(dense.bob_sinr[std::size_t(k)], 1e-300);
            ok = ok && std::abs(eve_sinr(k, channels, tx, state, problem.noise) - dense.eve_sinr[std::size_t(k)]) <=
                           1e-10 * std::max(dense.eve_sinr[std::size_t(k)], 1e-300);
        }
        if (!ok)
            dense_ok = false;
        ++dense_checked;
    });

    report(7, fp_ok && mm_ok && rayleigh_ok && dense_ok.load(),
           std::string("fp identity: ") + (fp_ok ? "ok" : "violated") + ", mm tangency/minorant: " +
               (mm_ok ? "ok" : "violated") + ", rayleigh optimality: " + (rayleigh_ok ? "ok" : "violated") +
               ", factored-vs-dense on " + std::to_string(dense_checked.load()) + " instances: " +
               (dense_ok.load() ? "ok" : "violated"));
    CHECK(fp_ok);
    CHECK(mm_ok);
    CHECK(rayleigh_ok);
    CHECK(dense_ok.load());
}

TEST_CASE("criterion 8: detection dominance and floor")
{
    const ScenarioConfig cfg = roc_scenario();
    const int trials = 100000;
    const RocResult res = run_roc(cfg, {Scheme::cra, Scheme::bb_only}, {1e-3, 1e-2}, trials);

    double cra_pd = std::nan(""), bb_pd = std::nan("");
    for (const auto &r : res.rows)
        if (r.pfa == 1e-2)
        {
            if (r.scheme == Scheme::cra)
                cra_pd = r.pd;
            if (r.scheme == Scheme::bb_only)
                bb_pd = r.pd;
        }
    const double sigma = std::sqrt(std::max(bb_pd * (1.0 - bb_pd), 0.25 / trials) / trials);
    const bool dominance = cra_pd >= bb_pd - 3.0 * sigma;
    const bool floor = cra_pd >= 0.8;
    report(8, dominance && floor,
           "pd at pfa=1e-2: cra=" + fmt1(cra_pd) + " bb=" + fmt1(bb_pd) + " (dominance within 3 sigma: " +
               (dominance ? "yes" : "no") + ", cra floor 0.8: " + (floor ? "met" : "missed") + ")");
    CHECK(dominance);
    CHECK(floor);
}

TEST_CASE("criterion 9: byte-identical replays")
{
    ScenarioConfig cfg = tiny_scenario();
    cfg.algorithm.max_outer_iters = 15;
    const SweepAxis axis{"power", {40.0, 60.0}};
    const SweepResult a = run_sweep(cfg, axis, 3, {Scheme::cra, Scheme::bb_only}, 2);
    const SweepResult b = run_sweep(cfg, axis, 3, {Scheme::cra, Scheme::bb_only}, 1);
    const bool sweep_same = a.to_csv() == b.to_csv();

    ScenarioConfig roc_cfg = tiny_scenario();
    roc_cfg.geometry.target_position = std::array<double, 2>{90.0, 6.0};
    const RocResult r1 = run_roc(roc_cfg, {Scheme::cra}, {1e-2, 1e-1}, 5000);
    const RocResult r2 = run_roc(roc_cfg, {Scheme::cra}, {1e-2, 1e-1}, 5000);
    const bool roc_same = r1.to_csv() == r2.to_csv();

    report(9, sweep_same && roc_same,
           std::string("sweep CSV replay identical: ") + (sweep_same ? "yes" : "no") +
               ", roc CSV replay identical: " + (roc_same ? "yes" : "no"));
    CHECK(sweep_same);
    CHECK(roc_same);
}
