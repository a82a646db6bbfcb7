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

#include "crasim/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace crasim
{

void TinyScenarioLimits::check(const DesignProblem &problem)
{
    const int n = problem.num_antennas();
    const int p = problem.dict->num_modes();
    if (n > max_antennas || problem.channels->num_angles > max_angles || p > max_modes ||
        problem.num_users() > max_users || problem.channels->num_clutter() > max_clutter)
        throw std::invalid_argument("TinyScenarioLimits: scenario exceeds the brute-force envelope");
    if (std::pow(double(p), 2.0 * n) > max_pairs)
        throw std::invalid_argument("TinyScenarioLimits: enumeration budget exceeded");
}

namespace
{

// Inner block-coordinate loop at fixed EM modes: digital precoder, combiner,
// FP auxiliary. Returns the settled SCNR, or nullopt when infeasible.
std::optional<double> bb_only_optimum(const DesignProblem &problem, const AlgorithmConfig &config,
                                      BeamformerState &state, double inner_tol, int inner_iters)
{
    if (problem.num_users() > 0)
    {
        const ConicProgram feas = build_fbb_feasibility_program(problem, state);
        const ConicSolution sol = solve(feas, config.subproblem_tol, config.subproblem_max_iter);
        const double slack = sol.x(sol.x.size() - 1);
        if (sol.status != SolveStatus::optimal || !(slack > 0.0))
            return std::nullopt;
        state.digital_precoder = unlift_complex(sol.x, problem.num_antennas());
    }
    bootstrap_radar_columns(problem, state);
    if (!polish_fixed_modes(problem, config, state, inner_tol, inner_iters))
        return std::nullopt;
    return state.gamma;
}

} // namespace

ExhaustiveResult exhaustive_em_search(const DesignProblem &problem, const AlgorithmConfig &config, double inner_tol,
                                      int inner_iters, const BeamformerState *reference)
{
    problem.validate();
    TinyScenarioLimits::check(problem);

    const int n = problem.num_antennas();
    const int p = problem.dict->num_modes();

    ExhaustiveResult result;

    std::vector<int> ref_tx, ref_rx;
    if (reference)
    {
        ref_tx = reference->sel_tx.selected_modes();
        ref_rx = reference->sel_rx.selected_modes();
    }

    std::vector<int> modes(std::size_t(2 * n), 0); // [tx_0..tx_{N-1}, rx_0..rx_{N-1}]
    const long total = long(std::llround(std::pow(double(p), 2.0 * n)));
    for (long code = 0; code < total; ++code)
    {
        long rem = code;
        for (int i = 0; i < 2 * n; ++i)
        {
            modes[std::size_t(i)] = int(rem % p);
            rem /= p;
        }
        const std::vector<int> tx(modes.begin(), modes.begin() + n);
        const std::vector<int> rx(modes.begin() + n, modes.end());

        BeamformerState state(SelectionMatrix::one_hot(p, tx), SelectionMatrix::one_hot(p, rx),
                              std::sqrt(problem.power_budget / n) * Eigen::MatrixXcd::Identity(n, n),
                              Eigen::VectorXcd::Ones(n) / std::sqrt(double(n)), 0.0);
        std::optional<double> scnr = bb_only_optimum(problem, config, state, inner_tol, inner_iters);
        if (reference && tx == ref_tx && rx == ref_rx)
        {
            BeamformerState refined = *reference;
            if (polish_fixed_modes(problem, config, refined, inner_tol, inner_iters))
                scnr = std::max(scnr.value_or(0.0), refined.gamma);
        }
        ++result.pairs_evaluated;
        if (!scnr)
            continue;
        if (!result.any_feasible || *scnr > result.best_scnr)
        {
            result.any_feasible = true;
            result.best_scnr = *scnr;
            result.best_tx_modes = tx;
            result.best_rx_modes = rx;
        }
    }
    return result;
}

DenseMetrics dense_recompute(const DesignProblem &problem, const BeamformerState &state)
{
    problem.validate();
    const ChannelSet &ch = *problem.channels;
    const int n = problem.num_antennas();
    if (2 * ch.num_angles * n > 256)
        throw std::invalid_argument("dense_recompute: materialization restricted to 2MN <= 256");

    const Eigen::MatrixXcd f_em = assemble_em_beamformer(*problem.dict, state.sel_tx).dense().cast<cplx>();
    const Eigen::MatrixXcd w_em = assemble_em_beamformer(*problem.dict, state.sel_rx).dense().cast<cplx>();
    const Eigen::MatrixXcd &f_bb = state.digital_precoder;

    DenseMetrics out;
    for (int k = 0; k < problem.num_users(); ++k)
    {
        const auto &bob = ch.bobs[std::size_t(k)];
        Eigen::VectorXcd pbar(2 * bob.num_paths());
        for (int l = 0; l < bob.num_paths(); ++l)
            pbar.segment<2>(2 * l) = ch.bob_rx_pol[std::size_t(k)].cast<cplx>();
        const Eigen::RowVectorXcd gains = pbar.transpose() * bob.dense() * f_em * f_bb;

        const Eigen::RowVectorXcd eve_gains =
            ch.eve_rx_pol.cast<cplx>().transpose() * ch.eve().dense() * f_em * f_bb;

        double interf = 0.0, eve_interf = 0.0;
        for (int j = 0; j < n; ++j)
            if (j != k)
            {
                interf += std::norm(gains(j));
                eve_interf += std::norm(eve_gains(j));
            }
        out.bob_sinr.push_back(std::norm(gains(k)) / (interf + problem.noise.sigma2_bob));
        out.eve_sinr.push_back(std::norm(eve_gains(k)) / (eve_interf + problem.noise.sigma2_eve));
    }

    const Eigen::MatrixXcd target_through = w_em.transpose() * ch.target().dense() * f_em * f_bb;
    Eigen::MatrixXcd den = problem.noise.sigma2_radar * Eigen::MatrixXcd::Identity(n, n);
    for (const auto &cl : ch.clutter)
    {
        const Eigen::MatrixXcd c = w_em.transpose() * cl.dense() * f_em * f_bb;
        den += c * c.adjoint();
    }
    const Eigen::VectorXcd &w = state.digital_combiner;
    out.scnr = std::real(cplx(w.adjoint() * (target_through * target_through.adjoint()) * w)) /
               std::real(cplx(w.adjoint() * den * w));
    return out;
}

} // namespace crasim
