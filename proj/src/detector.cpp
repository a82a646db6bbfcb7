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

#include "crasim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace crasim
{

namespace
{

// Precontracted response of one two-way entity: y = (w^H R) Phi (G F_bb s).
struct EntityResponse
{
    Eigen::RowVector2cd combined_rx; // w^H R
    Eigen::Matrix<cplx, 2, Eigen::Dynamic> precoded_tx; // G F_bb
};

EntityResponse contract(const CompoundChannel &entity, const EmBeamformer &em_tx, const EmBeamformer &em_rx,
                        const BeamformerState &state)
{
    EntityResponse r;
    r.combined_rx = (state.digital_combiner.adjoint() * entity.receive_factor(em_rx)).row(0);
    r.precoded_tx = entity.transmit_factor(em_tx) * state.digital_precoder;
    return r;
}

} // namespace

std::vector<RocPoint> roc_curve(const DesignProblem &problem, const BeamformerState &state,
                                const DetectionModel &model, int n_trials, std::vector<double> pfa_grid, Rng &rng)
{
    problem.validate();
    if (model.block_len < 1)
        throw std::invalid_argument("roc_curve: block length must be positive");
    if (pfa_grid.empty())
        throw std::invalid_argument("roc_curve: empty pfa grid");
    std::sort(pfa_grid.begin(), pfa_grid.end());
    const double pfa_min = pfa_grid.front();
    if (!(pfa_min > 0.0) || pfa_grid.back() >= 1.0)
        throw std::invalid_argument("roc_curve: pfa values must lie in (0, 1)");
    if (double(n_trials) < 10.0 / pfa_min)
        throw std::invalid_argument("roc_curve: insufficient trials for the requested pfa resolution");

    const int n_ant = problem.num_antennas();
    const EmBeamformer em_tx = assemble_em_beamformer(*problem.dict, state.sel_tx);
    const EmBeamformer em_rx = assemble_em_beamformer(*problem.dict, state.sel_rx);

    const EntityResponse target = contract(problem.channels->target(), em_tx, em_rx, state);
    std::vector<EntityResponse> clutter;
    for (const auto &cl : problem.channels->clutter)
        clutter.push_back(contract(cl, em_tx, em_rx, state));

    const double noise_std = std::sqrt(problem.noise.sigma2_radar) * state.digital_combiner.norm();

    auto run_trials = [&](bool with_target) {
        std::vector<double> stats(static_cast<std::size_t>(n_trials));
        Eigen::VectorXcd symbols(n_ant);
        for (int t = 0; t < n_trials; ++t)
        {
            const Eigen::Matrix2cd phi_t =
                with_target ? sample_scattering_matrix(rng, model.target) : Eigen::Matrix2cd::Zero();
            std::vector<Eigen::Matrix2cd> phi_c;
            phi_c.reserve(clutter.size());
            for (std::size_t c = 0; c < clutter.size(); ++c)
                phi_c.push_back(sample_scattering_matrix(rng, model.clutter));

            const Eigen::RowVector2cd target_rx = target.combined_rx * phi_t;
            double energy = 0.0;
            for (int b = 0; b < model.block_len; ++b)
            {
                for (int j = 0; j < n_ant; ++j)
                    symbols(j) = rng.cgaussian();
                cplx y = noise_std * rng.cgaussian();
                if (with_target)
                    y += cplx(target_rx * (target.precoded_tx * symbols));
                for (std::size_t c = 0; c < clutter.size(); ++c)
                    y += cplx((clutter[c].combined_rx * phi_c[c]) * (clutter[c].precoded_tx * symbols));
                energy += std::norm(y);
            }
            stats[std::size_t(t)] = energy / model.block_len;
        }
        return stats;
    };

    std::vector<double> h0 = run_trials(false);
    const std::vector<double> h1 = run_trials(true);

    std::sort(h0.begin(), h0.end(), std::greater<double>());
    std::vector<RocPoint> roc;
    for (const double pfa : pfa_grid)
    {
        const int idx = std::min(n_trials - 1, int(pfa * n_trials));
        RocPoint pt;
        pt.pfa = pfa;
        pt.threshold = h0[std::size_t(idx)];
        int hits = 0;
        for (const double s : h1)
            hits += (s > pt.threshold);
        pt.pd = double(hits) / double(n_trials);
        roc.push_back(pt);
    }
    return roc;
}

} // namespace crasim
