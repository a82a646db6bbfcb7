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

#ifndef CRASIM_OPTIMIZER_HPP
#define CRASIM_OPTIMIZER_HPP

#include <string>
#include <utility>
#include <vector>

#include "crasim/conic.hpp"
#include "crasim/metrics.hpp"
#include "crasim/rng.hpp"

namespace crasim
{

/// Everything that defines one beamforming design instance.
struct DesignProblem
{
    const ChannelSet *channels = nullptr;
    const EmDictionary *dict = nullptr;
    NoiseModel noise;
    double power_budget = 0.0;
    Eigen::VectorXd bob_sinr_floor;    // linear ratios, one per user
    Eigen::VectorXd eve_sinr_ceiling;  // linear ratios, one per user

    int num_antennas() const { return channels->num_antennas; }
    int num_users() const { return channels->num_bobs(); }
    void validate() const;
};

struct AlgorithmConfig
{
    int max_outer_iters = 50;
    double scnr_rel_tol = 1e-3;
    // Penalty weights act on the scale-normalized subproblem objectives and
    // grow geometrically per outer iteration.
    double penalty_tx = 1e-3;
    double penalty_rx = 1e-3;
    double penalty_growth = 2.0;
    double penalty_cap = 1e2;
    double subproblem_tol = 1e-7;
    int subproblem_max_iter = 600;
    double gamma_floor = 0.0;
    // Once the SCNR has settled, up to three extra iterations wait for the
    // selections to come this close to binary before rounding.
    double binariness_tol = 1e-3;
    // Random one-hot mode draws screened by a target-gain proxy; the best
    // feasible candidate seeds the alternation.
    int init_candidates = 8;

    void validate() const;
};

struct IterationRecord
{
    int iteration = 0;
    double scnr_linear = 0.0;
    double scnr_db = 0.0;
    std::vector<double> bob_sinr_db;
    std::vector<double> eve_sinr_db;
    double power_w = 0.0;
    double binariness = 0.0; // max |s (1 - s)| over both selections
    std::string statuses;
};

struct IterationTrace
{
    std::vector<IterationRecord> records;
    bool converged = false;
    std::string failure; // empty on success

    int iterations() const { return int(records.size()); }
    // CSV columns: iteration, scnr_db, min_sinr_db, max_eve_sinr_db,
    // power_w, binariness, statuses.
    std::string to_csv() const;
};

/// Tangent minorant of the quadratic form x'Kx at x0: value(x) = g'x + c.
struct AffineMinorant
{
    Eigen::VectorXd gradient;
    double offset = 0.0;

    double value(const Eigen::VectorXd &x) const { return gradient.dot(x) + offset; }
};

// g(x) = x0'Kx0 + 2 x0'K(x - x0); equals the quadratic at x0 and minorizes
// it everywhere when K is PSD.
AffineMinorant mm_linearize_quadratic(const Eigen::MatrixXd &kernel, const Eigen::VectorXd &x0);

// Transmit-side EM mode selection subproblem over vec(S_F) in [0,1]^{PN}:
// MM-linearized target term, exact clutter quadratics scaled by gamma,
// binariness penalty, user SINR cones, eavesdropper MM quadratic caps and
// per-column sum equalities. Objectives are divided by program.objective_scale.
ConicProgram build_sf_subproblem(const DesignProblem &problem, const BeamformerState &state,
                                 const AlgorithmConfig &config, double penalty_weight);

// Receive-side selection subproblem: same structure without SINR constraints.
ConicProgram build_sw_subproblem(const DesignProblem &problem, const BeamformerState &state,
                                 const AlgorithmConfig &config, double penalty_weight);

// Digital precoder subproblem over the re/im-interleaved lift of vec(F_BB).
ConicProgram build_fbb_subproblem(const DesignProblem &problem, const BeamformerState &state,
                                  const AlgorithmConfig &config);

// Max-slack feasibility program used for initialization: maximize the common
// SINR-cone slack under the eavesdropper caps and the power ball.
ConicProgram build_fbb_feasibility_program(const DesignProblem &problem, const BeamformerState &state);

// Interleaved real lift of an N x N complex matrix and its inverse.
Eigen::VectorXd lift_complex(const Eigen::MatrixXcd &m);
Eigen::MatrixXcd unlift_complex(const Eigen::VectorXd &x, int n);

// Leading generalized eigenvector of (B1, B2), unit norm, with a
// deterministic phase convention. B2 must be Hermitian positive definite.
Eigen::VectorXcd max_generalized_rayleigh(const Eigen::MatrixXcd &b1, const Eigen::MatrixXcd &b2,
                                          double *quotient = nullptr);

// Digital combiner update: leading generalized eigenvector of the SCNR
// kernel pair for the current state.
Eigen::VectorXcd update_wbb(const DesignProblem &problem, const BeamformerState &state);

// FP auxiliary update: the current SCNR, clamped at gamma_floor.
double update_gamma(const DesignProblem &problem, const BeamformerState &state, const AlgorithmConfig &config);

// Points zero radar streams at the current target response with the spare
// power budget (the MM surrogates cannot grow a zero column), backing off
// when the communication constraints object.
void bootstrap_radar_columns(const DesignProblem &problem, BeamformerState &state);

// Random one-hot selections, combiner from the Rayleigh step, precoder from
// the max-slack feasibility phase followed by the radar-column bootstrap.
// state.feasible is false when no precoder meets the constraints under the
// drawn EM modes.
BeamformerState initialize(const DesignProblem &problem, const AlgorithmConfig &config, Rng &rng);

// Fixed-mode refinement: alternates the precoder solve, combiner eigen-step
// and gamma update at the state's current (binary) selections until the SCNR
// settles. Returns false if a precoder subproblem reports infeasibility.
bool polish_fixed_modes(const DesignProblem &problem, const AlgorithmConfig &config, BeamformerState &state,
                        double rel_tol = 1e-4, int max_iters = 25);

// Full alternating loop: S_F, S_W, F_BB, w_BB, gamma per outer iteration,
// terminated on relative SCNR change, followed by rounding both selections,
// one precoder re-solve under the rounded modes and a final feasibility
// audit.
std::pair<BeamformerState, IterationTrace> run(const DesignProblem &problem, const AlgorithmConfig &config, Rng &rng);

} // namespace crasim

#endif
