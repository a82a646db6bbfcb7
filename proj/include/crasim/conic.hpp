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

#ifndef CRASIM_CONIC_HPP
#define CRASIM_CONIC_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace crasim
{

/// Second-order cone constraint ||F x + g|| <= h' x + d.
struct SocConstraint
{
    Eigen::MatrixXd F;
    Eigen::VectorXd g;
    Eigen::VectorXd h;
    double d = 0.0;
};

/// Convex quadratic constraint ||U x + v||^2 + a' x + b <= 0.
struct QuadConstraint
{
    Eigen::MatrixXd U;
    Eigen::VectorXd v;
    Eigen::VectorXd a;
    double b = 0.0;
};

// Canonical convex subproblem: minimize 0.5 x'Qx + c'x + obj_const over
// linear equalities, box intervals, second-order cones and convex quadratic
// inequalities. Quadratic inequalities are rewritten internally as
// second-order cones, so one cone family reaches the solver core.
struct ConicProgram
{
    Eigen::MatrixXd Q; // PSD kernel (symmetrized before use)
    Eigen::VectorXd c;
    double obj_const = 0.0;
    // The builders normalize objectives to O(1); this records the divisor so
    // surrogate values can be mapped back to physical units.
    double objective_scale = 1.0;

    Eigen::MatrixXd Aeq; // may have zero rows
    Eigen::VectorXd beq;

    Eigen::VectorXd lb; // entries may be -inf
    Eigen::VectorXd ub; // entries may be +inf

    std::vector<SocConstraint> socs;
    std::vector<QuadConstraint> quads;

    Eigen::VectorXd warm_start; // empty = none

    int num_vars() const { return int(c.size()); }

    // Unconstrained box helpers.
    static ConicProgram with_box(int n, double lo, double hi);
    static ConicProgram unbounded(int n);

    double objective(const Eigen::VectorXd &x) const;

    // Worst constraint residual after normalizing each constraint row.
    double max_violation(const Eigen::VectorXd &x) const;

    // Rewrites ||Ux+v||^2 <= -a'x-b as the cone ||[2(Ux+v); t-1]|| <= t+1
    // with t = -a'x-b.
    static SocConstraint quad_as_soc(const QuadConstraint &q);

    // Builds a quadratic constraint x'Kx + a'x + b <= 0 from a PSD kernel by
    // eigen-factorizing K (small negative eigenvalues are clipped).
    static QuadConstraint quad_from_kernel(const Eigen::MatrixXd &K, const Eigen::VectorXd &a, double b);

    void validate() const;

    // Structured-text dump for offline debugging.
    std::string dump() const;
    void dump_to_file(const std::string &path) const;
};

enum class SolveStatus
{
    optimal,
    infeasible,
    max_iter
};

struct ConicSolution
{
    Eigen::VectorXd x;
    SolveStatus status = SolveStatus::max_iter;
    double objective_value = 0.0;
    double max_constraint_violation = 0.0;
    int newton_iterations = 0;
    std::string message;
};

const char *to_string(SolveStatus s);

// Barrier interior-point solve. Equalities are eliminated through a
// null-space parametrization, a phase-I program recovers a strictly interior
// point when the warm start is not one, and the returned point is re-checked
// against the raw constraint list. Deterministic for identical inputs.
ConicSolution solve(const ConicProgram &program, double tol = 1e-7, int max_iter = 600);

} // namespace crasim

#endif
