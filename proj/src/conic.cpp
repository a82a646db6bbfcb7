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

#include "crasim/conic.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace crasim
{

namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

double row_scale(const Eigen::VectorXd &a) { return std::max(1.0, a.norm()); }

double soc_scale(const SocConstraint &s)
{
    double fmax = 0.0;
    for (Eigen::Index r = 0; r < s.F.rows(); ++r)
        fmax = std::max(fmax, s.F.row(r).norm());
    return std::max(1.0, std::max(fmax, s.h.norm()));
}
} // namespace

ConicProgram ConicProgram::with_box(int n, double lo, double hi)
{
    ConicProgram p;
    p.Q = Eigen::MatrixXd::Zero(n, n);
    p.c = Eigen::VectorXd::Zero(n);
    p.lb = Eigen::VectorXd::Constant(n, lo);
    p.ub = Eigen::VectorXd::Constant(n, hi);
    return p;
}

ConicProgram ConicProgram::unbounded(int n) { return with_box(n, -kInf, kInf); }

double ConicProgram::objective(const Eigen::VectorXd &x) const
{
    return 0.5 * x.dot(Q.selfadjointView<Eigen::Lower>() * x) + c.dot(x) + obj_const;
}

double ConicProgram::max_violation(const Eigen::VectorXd &x) const
{
    double v = 0.0;
    for (Eigen::Index r = 0; r < Aeq.rows(); ++r)
        v = std::max(v, std::abs(Aeq.row(r).dot(x) - beq(r)) / row_scale(Aeq.row(r).transpose()));
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        if (lb(i) > -kInf)
            v = std::max(v, lb(i) - x(i));
        if (ub(i) < kInf)
            v = std::max(v, x(i) - ub(i));
    }
    for (const auto &s : socs)
        v = std::max(v, ((s.F * x + s.g).norm() - s.h.dot(x) - s.d) / soc_scale(s));
    for (const auto &q : quads)
    {
        const double scale = std::max(1.0, q.a.norm() + q.U.squaredNorm());
        v = std::max(v, ((q.U * x + q.v).squaredNorm() + q.a.dot(x) + q.b) / scale);
    }
    return v;
}

SocConstraint ConicProgram::quad_as_soc(const QuadConstraint &q)
{
    // ||z||^2 <= t  <=>  ||[2z; t-1]|| <= t+1, with z = Ux+v, t = -a'x-b.
    const Eigen::Index rows = q.U.rows();
    SocConstraint s;
    s.F.resize(rows + 1, q.U.cols());
    s.F.topRows(rows) = 2.0 * q.U;
    s.F.bottomRows(1) = -q.a.transpose();
    s.g.resize(rows + 1);
    s.g.head(rows) = 2.0 * q.v;
    s.g(rows) = -q.b - 1.0;
    s.h = -q.a;
    s.d = -q.b + 1.0;
    return s;
}

QuadConstraint ConicProgram::quad_from_kernel(const Eigen::MatrixXd &K, const Eigen::VectorXd &a, double b)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (K + K.transpose()));
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quad_from_kernel: eigen factorization failed");
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -1e-9 * scale)
        throw std::invalid_argument("quad_from_kernel: kernel is not PSD");
    QuadConstraint q;
    q.U = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
    q.v = Eigen::VectorXd::Zero(K.rows());
    q.a = a;
    q.b = b;
    return q;
}

void ConicProgram::validate() const
{
    const int n = num_vars();
    if (n < 1)
        throw std::invalid_argument("ConicProgram: empty decision vector");
    if (Q.rows() != n || Q.cols() != n || lb.size() != n || ub.size() != n)
        throw std::invalid_argument("ConicProgram: dimension mismatch in objective or box");
    if (Aeq.rows() != beq.size() || (Aeq.rows() > 0 && Aeq.cols() != n))
        throw std::invalid_argument("ConicProgram: dimension mismatch in equalities");
    for (const auto &s : socs)
        if (s.F.cols() != n || s.g.size() != s.F.rows() || s.h.size() != n)
            throw std::invalid_argument("ConicProgram: dimension mismatch in SOC constraint");
    for (const auto &q : quads)
        if (q.U.cols() != n || q.v.size() != q.U.rows() || q.a.size() != n)
            throw std::invalid_argument("ConicProgram: dimension mismatch in quadratic constraint");
    for (int i = 0; i < n; ++i)
        if (lb(i) > ub(i))
            throw std::invalid_argument("ConicProgram: empty box interval");

    const Eigen::MatrixXd qs = 0.5 * (Q + Q.transpose());
    const double scale = std::max(1.0, qs.cwiseAbs().maxCoeff());
    Eigen::LDLT<Eigen::MatrixXd> ldlt(qs);
    if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() < -1e-9 * scale)
    {
        // LDLT is inconclusive on semidefinite kernels; settle it spectrally.
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(qs, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-9 * scale)
            throw std::invalid_argument("ConicProgram: objective kernel is not PSD");
    }
}

std::string ConicProgram::dump() const
{
    std::ostringstream os;
    os << std::setprecision(17);
    auto mat = [&os](const char *name, const Eigen::MatrixXd &m) {
        os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
        for (Eigen::Index r = 0; r < m.rows(); ++r)
        {
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                os << (c ? " " : "") << m(r, c);
            os << '\n';
        }
    };
    os << "conic_program vars " << num_vars() << " socs " << socs.size() << " quads " << quads.size() << '\n';
    os << "obj_const " << obj_const << " objective_scale " << objective_scale << '\n';
    mat("Q", Q);
    mat("c", c);
    mat("Aeq", Aeq);
    mat("beq", beq);
    mat("lb", lb);
    mat("ub", ub);
    for (const auto &s : socs)
    {
        mat("soc_F", s.F);
        mat("soc_g", s.g);
        mat("soc_h", s.h);
        os << "soc_d " << s.d << '\n';
    }
    for (const auto &q : quads)
    {
        mat("quad_U", q.U);
        mat("quad_v", q.v);
        mat("quad_a", q.a);
        os << "quad_b " << q.b << '\n';
    }
    return os.str();
}

void ConicProgram::dump_to_file(const std::string &path) const
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("ConicProgram::dump_to_file: cannot open " + path);
    out << dump();
}

const char *to_string(SolveStatus s)
{
    switch (s)
    {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    default:
        return "max_iter";
    }
}

// --- barrier solver core ---------------------------------------------------

namespace
{

struct LinRow // a' y <= b
{
    Eigen::VectorXd a;
    double b;
};

struct SocRow // ||F y + g|| <= h' y + d
{
    Eigen::MatrixXd F;
    Eigen::VectorXd g;
    Eigen::VectorXd h;
    double d;
};

// Inequality-only problem in the reduced variable y (equalities already
// eliminated): minimize 0.5 y'Qy + c'y subject to lin and soc rows.
struct BarrierProblem
{
    Eigen::MatrixXd Q;
    Eigen::VectorXd c;
    std::vector<LinRow> lin;
    std::vector<SocRow> soc;

    int dim() const { return int(c.size()); }
    double nu() const { return double(lin.size()) + 2.0 * double(soc.size()); }

    double f0(const Eigen::VectorXd &y) const
    {
        return 0.5 * y.dot(Q.selfadjointView<Eigen::Lower>() * y) + c.dot(y);
    }

    // -inf barrier slack => outside the domain.
    double min_slack(const Eigen::VectorXd &y) const
    {
        double slack = kInf;
        for (const auto &r : lin)
            slack = std::min(slack, r.b - r.a.dot(y));
        for (const auto &s : soc)
        {
            const double u = s.h.dot(y) + s.d;
            if (u <= 0.0)
                return -kInf;
            slack = std::min(slack, u - (s.F * y + s.g).norm());
        }
        return slack;
    }

    // Barrier value; +inf outside the domain.
    double phi(const Eigen::VectorXd &y) const
    {
        double val = 0.0;
        for (const auto &r : lin)
        {
            const double slack = r.b - r.a.dot(y);
            if (slack <= 0.0)
                return kInf;
            val -= std::log(slack);
        }
        for (const auto &s : soc)
        {
            const double u = s.h.dot(y) + s.d;
            if (u <= 0.0)
                return kInf;
            const double r2 = u * u - (s.F * y + s.g).squaredNorm();
            if (r2 <= 0.0)
                return kInf;
            val -= std::log(r2);
        }
        return val;
    }

    void add_barrier_derivatives(const Eigen::VectorXd &y, Eigen::VectorXd &grad, Eigen::MatrixXd &hess) const
    {
        for (const auto &r : lin)
        {
            const double slack = r.b - r.a.dot(y);
            grad += r.a / slack;
            hess += (r.a * r.a.transpose()) / (slack * slack);
        }
        for (const auto &s : soc)
        {
            const double u = s.h.dot(y) + s.d;
            const Eigen::VectorXd w = s.F * y + s.g;
            const double r2 = u * u - w.squaredNorm();
            const Eigen::VectorXd grad_r = 2.0 * u * s.h - 2.0 * s.F.transpose() * w;
            grad -= grad_r / r2;
            hess += (grad_r * grad_r.transpose()) / (r2 * r2);
            hess -= (2.0 * (s.h * s.h.transpose()) - 2.0 * (s.F.transpose() * s.F)) / r2;
        }
    }

    // Largest step beta with y + beta*dy still strictly inside the domain.
    double max_step(const Eigen::VectorXd &y, const Eigen::VectorXd &dy) const
    {
        double beta = kInf;
        for (const auto &r : lin)
        {
            const double p = r.a.dot(dy);
            if (p > 0.0)
                beta = std::min(beta, (r.b - r.a.dot(y)) / p);
        }
        for (const auto &s : soc)
        {
            const double u = s.h.dot(y) + s.d;
            const double p = s.h.dot(dy);
            const Eigen::VectorXd w = s.F * y + s.g;
            const Eigen::VectorXd z = s.F * dy;
            // roots of (u + b p)^2 - ||w + b z||^2 = 0
            const double qa = p * p - z.squaredNorm();
            const double qb = 2.0 * (u * p - w.dot(z));
            const double qc = u * u - w.squaredNorm();
            double bound = kInf;
            if (std::abs(qa) < 1e-300)
            {
                if (qb < 0.0)
                    bound = -qc / qb;
            }
            else
            {
                const double disc = qb * qb - 4.0 * qa * qc;
                if (disc >= 0.0)
                {
                    const double sq = std::sqrt(disc);
                    const double r1 = (-qb - sq) / (2.0 * qa);
                    const double r2 = (-qb + sq) / (2.0 * qa);
                    const double lo = std::min(r1, r2), hi = std::max(r1, r2);
                    if (lo > 0.0)
                        bound = lo;
                    else if (hi > 0.0)
                        bound = hi;
                }
            }
            if (p < 0.0)
                bound = std::min(bound, -u / p);
            beta = std::min(beta, bound);
        }
        return beta;
    }
};

struct BarrierResult
{
    Eigen::VectorXd y;
    int newton_iters = 0;
    bool iteration_cap_hit = false;
};

// Path-following barrier minimization from a strictly interior start.
// early_exit, when set, is polled after every Newton step (used by phase-I).
BarrierResult barrier_minimize(const BarrierProblem &bp, Eigen::VectorXd y, double tol, int max_newton,
                               const std::function<bool(const Eigen::VectorXd &)> &early_exit = nullptr)
{
    BarrierResult res;
    const int n = bp.dim();
    double t = 1.0;
    const double mu = 20.0;
    int iters = 0;

    if (bp.nu() == 0.0)
        t = 1.0; // pure quadratic; single Newton pass below still applies

    while (true)
    {
        // Centering for the current t.
        for (int step = 0; step < 60; ++step)
        {
            if (iters >= max_newton)
            {
                res.iteration_cap_hit = true;
                res.y = y;
                res.newton_iters = iters;
                return res;
            }
            Eigen::VectorXd grad = t * (bp.Q.selfadjointView<Eigen::Lower>() * y + bp.c);
            Eigen::MatrixXd hess = t * bp.Q;
            bp.add_barrier_derivatives(y, grad, hess);

            Eigen::VectorXd dy;
            double ridge = 0.0;
            for (int attempt = 0;; ++attempt)
            {
                Eigen::LLT<Eigen::MatrixXd> llt(attempt == 0 ? hess
                                                             : Eigen::MatrixXd(hess + ridge * Eigen::MatrixXd::Identity(n, n)));
                if (llt.info() == Eigen::Success)
                {
                    dy = llt.solve(-grad);
                    break;
                }
                if (attempt >= 8)
                    throw std::runtime_error("conic solve: barrier Hessian factorization failed");
                ridge = ridge == 0.0 ? 1e-12 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff()) : ridge * 100.0;
            }

            const double decrement2 = -grad.dot(dy);
            ++iters;
            if (decrement2 / 2.0 <= 1e-11)
                break;

            double beta = std::min(1.0, 0.995 * bp.max_step(y, dy));
            const double psi0 = t * bp.f0(y) + bp.phi(y);
            const double slope = grad.dot(dy);
            bool moved = false;
            for (int bt = 0; bt < 60; ++bt)
            {
                const Eigen::VectorXd cand = y + beta * dy;
                const double psi = t * bp.f0(cand) + bp.phi(cand);
                if (std::isfinite(psi) && psi <= psi0 + 0.25 * beta * slope)
                {
                    y = cand;
                    moved = true;
                    break;
                }
                beta *= 0.5;
            }
            if (!moved)
                break; // stalled at the current centering accuracy
            if (early_exit && early_exit(y))
            {
                res.y = y;
                res.newton_iters = iters;
                return res;
            }
        }

        if (early_exit && early_exit(y))
            break;
        if (bp.nu() / t <= tol)
            break;
        t *= mu;
        if (t > 1e18)
            break;
    }

    res.y = y;
    res.newton_iters = iters;
    return res;
}

struct Phase1Outcome
{
    bool interior_found = false;
    double best_slack_violation = 0.0; // optimal relaxation level (>0 => infeasible)
    Eigen::VectorXd y;
    int newton_iters = 0;
    bool iteration_cap_hit = false;
};

// Minimizes the common relaxation s of all inequality rows. Any point with
// s < -margin certifies a strictly interior point; an optimal s > 0 is an
// infeasibility certificate.
Phase1Outcome phase1(const BarrierProblem &bp, const Eigen::VectorXd &y0, int max_newton)
{
    const int n = bp.dim();
    Phase1Outcome out;

    double violation = 0.0;
    for (const auto &r : bp.lin)
        violation = std::max(violation, r.a.dot(y0) - r.b);
    for (const auto &s : bp.soc)
        violation = std::max(violation, (s.F * y0 + s.g).norm() - s.h.dot(y0) - s.d);
    const double s0 = violation + 1.0;

    BarrierProblem relaxed;
    relaxed.Q = Eigen::MatrixXd::Zero(n + 1, n + 1);
    relaxed.c = Eigen::VectorXd::Zero(n + 1);
    relaxed.c(n) = 1.0;
    for (const auto &r : bp.lin)
    {
        LinRow row;
        row.a = Eigen::VectorXd::Zero(n + 1);
        row.a.head(n) = r.a;
        row.a(n) = -1.0;
        row.b = r.b;
        relaxed.lin.push_back(std::move(row));
    }
    for (const auto &s : bp.soc)
    {
        SocRow row;
        row.F = Eigen::MatrixXd::Zero(s.F.rows(), n + 1);
        row.F.leftCols(n) = s.F;
        row.g = s.g;
        row.h = Eigen::VectorXd::Zero(n + 1);
        row.h.head(n) = s.h;
        row.h(n) = 1.0;
        row.d = s.d;
        relaxed.soc.push_back(std::move(row));
    }
    { // keep s bounded below so the phase-I objective is coercive
        LinRow floor_row;
        floor_row.a = Eigen::VectorXd::Zero(n + 1);
        floor_row.a(n) = -1.0;
        floor_row.b = s0 + 10.0;
        relaxed.lin.push_back(std::move(floor_row));
    }
    { // loose trust region keeps phase-I iterates finite
        SocRow ball;
        ball.F = Eigen::MatrixXd::Zero(n, n + 1);
        ball.F.leftCols(n).setIdentity();
        ball.g = Eigen::VectorXd::Zero(n);
        ball.h = Eigen::VectorXd::Zero(n + 1);
        ball.d = 1e8 * (1.0 + y0.norm());
        relaxed.soc.push_back(std::move(ball));
    }

    Eigen::VectorXd z0(n + 1);
    z0.head(n) = y0;
    z0(n) = s0;

    constexpr double kExitMargin = 1e-4;
    auto found_interior = [n](const Eigen::VectorXd &z) { return z(n) <= -kExitMargin; };

    BarrierResult r = barrier_minimize(relaxed, z0, 1e-9, max_newton, found_interior);
    out.newton_iters = r.newton_iters;
    out.iteration_cap_hit = r.iteration_cap_hit;
    out.best_slack_violation = r.y(n);
    out.y = r.y.head(n);
    out.interior_found = bp.min_slack(out.y) > 0.0;
    return out;
}

} // namespace

ConicSolution solve(const ConicProgram &program, double tol, int max_iter)
{
    program.validate();
    const int n = program.num_vars();

    // Fold quadratic constraints into the cone list.
    std::vector<SocConstraint> socs = program.socs;
    for (const auto &q : program.quads)
        socs.push_back(ConicProgram::quad_as_soc(q));

    // Eliminate equalities: x = x_p + Z y with Z an orthonormal null-space
    // basis of Aeq.
    Eigen::VectorXd x_particular = Eigen::VectorXd::Zero(n);
    Eigen::MatrixXd null_basis = Eigen::MatrixXd::Identity(n, n);
    ConicSolution sol;
    if (program.Aeq.rows() > 0)
    {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(program.Aeq);
        x_particular = cod.solve(program.beq);
        if ((program.Aeq * x_particular - program.beq).cwiseAbs().maxCoeff() >
            1e-9 * std::max(1.0, program.beq.cwiseAbs().maxCoeff()))
        {
            sol.status = SolveStatus::infeasible;
            sol.x = x_particular;
            sol.objective_value = program.objective(x_particular);
            sol.max_constraint_violation = program.max_violation(x_particular);
            sol.message = "inconsistent equality constraints";
            return sol;
        }
        const Eigen::Index rank = cod.rank();
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(program.Aeq.transpose());
        Eigen::MatrixXd full_q = qr.householderQ();
        null_basis = full_q.rightCols(n - rank);
    }
    const int ny = int(null_basis.cols());

    // Assemble the reduced barrier problem.
    BarrierProblem bp;
    const Eigen::MatrixXd q_sym = 0.5 * (program.Q + program.Q.transpose());
    bp.Q = null_basis.transpose() * q_sym * null_basis;
    bp.c = null_basis.transpose() * (program.c + q_sym * x_particular);
    for (int i = 0; i < n; ++i)
    {
        if (program.ub(i) < kInf)
            bp.lin.push_back({null_basis.row(i).transpose(), program.ub(i) - x_particular(i)});
        if (program.lb(i) > -kInf)
            bp.lin.push_back({-null_basis.row(i).transpose(), x_particular(i) - program.lb(i)});
    }
    for (const auto &s : socs)
    {
        SocRow row;
        row.F = s.F * null_basis;
        row.g = s.F * x_particular + s.g;
        row.h = null_basis.transpose() * s.h;
        row.d = s.h.dot(x_particular) + s.d;
        bp.soc.push_back(std::move(row));
    }

    auto finish = [&](const Eigen::VectorXd &y, SolveStatus status, int iters, const std::string &msg) {
        ConicSolution out;
        out.x = x_particular + null_basis * y;
        out.objective_value = program.objective(out.x);
        out.max_constraint_violation = program.max_violation(out.x);
        out.newton_iterations = iters;
        out.message = msg;
        out.status = status;
        if (status == SolveStatus::optimal && out.max_constraint_violation > 1e-6)
            out.status = SolveStatus::max_iter;
        return out;
    };

    // Fully determined by the equalities: report the unique candidate.
    if (ny == 0)
    {
        const Eigen::VectorXd y0(0);
        const double viol = program.max_violation(x_particular);
        return finish(y0, viol <= 1e-6 ? SolveStatus::optimal : SolveStatus::infeasible, 0,
                      "solution pinned by equality constraints");
    }

    // Starting point: warm start when given, else the box/ball midpoint.
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(ny);
    if (program.warm_start.size() == n)
        y0 = null_basis.transpose() * (program.warm_start - x_particular);

    int iters_used = 0;
    const double start_slack = bp.min_slack(y0);
    if (!(start_slack > 1e-9))
    {
        Phase1Outcome p1 = phase1(bp, y0, max_iter);
        iters_used += p1.newton_iters;
        if (!p1.interior_found)
        {
            std::ostringstream msg;
            msg << "phase-I minimum relaxation " << p1.best_slack_violation;
            const SolveStatus st = p1.iteration_cap_hit ? SolveStatus::max_iter : SolveStatus::infeasible;
            return finish(p1.y, st, iters_used, msg.str());
        }
        y0 = p1.y;
    }

    BarrierResult r = barrier_minimize(bp, y0, tol, std::max(1, max_iter - iters_used));
    iters_used += r.newton_iters;
    return finish(r.y, r.iteration_cap_hit ? SolveStatus::max_iter : SolveStatus::optimal, iters_used, "");
}

} // namespace crasim
