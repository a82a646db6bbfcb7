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

#include "crasim/channel.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace crasim
{

namespace
{
constexpr double kPi = 3.141592653589793238462643383279;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b)
{
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}
} // namespace

AngleGrid::AngleGrid(int samples) : M(samples)
{
    if (samples < 1)
        throw std::invalid_argument("AngleGrid: need at least one sample");
}

double AngleGrid::sample(int m) const
{
    if (m < 0 || m >= M)
        throw std::out_of_range("AngleGrid::sample: index out of range");
    return m * kPi / M;
}

double AngleGrid::spacing() const { return kPi / M; }

int quantize_angle(double theta, const AngleGrid &grid)
{
    if (!(theta >= 0.0) || !(theta < kPi))
        throw std::invalid_argument("quantize_angle: theta must lie in [0, pi)");
    const double step = grid.spacing();
    int lo = int(theta / step);
    if (lo > grid.M - 1)
        lo = grid.M - 1;
    if (lo == grid.M - 1)
        return lo;
    const double d_lo = theta - lo * step;
    const double d_hi = (lo + 1) * step - theta;
    return d_lo <= d_hi ? lo : lo + 1;
}

Eigen::VectorXcd steering_vector(double theta, int N)
{
    if (N < 1)
        throw std::invalid_argument("steering_vector: need N >= 1");
    Eigen::VectorXcd a(N);
    const double c = std::cos(theta);
    for (int n = 0; n < N; ++n)
    {
        const double phase = kPi * n * c;
        a(n) = cplx{std::cos(phase), std::sin(phase)};
    }
    return a;
}

double path_loss(double r_meters, double kappa, double c0_db, double d0_meters)
{
    if (!(r_meters > 0.0))
        throw std::invalid_argument("path_loss: distance must be positive");
    if (!(d0_meters > 0.0))
        throw std::invalid_argument("path_loss: reference distance must be positive");
    return std::pow(10.0, -c0_db / 10.0) * std::pow(r_meters / d0_meters, -kappa);
}

ScatteringModel::ScatteringModel(Eigen::Matrix4cd covariance) : covariance_(std::move(covariance))
{
    const double scale = std::max(1.0, covariance_.cwiseAbs().maxCoeff());
    if ((covariance_ - covariance_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("ScatteringModel: covariance must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(covariance_);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("ScatteringModel: eigen factorization failed");
    if (es.eigenvalues().minCoeff() < -1e-10 * scale)
        throw std::invalid_argument("ScatteringModel: covariance is not positive semidefinite");
    Eigen::Vector4d lam = es.eigenvalues().cwiseMax(0.0);
    factor_ = es.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

ScatteringModel ScatteringModel::reference_template(cplx eps, double scale)
{
    const cplx ec = std::conj(eps);
    Eigen::Matrix4cd cov;
    cov << cplx(0.1), 0.06 * eps, 0.05 * eps, 0.04 * eps, //
        0.06 * ec, cplx(0.3), 0.03 * eps, 0.03 * eps,     //
        0.05 * ec, 0.03 * ec, cplx(0.1), 0.03 * eps,      //
        0.04 * ec, 0.03 * ec, 0.03 * ec, cplx(1.0);
    return ScatteringModel(cov * scale);
}

Eigen::Matrix2cd sample_scattering_matrix(Rng &rng, const ScatteringModel &model)
{
    Eigen::Vector4cd z;
    for (int i = 0; i < 4; ++i)
        z(i) = rng.cgaussian();
    const Eigen::Vector4cd v = model.factor() * z;
    Eigen::Matrix2cd phi;
    phi << v(0), v(2), // vec order (HH, VH, HV, VV), column-major
        v(1), v(3);
    return phi;
}

CompoundChannel::CompoundChannel(ChannelKind kind, const AngleGrid &grid, int N, std::vector<PropagationPath> paths,
                                 std::vector<Eigen::Matrix2cd> scattering, Eigen::Matrix2d rotation)
    : kind_(kind), M_(grid.M), N_(N), paths_(std::move(paths)), scattering_(std::move(scattering)),
      rotation_(std::move(rotation))
{
    if (N_ < 1)
        throw std::invalid_argument("CompoundChannel: need at least one antenna");
    if (paths_.empty())
        throw std::invalid_argument("CompoundChannel: need at least one path");
    for (const auto &p : paths_)
    {
        if (p.steering.size() != N_)
            throw std::invalid_argument("CompoundChannel: steering vector length must equal N");
        for (int n = 0; n < N_; ++n)
            if (std::abs(std::abs(p.steering(n)) - 1.0) > 1e-9)
                throw std::invalid_argument("CompoundChannel: steering entries must be unit modulus");
        if (p.angle_index != quantize_angle(p.angle, grid))
            throw std::invalid_argument("CompoundChannel: angle_index must quantize the path angle");
    }
    for (const auto &phi : scattering_)
        if (!phi.allFinite())
            throw std::invalid_argument("CompoundChannel: scattering entries must be finite");
    if ((rotation_.transpose() * rotation_ - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("CompoundChannel: rotation must be orthonormal");
}

CompoundChannel CompoundChannel::bob(const AngleGrid &grid, int N, std::vector<PropagationPath> paths,
                                     std::vector<Eigen::Matrix2cd> scattering, Eigen::Matrix2d rotation)
{
    if (scattering.size() != paths.size())
        throw std::invalid_argument("CompoundChannel::bob: one scattering matrix per path required");
    return CompoundChannel(ChannelKind::bob, grid, N, std::move(paths), std::move(scattering), std::move(rotation));
}

CompoundChannel CompoundChannel::eve(const AngleGrid &grid, int N, PropagationPath path, Eigen::Matrix2d rotation)
{
    return CompoundChannel(ChannelKind::eve, grid, N, {std::move(path)}, {}, std::move(rotation));
}

CompoundChannel CompoundChannel::point_scatterer(ChannelKind kind, const AngleGrid &grid, int N, PropagationPath path,
                                                 Eigen::Matrix2cd scattering)
{
    if (kind != ChannelKind::target && kind != ChannelKind::clutter)
        throw std::invalid_argument("CompoundChannel::point_scatterer: kind must be target or clutter");
    return CompoundChannel(kind, grid, N, {std::move(path)}, {std::move(scattering)}, Eigen::Matrix2d::Identity());
}

std::pair<int, int> CompoundChannel::dims() const
{
    const int cols = 2 * M_ * N_;
    switch (kind_)
    {
    case ChannelKind::bob:
        return {2 * num_paths(), cols};
    case ChannelKind::eve:
        return {2, cols};
    default:
        return {cols, cols};
    }
}

Eigen::VectorXcd CompoundChannel::one_way(const Eigen::VectorXcd &x) const
{
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(2 * num_paths());
    for (int l = 0; l < num_paths(); ++l)
    {
        const auto &p = paths_[std::size_t(l)];
        cplx t0{0.0, 0.0}, t1{0.0, 0.0};
        for (int n = 0; n < N_; ++n)
        {
            const cplx c = std::conj(p.amplitude * p.steering(n));
            const Eigen::Index base = Eigen::Index(2 * M_) * n + 2 * p.angle_index;
            t0 += c * x(base);
            t1 += c * x(base + 1);
        }
        t(2 * l) = t0;
        t(2 * l + 1) = t1;
    }
    return t;
}

Eigen::VectorXcd CompoundChannel::one_way_adjoint(const Eigen::VectorXcd &t) const
{
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(Eigen::Index(2 * M_) * N_);
    for (int l = 0; l < num_paths(); ++l)
    {
        const auto &p = paths_[std::size_t(l)];
        for (int n = 0; n < N_; ++n)
        {
            const cplx c = p.amplitude * p.steering(n);
            const Eigen::Index base = Eigen::Index(2 * M_) * n + 2 * p.angle_index;
            x(base) += c * t(2 * l);
            x(base + 1) += c * t(2 * l + 1);
        }
    }
    return x;
}

Eigen::VectorXcd CompoundChannel::apply(const Eigen::VectorXcd &x) const
{
    if (x.size() != Eigen::Index(2 * M_) * N_)
        throw std::invalid_argument("CompoundChannel::apply: input length must be 2MN");
    const Eigen::Matrix2cd q = rotation_.cast<cplx>();
    switch (kind_)
    {
    case ChannelKind::bob:
    {
        Eigen::VectorXcd t = one_way(x);
        Eigen::VectorXcd out(2 * num_paths());
        for (int l = 0; l < num_paths(); ++l)
            out.segment<2>(2 * l) = q * (scattering_[std::size_t(l)] * t.segment<2>(2 * l));
        return out;
    }
    case ChannelKind::eve:
        return q * one_way(x);
    default:
    {
        const Eigen::Vector2cd t = one_way(x);
        return one_way_adjoint(scattering_.front() * t);
    }
    }
}

Eigen::VectorXcd CompoundChannel::apply_adjoint(const Eigen::VectorXcd &y) const
{
    const Eigen::Matrix2cd qt = rotation_.transpose().cast<cplx>();
    switch (kind_)
    {
    case ChannelKind::bob:
    {
        if (y.size() != 2 * num_paths())
            throw std::invalid_argument("CompoundChannel::apply_adjoint: input length must be 2L");
        Eigen::VectorXcd z(2 * num_paths());
        for (int l = 0; l < num_paths(); ++l)
            z.segment<2>(2 * l) = scattering_[std::size_t(l)].adjoint() * (qt * y.segment<2>(2 * l));
        return one_way_adjoint(z);
    }
    case ChannelKind::eve:
    {
        if (y.size() != 2)
            throw std::invalid_argument("CompoundChannel::apply_adjoint: input length must be 2");
        return one_way_adjoint(qt * y);
    }
    default:
    {
        if (y.size() != Eigen::Index(2 * M_) * N_)
            throw std::invalid_argument("CompoundChannel::apply_adjoint: input length must be 2MN");
        const Eigen::Vector2cd t = one_way(y);
        return one_way_adjoint(scattering_.front().adjoint() * t);
    }
    }
}

Eigen::MatrixXcd CompoundChannel::dense() const
{
    const int twoMN = 2 * M_ * N_;
    if (twoMN > 256)
        throw std::runtime_error("CompoundChannel::dense: materialization restricted to 2MN <= 256");
    const int L = num_paths();

    Eigen::MatrixXcd H_A = Eigen::MatrixXcd::Zero(M_, L);
    for (int l = 0; l < L; ++l)
        H_A(paths_[std::size_t(l)].angle_index, l) = 1.0;
    const Eigen::MatrixXcd I2 = Eigen::MatrixXcd::Identity(2, 2);
    const Eigen::MatrixXcd IN = Eigen::MatrixXcd::Identity(N_, N_);
    const Eigen::MatrixXcd HA_bar = kron(kron(IN, H_A), I2); // 2MN x 2LN

    Eigen::VectorXcd hs_vec(Eigen::Index(L) * N_); // vec(H_S^T)
    for (int n = 0; n < N_; ++n)
        for (int l = 0; l < L; ++l)
        {
            const auto &p = paths_[std::size_t(l)];
            hs_vec(Eigen::Index(n) * L + l) = p.amplitude * p.steering(n);
        }
    Eigen::MatrixXcd CS = kron(Eigen::MatrixXcd::Ones(N_, 1), Eigen::MatrixXcd::Identity(L, L));
    Eigen::MatrixXcd HS_bar = kron(hs_vec.asDiagonal() * CS, I2); // 2LN x 2L

    const Eigen::MatrixXcd one_way_dense = HS_bar.adjoint() * HA_bar.adjoint(); // 2L x 2MN

    switch (kind_)
    {
    case ChannelKind::bob:
    {
        Eigen::MatrixXcd phi_bar = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
        for (int l = 0; l < L; ++l)
            phi_bar.block<2, 2>(2 * l, 2 * l) = scattering_[std::size_t(l)];
        const Eigen::MatrixXcd q_bar = kron(Eigen::MatrixXcd::Identity(L, L), rotation_.cast<cplx>());
        return q_bar * phi_bar * one_way_dense;
    }
    case ChannelKind::eve:
        return rotation_.cast<cplx>() * one_way_dense;
    default:
        return one_way_dense.adjoint() * scattering_.front() * one_way_dense;
    }
}

Eigen::VectorXcd CompoundChannel::effective_row(const Eigen::Vector2d &rx_pol, const EmBeamformer &em_tx) const
{
    if (kind_ != ChannelKind::bob && kind_ != ChannelKind::eve)
        throw std::logic_error("CompoundChannel::effective_row: only defined for bob/eve channels");
    if (em_tx.num_antennas() != N_ || em_tx.num_angles() != M_)
        throw std::invalid_argument("CompoundChannel::effective_row: beamformer dimensions mismatch");

    const Eigen::RowVector2cd p_rot = (rx_pol.transpose() * rotation_).cast<cplx>();
    Eigen::VectorXcd h = Eigen::VectorXcd::Zero(N_);
    for (int l = 0; l < num_paths(); ++l)
    {
        const auto &path = paths_[std::size_t(l)];
        const Eigen::RowVector2cd q =
            kind_ == ChannelKind::bob ? Eigen::RowVector2cd(p_rot * scattering_[std::size_t(l)]) : p_rot;
        for (int n = 0; n < N_; ++n)
        {
            const Eigen::Vector2d g = em_tx.gain_at(n, path.angle_index);
            h(n) += std::conj(path.amplitude * path.steering(n)) * (q(0) * g(0) + q(1) * g(1));
        }
    }
    return h;
}

Eigen::MatrixXcd CompoundChannel::receive_factor(const EmBeamformer &em_rx) const
{
    if (kind_ != ChannelKind::target && kind_ != ChannelKind::clutter)
        throw std::logic_error("CompoundChannel::receive_factor: only defined for target/clutter channels");
    if (em_rx.num_antennas() != N_ || em_rx.num_angles() != M_)
        throw std::invalid_argument("CompoundChannel::receive_factor: beamformer dimensions mismatch");
    const auto &p = paths_.front();
    Eigen::MatrixXcd r(N_, 2);
    for (int i = 0; i < N_; ++i)
        r.row(i) = (p.amplitude * p.steering(i)) * em_rx.gain_at(i, p.angle_index).transpose().cast<cplx>();
    return r;
}

Eigen::MatrixXcd CompoundChannel::transmit_factor(const EmBeamformer &em_tx) const
{
    if (kind_ != ChannelKind::target && kind_ != ChannelKind::clutter)
        throw std::logic_error("CompoundChannel::transmit_factor: only defined for target/clutter channels");
    if (em_tx.num_antennas() != N_ || em_tx.num_angles() != M_)
        throw std::invalid_argument("CompoundChannel::transmit_factor: beamformer dimensions mismatch");
    const auto &p = paths_.front();
    Eigen::MatrixXcd g(2, N_);
    for (int n = 0; n < N_; ++n)
        g.col(n) = std::conj(p.amplitude * p.steering(n)) * em_tx.gain_at(n, p.angle_index).cast<cplx>();
    return g;
}

Eigen::MatrixXcd CompoundChannel::through_matrix(const EmBeamformer &em_tx, const EmBeamformer &em_rx) const
{
    return receive_factor(em_rx) * scattering_.front() * transmit_factor(em_tx);
}

CompoundChannel generate_bob_channel(Rng &rng, const PolarPosition &position, int L, const AngleGrid &grid, int N,
                                     const BobChannelOptions &options)
{
    if (L < 1)
        throw std::invalid_argument("generate_bob_channel: need at least one path");
    std::vector<PropagationPath> paths;
    std::vector<Eigen::Matrix2cd> scattering;
    paths.reserve(std::size_t(L));
    scattering.reserve(std::size_t(L));
    const auto &pl = options.path_loss;

    for (int l = 0; l < L; ++l)
    {
        PropagationPath p;
        double range = position.range_m;
        double excess_db = 0.0;
        if (l == 0)
        {
            p.angle = position.angle;
        }
        else
        {
            p.angle = rng.uniform(options.sector_min, options.sector_max);
            range *= 1.0 + rng.uniform(options.scatter_extra_range_min, options.scatter_extra_range_max);
            excess_db = rng.uniform(options.scatter_excess_loss_db_min, options.scatter_excess_loss_db_max);
        }
        p.angle_index = quantize_angle(p.angle, grid);
        const double gain = std::sqrt(path_loss(range, pl.kappa, pl.c0_db, pl.d0_meters)) //
                            * std::pow(10.0, -excess_db / 20.0);
        p.amplitude = gain * rng.unit_phase();
        p.steering = steering_vector(p.angle, N);
        paths.push_back(std::move(p));
        scattering.push_back(sample_scattering_matrix(rng, options.scattering));
    }
    return CompoundChannel::bob(grid, N, std::move(paths), std::move(scattering), options.rotation);
}

// --- structured-text snapshot -------------------------------------------

namespace
{
void write_cplx(std::ostream &os, const cplx &v) { os << v.real() << ' ' << v.imag(); }

cplx read_cplx(std::istream &is)
{
    double re = 0.0, im = 0.0;
    if (!(is >> re >> im))
        throw std::runtime_error("load_channels: truncated complex value");
    return {re, im};
}

void write_channel(std::ostream &os, const CompoundChannel &ch)
{
    static const char *names[] = {"bob", "eve", "target", "clutter"};
    os << names[int(ch.kind())] << ' ' << ch.num_paths() << '\n';
    os << "rotation " << ch.rotation()(0, 0) << ' ' << ch.rotation()(0, 1) << ' ' << ch.rotation()(1, 0) << ' '
       << ch.rotation()(1, 1) << '\n';
    for (const auto &p : ch.paths())
    {
        os << "path " << p.angle << ' ' << p.angle_index << ' ';
        write_cplx(os, p.amplitude);
        for (int n = 0; n < p.steering.size(); ++n)
        {
            os << ' ';
            write_cplx(os, p.steering(n));
        }
        os << '\n';
    }
    for (const auto &phi : ch.scattering())
    {
        os << "scattering";
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 2; ++r)
            {
                os << ' ';
                write_cplx(os, phi(r, c));
            }
        os << '\n';
    }
}

CompoundChannel read_channel(std::istream &is, const AngleGrid &grid, int N)
{
    std::string kind_name;
    int L = 0;
    if (!(is >> kind_name >> L) || L < 1)
        throw std::runtime_error("load_channels: malformed channel header");

    std::string tag;
    Eigen::Matrix2d rot;
    if (!(is >> tag) || tag != "rotation" || !(is >> rot(0, 0) >> rot(0, 1) >> rot(1, 0) >> rot(1, 1)))
        throw std::runtime_error("load_channels: malformed rotation");

    std::vector<PropagationPath> paths;
    for (int l = 0; l < L; ++l)
    {
        PropagationPath p;
        if (!(is >> tag) || tag != "path" || !(is >> p.angle >> p.angle_index))
            throw std::runtime_error("load_channels: malformed path");
        p.amplitude = read_cplx(is);
        p.steering.resize(N);
        for (int n = 0; n < N; ++n)
            p.steering(n) = read_cplx(is);
        paths.push_back(std::move(p));
    }

    const int num_scatter = kind_name == "bob" ? L : (kind_name == "eve" ? 0 : 1);
    std::vector<Eigen::Matrix2cd> scattering;
    for (int s = 0; s < num_scatter; ++s)
    {
        if (!(is >> tag) || tag != "scattering")
            throw std::runtime_error("load_channels: malformed scattering block");
        Eigen::Matrix2cd phi;
        for (int c = 0; c < 2; ++c)
            for (int r = 0; r < 2; ++r)
                phi(r, c) = read_cplx(is);
        scattering.push_back(phi);
    }

    if (kind_name == "bob")
        return CompoundChannel::bob(grid, N, std::move(paths), std::move(scattering), rot);
    if (kind_name == "eve")
        return CompoundChannel::eve(grid, N, std::move(paths.front()), rot);
    const ChannelKind kind = kind_name == "target" ? ChannelKind::target : ChannelKind::clutter;
    if (kind_name != "target" && kind_name != "clutter")
        throw std::runtime_error("load_channels: unknown channel kind " + kind_name);
    return CompoundChannel::point_scatterer(kind, grid, N, std::move(paths.front()), scattering.front());
}
} // namespace

std::string save_channels(const ChannelSet &set)
{
    std::ostringstream os;
    os << std::setprecision(17);
    os << "channelset " << set.num_angles << ' ' << set.num_antennas << ' ' << set.num_bobs() << ' '
       << set.num_clutter() << '\n';
    os << "eve_rx_pol " << set.eve_rx_pol(0) << ' ' << set.eve_rx_pol(1) << '\n';
    for (int k = 0; k < set.num_bobs(); ++k)
        os << "bob_rx_pol " << set.bob_rx_pol[std::size_t(k)](0) << ' ' << set.bob_rx_pol[std::size_t(k)](1) << '\n';
    for (const auto &b : set.bobs)
        write_channel(os, b);
    write_channel(os, set.eve());
    write_channel(os, set.target());
    for (const auto &c : set.clutter)
        write_channel(os, c);
    return os.str();
}

ChannelSet load_channels(const std::string &text)
{
    std::istringstream is(text);
    std::string tag;
    int M = 0, N = 0, K = 0, C = 0;
    if (!(is >> tag >> M >> N >> K >> C) || tag != "channelset")
        throw std::runtime_error("load_channels: malformed header");
    const AngleGrid grid(M);

    ChannelSet set;
    set.num_angles = M;
    set.num_antennas = N;
    if (!(is >> tag) || tag != "eve_rx_pol" || !(is >> set.eve_rx_pol(0) >> set.eve_rx_pol(1)))
        throw std::runtime_error("load_channels: malformed eve polarization");
    for (int k = 0; k < K; ++k)
    {
        Eigen::Vector2d p;
        if (!(is >> tag) || tag != "bob_rx_pol" || !(is >> p(0) >> p(1)))
            throw std::runtime_error("load_channels: malformed bob polarization");
        set.bob_rx_pol.push_back(p);
    }
    for (int k = 0; k < K; ++k)
        set.bobs.push_back(read_channel(is, grid, N));
    set.eve_target.push_back(read_channel(is, grid, N));
    set.eve_target.push_back(read_channel(is, grid, N));
    for (int c = 0; c < C; ++c)
        set.clutter.push_back(read_channel(is, grid, N));
    return set;
}

} // namespace crasim
