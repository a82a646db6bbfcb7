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

#ifndef CRASIM_CHANNEL_HPP
#define CRASIM_CHANNEL_HPP

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "crasim/em_modes.hpp"
#include "crasim/rng.hpp"

namespace crasim
{

using cplx = std::complex<double>;

/// M uniformly spaced angular samples on [0, pi).
struct AngleGrid
{
    int M = 0;

    explicit AngleGrid(int samples);

    double sample(int m) const;
    double spacing() const;
};

// Index of the grid sample nearest to theta; distance ties resolve to the
// lower index. theta must lie in [0, pi).
int quantize_angle(double theta, const AngleGrid &grid);

// Half-wavelength ULA steering vector, entry n = exp(j*pi*(n-1)*cos(theta)).
Eigen::VectorXcd steering_vector(double theta, int N);

// Distance-power path loss 10^(-C0/10) * (r/D0)^(-kappa).
double path_loss(double r_meters, double kappa, double c0_db, double d0_meters);

/// One propagation path: quantized direction, complex amplitude, steering.
struct PropagationPath
{
    double angle = 0.0;
    int angle_index = 0;
    cplx amplitude{0.0, 0.0};
    Eigen::VectorXcd steering;
};

// Second-order statistics of a random 2x2 polarization scattering matrix:
// vec(HH, VH, HV, VV) is drawn zero-mean complex Gaussian with this
// covariance.
class ScatteringModel
{
  public:
    explicit ScatteringModel(Eigen::Matrix4cd covariance);

    // The reference covariance template with correlation parameter eps
    // filling the off-diagonal slots, optionally scaled.
    static ScatteringModel reference_template(cplx eps, double scale = 1.0);

    static ScatteringModel zero() { return ScatteringModel(Eigen::Matrix4cd::Zero()); }

    const Eigen::Matrix4cd &covariance() const { return covariance_; }
    const Eigen::Matrix4cd &factor() const { return factor_; }

  private:
    Eigen::Matrix4cd covariance_;
    Eigen::Matrix4cd factor_; // covariance = factor * factor^H
};

// Draws a 2x2 scattering matrix whose vec has the model covariance.
Eigen::Matrix2cd sample_scattering_matrix(Rng &rng, const ScatteringModel &model);

enum class ChannelKind
{
    bob,
    eve,
    target,
    clutter
};

// Factored compound channel. Bob channels map the 2MN stacked EM gains to 2L
// per-path polarization pairs (rotation * scattering * spatial^H * angular^H);
// eve is the same one-way map for the single target path without scattering;
// target and clutter are the two-way sandwich angular*spatial*scattering*
// spatial^H*angular^H of size 2MN x 2MN. The dense matrix is never formed
// outside of test-scale materialization.
class CompoundChannel
{
  public:
    static CompoundChannel bob(const AngleGrid &grid, int N, std::vector<PropagationPath> paths,
                               std::vector<Eigen::Matrix2cd> scattering, Eigen::Matrix2d rotation);

    static CompoundChannel eve(const AngleGrid &grid, int N, PropagationPath path, Eigen::Matrix2d rotation);

    // kind must be target or clutter.
    static CompoundChannel point_scatterer(ChannelKind kind, const AngleGrid &grid, int N, PropagationPath path,
                                           Eigen::Matrix2cd scattering);

    ChannelKind kind() const { return kind_; }
    int num_angles() const { return M_; }
    int num_antennas() const { return N_; }
    int num_paths() const { return int(paths_.size()); }
    const std::vector<PropagationPath> &paths() const { return paths_; }
    const std::vector<Eigen::Matrix2cd> &scattering() const { return scattering_; }
    const Eigen::Matrix2d &rotation() const { return rotation_; }

    // Logical dense dimensions (rows, cols).
    std::pair<int, int> dims() const;

    // y = M x for a stacked EM-gain-domain vector x of length 2MN (bob/eve)
    // or the full two-way map (target/clutter).
    Eigen::VectorXcd apply(const Eigen::VectorXcd &x) const;

    // y = M^H x.
    Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd &x) const;

    // Dense materialization per the compound-channel factorization; only
    // permitted for 2MN <= 256.
    Eigen::MatrixXcd dense() const;

    // --- contraction helpers used by metrics and the optimizer ---

    // Bob/eve: the effective 1xN row p^T M F_em as a column vector h with
    // h[n] = sum_l conj(amp_l a_l[n]) (p^T Q Phi_l) g_n(m_l).
    Eigen::VectorXcd effective_row(const Eigen::Vector2d &rx_pol, const EmBeamformer &em_tx) const;

    // Target/clutter: receive-side factor R (N x 2), R[i,:] = amp*a[i]*u_i^T
    // where u_i is the receive EM gain pair at the path direction.
    Eigen::MatrixXcd receive_factor(const EmBeamformer &em_rx) const;

    // Target/clutter: transmit-side factor G (2 x N), G[:,n] =
    // conj(amp*a[n]) * g_n at the path direction.
    Eigen::MatrixXcd transmit_factor(const EmBeamformer &em_tx) const;

    // Target/clutter: the N x N through matrix W^T M F = R * Phi * G.
    Eigen::MatrixXcd through_matrix(const EmBeamformer &em_tx, const EmBeamformer &em_rx) const;

  private:
    CompoundChannel(ChannelKind kind, const AngleGrid &grid, int N, std::vector<PropagationPath> paths,
                    std::vector<Eigen::Matrix2cd> scattering, Eigen::Matrix2d rotation);

    // One-way operator rows: (T x)_l = sum_n conj(amp_l a_l[n]) x_n(m_l).
    Eigen::VectorXcd one_way(const Eigen::VectorXcd &x) const;
    Eigen::VectorXcd one_way_adjoint(const Eigen::VectorXcd &t) const;

    ChannelKind kind_;
    int M_;
    int N_;
    std::vector<PropagationPath> paths_;
    std::vector<Eigen::Matrix2cd> scattering_;
    Eigen::Matrix2d rotation_;
};

/// Parameters of the distance-power path-loss law.
struct PathLossParams
{
    double kappa = 2.5;
    double c0_db = 30.0;
    double d0_meters = 1.0;
};

/// Polar position relative to the array origin.
struct PolarPosition
{
    double angle = 0.0;
    double range_m = 0.0;
};

/// Knobs for the synthetic multipath generator standing in for an external
/// channel tool: a geometric first path plus random scatter paths.
struct BobChannelOptions
{
    ScatteringModel scattering = ScatteringModel::zero();
    Eigen::Matrix2d rotation = Eigen::Matrix2d::Identity();
    PathLossParams path_loss;
    double sector_min = 0.5235987755982988; // pi/6
    double sector_max = 2.6179938779914944; // 5*pi/6
    double scatter_extra_range_min = 0.1;   // fraction of the direct range
    double scatter_extra_range_max = 0.6;
    double scatter_excess_loss_db_min = 5.0;
    double scatter_excess_loss_db_max = 15.0;
};

// L-path downlink channel: the first path points at the true position, the
// rest are random scatter paths inside the angular sector. Amplitudes are
// sqrt(power path loss) with uniform phase; scatter paths carry an extra
// excess loss. All randomness comes from rng, so equal seeds replay exactly.
CompoundChannel generate_bob_channel(Rng &rng, const PolarPosition &position, int L, const AngleGrid &grid, int N,
                                     const BobChannelOptions &options);

/// Everything the metrics and optimizer need about one scenario realization.
struct ChannelSet
{
    int num_angles = 0;
    int num_antennas = 0;
    std::vector<CompoundChannel> bobs;
    std::vector<Eigen::Vector2d> bob_rx_pol;
    std::vector<CompoundChannel> clutter;
    std::vector<CompoundChannel> eve_target; // [0] = eve, [1] = target
    Eigen::Vector2d eve_rx_pol = Eigen::Vector2d::Zero();

    const CompoundChannel &eve() const { return eve_target[0]; }
    const CompoundChannel &target() const { return eve_target[1]; }
    int num_bobs() const { return int(bobs.size()); }
    int num_clutter() const { return int(clutter.size()); }
};

// Structured-text snapshot of a channel set (complex entries as re/im
// pairs); load_channels(save_channels(s)) reproduces s exactly.
std::string save_channels(const ChannelSet &set);
ChannelSet load_channels(const std::string &text);

} // namespace crasim

#endif
