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

#include "crasim/metrics.hpp"

#include <stdexcept>

namespace crasim
{

NoiseModel::NoiseModel(double bob, double eve, double radar) : sigma2_bob(bob), sigma2_eve(eve), sigma2_radar(radar)
{
    if (!(bob > 0.0) || !(eve > 0.0) || !(radar > 0.0))
        throw std::invalid_argument("NoiseModel: noise powers must be positive");
}

BeamformerState::BeamformerState(SelectionMatrix tx, SelectionMatrix rx, Eigen::MatrixXcd precoder,
                                 Eigen::VectorXcd combiner, double gamma_value)
    : sel_tx(std::move(tx)), sel_rx(std::move(rx)), digital_precoder(std::move(precoder)),
      digital_combiner(std::move(combiner)), gamma(gamma_value)
{
    const Eigen::Index n = digital_precoder.rows();
    if (digital_precoder.cols() != n || digital_combiner.size() != n)
        throw std::invalid_argument("BeamformerState: precoder must be N x N and combiner length N");
    if (sel_tx.num_antennas() != int(n) || sel_rx.num_antennas() != int(n))
        throw std::invalid_argument("BeamformerState: selection matrices must have N columns");
    if (gamma < 0.0)
        throw std::invalid_argument("BeamformerState: gamma must be nonnegative");
}

namespace
{
double stream_sinr(const Eigen::VectorXcd &row, const Eigen::MatrixXcd &precoder, int k, double sigma2)
{
    const Eigen::RowVectorXcd gains = row.transpose() * precoder;
    double signal = std::norm(gains(k));
    double interference = 0.0;
    for (int j = 0; j < gains.size(); ++j)
        if (j != k)
            interference += std::norm(gains(j));
    return signal / (interference + sigma2);
}
} // namespace

double bob_sinr(int k, const ChannelSet &channels, const EmBeamformer &em_tx, const BeamformerState &state,
                const NoiseModel &noise)
{
    if (k < 0 || k >= channels.num_bobs())
        throw std::out_of_range("bob_sinr: user index out of range");
    const Eigen::VectorXcd row =
        channels.bobs[std::size_t(k)].effective_row(channels.bob_rx_pol[std::size_t(k)], em_tx);
    return stream_sinr(row, state.digital_precoder, k, noise.sigma2_bob);
}

double eve_sinr(int k, const ChannelSet &channels, const EmBeamformer &em_tx, const BeamformerState &state,
                const NoiseModel &noise)
{
    if (k < 0 || k >= channels.num_bobs())
        throw std::out_of_range("eve_sinr: user index out of range");
    const Eigen::VectorXcd row = channels.eve().effective_row(channels.eve_rx_pol, em_tx);
    return stream_sinr(row, state.digital_precoder, k, noise.sigma2_eve);
}

ScnrKernels scnr_kernels(const ChannelSet &channels, const EmBeamformer &em_tx, const EmBeamformer &em_rx,
                         const Eigen::MatrixXcd &digital_precoder, const NoiseModel &noise)
{
    const Eigen::Index n = digital_precoder.rows();
    ScnrKernels k;
    const Eigen::MatrixXcd t = channels.target().through_matrix(em_tx, em_rx) * digital_precoder;
    k.signal = t * t.adjoint();
    k.interference = noise.sigma2_radar * Eigen::MatrixXcd::Identity(n, n);
    for (const auto &cl : channels.clutter)
    {
        const Eigen::MatrixXcd c = cl.through_matrix(em_tx, em_rx) * digital_precoder;
        k.interference += c * c.adjoint();
    }
    return k;
}

double radar_scnr(const ChannelSet &channels, const EmBeamformer &em_tx, const EmBeamformer &em_rx,
                  const BeamformerState &state, const NoiseModel &noise)
{
    const Eigen::VectorXcd &w = state.digital_combiner;
    if (w.norm() == 0.0)
        throw std::invalid_argument("radar_scnr: combiner must be nonzero");
    const ScnrKernels k = scnr_kernels(channels, em_tx, em_rx, state.digital_precoder, noise);
    const double num = std::real(cplx(w.adjoint() * k.signal * w));
    const double den = std::real(cplx(w.adjoint() * k.interference * w));
    return num / den;
}

double transmit_power(const BeamformerState &state) { return state.digital_precoder.squaredNorm(); }

} // namespace crasim
