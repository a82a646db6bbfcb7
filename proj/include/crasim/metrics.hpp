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

#ifndef CRASIM_METRICS_HPP
#define CRASIM_METRICS_HPP

#include <Eigen/Dense>
#include <optional>

#include "crasim/channel.hpp"
#include "crasim/em_modes.hpp"

namespace crasim
{

/// Receiver noise powers in watts.
struct NoiseModel
{
    double sigma2_bob = 0.0;
    double sigma2_eve = 0.0;
    double sigma2_radar = 0.0;

    NoiseModel() = default;
    NoiseModel(double bob, double eve, double radar);
};

// The joint decision variables: EM mode selections on both sides, the
// digital precoder (first K columns communication, rest radar), the digital
// combiner, plus the fractional-programming auxiliary.
struct BeamformerState
{
    SelectionMatrix sel_tx;
    SelectionMatrix sel_rx;
    Eigen::MatrixXcd digital_precoder; // N x N
    Eigen::VectorXcd digital_combiner; // N
    double gamma = 0.0;
    bool feasible = false;

    BeamformerState(SelectionMatrix tx, SelectionMatrix rx, Eigen::MatrixXcd precoder, Eigen::VectorXcd combiner,
                    double gamma_value);
};

// Downlink SINR of user k (0-based), linear scale.
double bob_sinr(int k, const ChannelSet &channels, const EmBeamformer &em_tx, const BeamformerState &state,
                const NoiseModel &noise);

// Eavesdropping SINR on user k's stream, linear scale.
double eve_sinr(int k, const ChannelSet &channels, const EmBeamformer &em_tx, const BeamformerState &state,
                const NoiseModel &noise);

// Radar output SCNR for the current combiner, linear scale. Evaluated from
// the rank-2 factored through matrices, never forming 2MN x 2MN products.
double radar_scnr(const ChannelSet &channels, const EmBeamformer &em_tx, const EmBeamformer &em_rx,
                  const BeamformerState &state, const NoiseModel &noise);

// Squared Frobenius norm of the digital precoder.
double transmit_power(const BeamformerState &state);

// Numerator and denominator quadratic kernels of the radar SCNR in combiner
// space: scnr = w^H B1 w / w^H B2 w with B2 = clutter term + sigma_r^2 I.
struct ScnrKernels
{
    Eigen::MatrixXcd signal;       // B1, N x N Hermitian PSD
    Eigen::MatrixXcd interference; // B2, N x N Hermitian PD
};

ScnrKernels scnr_kernels(const ChannelSet &channels, const EmBeamformer &em_tx, const EmBeamformer &em_rx,
                         const Eigen::MatrixXcd &digital_precoder, const NoiseModel &noise);

inline double lin_to_db(double v) { return 10.0 * std::log10(v); }
inline double db_to_lin(double db) { return std::pow(10.0, db / 10.0); }
inline double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

} // namespace crasim

#endif
