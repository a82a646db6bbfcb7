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

#ifndef CRASIM_DETECTOR_HPP
#define CRASIM_DETECTOR_HPP

#include <vector>

#include "crasim/optimizer.hpp"

namespace crasim
{

struct RocPoint
{
    double pfa = 0.0;
    double pd = 0.0;
    double threshold = 0.0;
};

/// Random scattering statistics for the detection trials.
struct DetectionModel
{
    ScatteringModel target = ScatteringModel::zero();
    ScatteringModel clutter = ScatteringModel::zero();
    int block_len = 64; // symbols averaged into one detection statistic
};

// Monte Carlo energy detector on the combined radar output. Each trial draws
// fresh target (H1 only) and clutter scattering plus per-symbol data and
// noise; the statistic is the block-averaged |y|^2. Thresholds come from the
// empirical H0 quantiles at each requested false-alarm rate, so pd is
// nondecreasing in pfa by construction.
std::vector<RocPoint> roc_curve(const DesignProblem &problem, const BeamformerState &state,
                                const DetectionModel &model, int n_trials, std::vector<double> pfa_grid, Rng &rng);

} // namespace crasim

#endif
