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

#ifndef CRASIM_EM_MODES_HPP
#define CRASIM_EM_MODES_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace crasim
{

/// Single-antenna polarization gain pair (horizontal, vertical), unit power.
struct PolarizationState
{
    double h_gain = 1.0;
    double v_gain = 0.0;

    PolarizationState() = default;
    PolarizationState(double h, double v);

    Eigen::Vector2d vec() const { return {h_gain, v_gain}; }
};

/// Angular gains across M uniformly sampled directions, nonnegative, unit norm.
struct RadiationPattern
{
    Eigen::VectorXd gains;

    explicit RadiationPattern(Eigen::VectorXd g);
};

// Candidate EM modes for one antenna: every pattern paired with every
// polarization state. full_dict = kron(pattern_dict, pol_dict), one unit-norm
// column of length 2M per mode.
class EmDictionary
{
  public:
    EmDictionary(Eigen::MatrixXd pattern_dict, Eigen::MatrixXd pol_dict);

    int num_angles() const { return int(pattern_dict_.rows()); }
    int num_patterns() const { return int(pattern_dict_.cols()); }
    int num_polarizations() const { return int(pol_dict_.cols()); }
    int num_modes() const { return int(full_dict_.cols()); }

    const Eigen::MatrixXd &pattern_dict() const { return pattern_dict_; }
    const Eigen::MatrixXd &pol_dict() const { return pol_dict_; }
    const Eigen::MatrixXd &full_dict() const { return full_dict_; }

    // The two rows of full_dict belonging to angular sample m, as a 2 x P
    // block: the (H, V) gain of every mode in that direction.
    Eigen::Matrix<double, 2, Eigen::Dynamic> gain_rows(int angle_index) const;

    // Matrix-of-rows structured-text form for inspection. Parsed back by
    // from_text; used to pin dictionaries in regression data.
    std::string to_text() const;
    static EmDictionary from_text(const std::string &text);

  private:
    Eigen::MatrixXd pattern_dict_; // M x P_pat
    Eigen::MatrixXd pol_dict_;     // 2 x P_pol
    Eigen::MatrixXd full_dict_;    // 2M x P
};

// Per-antenna mode choice. Binary columns are exactly one-hot; relaxed
// columns live in [0,1] and sum to one (the optimizer's box relaxation).
class SelectionMatrix
{
  public:
    enum class Mode
    {
        binary,
        relaxed
    };

    static SelectionMatrix binary(Eigen::MatrixXd entries);
    static SelectionMatrix relaxed(Eigen::MatrixXd entries);

    // One-hot selection from a list of mode indices, one per antenna.
    static SelectionMatrix one_hot(int num_modes, const std::vector<int> &mode_per_antenna);

    Mode mode() const { return mode_; }
    int num_modes() const { return int(entries_.rows()); }
    int num_antennas() const { return int(entries_.cols()); }
    const Eigen::MatrixXd &entries() const { return entries_; }

    // Selected mode index per column; only meaningful for binary selections.
    std::vector<int> selected_modes() const;

  private:
    SelectionMatrix(Eigen::MatrixXd entries, Mode mode);

    Eigen::MatrixXd entries_; // P x N
    Mode mode_;
};

/// Per-antenna EM gain vectors of length 2M (transmit or receive side).
struct EmBeamformer
{
    std::vector<Eigen::VectorXd> blocks; // N vectors, each 2M

    int num_antennas() const { return int(blocks.size()); }
    int num_angles() const { return blocks.empty() ? 0 : int(blocks.front().size()) / 2; }

    // (H, V) gain of antenna n at angular sample m.
    Eigen::Vector2d gain_at(int n, int angle_index) const
    {
        return {blocks[n](2 * angle_index), blocks[n](2 * angle_index + 1)};
    }

    // Dense block-diagonal materialization, 2MN x N. Test scale only.
    Eigen::MatrixXd dense() const;
};

// Raised-cosine lobes max(0, cos(theta - theta_p))^sharpness over an M-point
// uniform grid on [0, pi), centers uniformly spaced, each column normalized.
// If include_omni the first column is the constant 1/sqrt(M).
Eigen::MatrixXd build_pattern_dictionary(int M, int P_pat, double sharpness, bool include_omni);

// Canonical polarization states: H, V, slant-45, slant-135, truncated to the
// first P_pol of that order.
Eigen::MatrixXd build_polarization_dictionary(int P_pol);

// Block n of the result is full_dict * sel(:, n).
EmBeamformer assemble_em_beamformer(const EmDictionary &dict, const SelectionMatrix &sel);

// vec(full_dict * sel): the 2MN stacked gain vector, linear in the selection.
Eigen::VectorXd stacked_gain_vector(const EmDictionary &dict, const SelectionMatrix &sel);

// Argmax per column, ties broken toward the lowest index.
SelectionMatrix round_selection(const SelectionMatrix &sel);

} // namespace crasim

#endif
