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

#include "crasim/em_modes.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace crasim
{

namespace
{
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kUnitTol = 1e-12;
} // namespace

PolarizationState::PolarizationState(double h, double v) : h_gain(h), v_gain(v)
{
    if (std::abs(h * h + v * v - 1.0) > 1e-12)
        throw std::invalid_argument("PolarizationState: gains must satisfy h^2 + v^2 = 1");
}

RadiationPattern::RadiationPattern(Eigen::VectorXd g) : gains(std::move(g))
{
    if (gains.size() == 0 || gains.minCoeff() < 0.0)
        throw std::invalid_argument("RadiationPattern: gains must be nonnegative");
    if (std::abs(gains.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("RadiationPattern: gains must have unit norm");
}

EmDictionary::EmDictionary(Eigen::MatrixXd pattern_dict, Eigen::MatrixXd pol_dict)
    : pattern_dict_(std::move(pattern_dict)), pol_dict_(std::move(pol_dict))
{
    if (pol_dict_.rows() != 2)
        throw std::invalid_argument("EmDictionary: polarization dictionary must have 2 rows");
    const int M = int(pattern_dict_.rows());
    const int P_pat = int(pattern_dict_.cols());
    const int P_pol = int(pol_dict_.cols());
    if (M < 1 || P_pat < 1 || P_pol < 1)
        throw std::invalid_argument("EmDictionary: empty dictionary");

    full_dict_.resize(2 * M, P_pat * P_pol);
    for (int i = 0; i < P_pat; ++i)
        for (int j = 0; j < P_pol; ++j)
        {
            const int col = i * P_pol + j;
            for (int m = 0; m < M; ++m)
            {
                full_dict_(2 * m, col) = pattern_dict_(m, i) * pol_dict_(0, j);
                full_dict_(2 * m + 1, col) = pattern_dict_(m, i) * pol_dict_(1, j);
            }
        }

    for (int c = 0; c < full_dict_.cols(); ++c)
        if (std::abs(full_dict_.col(c).norm() - 1.0) > kUnitTol)
            throw std::invalid_argument("EmDictionary: column " + std::to_string(c) + " is not unit norm");
}

Eigen::Matrix<double, 2, Eigen::Dynamic> EmDictionary::gain_rows(int angle_index) const
{
    if (angle_index < 0 || angle_index >= num_angles())
        throw std::out_of_range("EmDictionary::gain_rows: angle index out of range");
    return full_dict_.middleRows(2 * angle_index, 2);
}

namespace
{
void write_matrix(std::ostream &os, const char *name, const Eigen::MatrixXd &m)
{
    os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    os << std::setprecision(17);
    for (Eigen::Index r = 0; r < m.rows(); ++r)
    {
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            os << (c ? " " : "") << m(r, c);
        os << '\n';
    }
}

Eigen::MatrixXd read_matrix(std::istream &is, const std::string &expected_name)
{
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    if (!(is >> name >> rows >> cols) || name != expected_name || rows < 1 || cols < 1)
        throw std::runtime_error("EmDictionary::from_text: malformed header for " + expected_name);
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            if (!(is >> m(r, c)))
                throw std::runtime_error("EmDictionary::from_text: truncated matrix " + expected_name);
    return m;
}
} // namespace

std::string EmDictionary::to_text() const
{
    std::ostringstream os;
    write_matrix(os, "pattern_dict", pattern_dict_);
    write_matrix(os, "pol_dict", pol_dict_);
    return os.str();
}

EmDictionary EmDictionary::from_text(const std::string &text)
{
    std::istringstream is(text);
    Eigen::MatrixXd pat = read_matrix(is, "pattern_dict");
    Eigen::MatrixXd pol = read_matrix(is, "pol_dict");
    return EmDictionary(std::move(pat), std::move(pol));
}

SelectionMatrix::SelectionMatrix(Eigen::MatrixXd entries, Mode mode) : entries_(std::move(entries)), mode_(mode)
{
    if (entries_.rows() < 1 || entries_.cols() < 1)
        throw std::invalid_argument("SelectionMatrix: empty matrix");
    for (int n = 0; n < entries_.cols(); ++n)
    {
        double sum = 0.0;
        int nonzero = 0;
        for (int p = 0; p < entries_.rows(); ++p)
        {
            const double v = entries_(p, n);
            if (mode_ == Mode::binary)
            {
                if (v != 0.0 && v != 1.0)
                    throw std::invalid_argument("SelectionMatrix: binary entries must be 0 or 1");
                nonzero += (v == 1.0);
            }
            else if (v < 0.0 || v > 1.0)
            {
                throw std::invalid_argument("SelectionMatrix: relaxed entries must lie in [0,1]");
            }
            sum += v;
        }
        if (mode_ == Mode::binary && nonzero != 1)
            throw std::invalid_argument("SelectionMatrix: binary column must be one-hot");
        if (mode_ == Mode::relaxed && std::abs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("SelectionMatrix: relaxed column must sum to 1");
    }
}

SelectionMatrix SelectionMatrix::binary(Eigen::MatrixXd entries)
{
    return SelectionMatrix(std::move(entries), Mode::binary);
}

SelectionMatrix SelectionMatrix::relaxed(Eigen::MatrixXd entries)
{
    return SelectionMatrix(std::move(entries), Mode::relaxed);
}

SelectionMatrix SelectionMatrix::one_hot(int num_modes, const std::vector<int> &mode_per_antenna)
{
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(num_modes, Eigen::Index(mode_per_antenna.size()));
    for (std::size_t n = 0; n < mode_per_antenna.size(); ++n)
    {
        const int p = mode_per_antenna[n];
        if (p < 0 || p >= num_modes)
            throw std::invalid_argument("SelectionMatrix::one_hot: mode index out of range");
        e(p, Eigen::Index(n)) = 1.0;
    }
    return binary(std::move(e));
}

std::vector<int> SelectionMatrix::selected_modes() const
{
    std::vector<int> out(std::size_t(num_antennas()), 0);
    for (int n = 0; n < num_antennas(); ++n)
    {
        int best = 0;
        for (int p = 1; p < num_modes(); ++p)
            if (entries_(p, n) > entries_(best, n))
                best = p;
        out[std::size_t(n)] = best;
    }
    return out;
}

Eigen::MatrixXd EmBeamformer::dense() const
{
    const int N = num_antennas();
    const int twoM = N ? int(blocks.front().size()) : 0;
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Eigen::Index(twoM) * N, N);
    for (int n = 0; n < N; ++n)
        out.block(Eigen::Index(twoM) * n, n, twoM, 1) = blocks[std::size_t(n)];
    return out;
}

Eigen::MatrixXd build_pattern_dictionary(int M, int P_pat, double sharpness, bool include_omni)
{
    if (P_pat < 1 || M < P_pat)
        throw std::invalid_argument("build_pattern_dictionary: need M >= P_pat >= 1");
    if (!(sharpness > 0.0))
        throw std::invalid_argument("build_pattern_dictionary: sharpness must be positive");

    Eigen::MatrixXd dict(M, P_pat);
    int col = 0;
    if (include_omni)
        dict.col(col++).setConstant(1.0 / std::sqrt(double(M)));

    const int lobes = P_pat - col;
    for (int p = 0; p < lobes; ++p, ++col)
    {
        const double center = (p + 0.5) * kPi / lobes;
        for (int m = 0; m < M; ++m)
        {
            const double theta = m * kPi / M;
            const double c = std::cos(theta - center);
            dict(m, col) = c > 0.0 ? std::pow(c, sharpness) : 0.0;
        }
        const double norm = dict.col(col).norm();
        if (norm == 0.0)
            throw std::invalid_argument("build_pattern_dictionary: lobe " + std::to_string(p) +
                                        " vanishes on the angular grid");
        dict.col(col) /= norm;
    }
    return dict;
}

Eigen::MatrixXd build_polarization_dictionary(int P_pol)
{
    if (P_pol < 1 || P_pol > 4)
        throw std::invalid_argument("build_polarization_dictionary: P_pol must be in {1,2,3,4}");
    const double s = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd all(2, 4);
    all << 1.0, 0.0, s, s, //
        0.0, 1.0, s, -s;
    return all.leftCols(P_pol);
}

EmBeamformer assemble_em_beamformer(const EmDictionary &dict, const SelectionMatrix &sel)
{
    if (sel.num_modes() != dict.num_modes())
        throw std::invalid_argument("assemble_em_beamformer: selection rows must match dictionary modes");
    EmBeamformer out;
    out.blocks.reserve(std::size_t(sel.num_antennas()));
    for (int n = 0; n < sel.num_antennas(); ++n)
        out.blocks.emplace_back(dict.full_dict() * sel.entries().col(n));
    return out;
}

Eigen::VectorXd stacked_gain_vector(const EmDictionary &dict, const SelectionMatrix &sel)
{
    if (sel.num_modes() != dict.num_modes())
        throw std::invalid_argument("stacked_gain_vector: selection rows must match dictionary modes");
    const int twoM = 2 * dict.num_angles();
    Eigen::VectorXd out(Eigen::Index(twoM) * sel.num_antennas());
    for (int n = 0; n < sel.num_antennas(); ++n)
        out.segment(Eigen::Index(twoM) * n, twoM) = dict.full_dict() * sel.entries().col(n);
    return out;
}

SelectionMatrix round_selection(const SelectionMatrix &sel)
{
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(sel.num_modes(), sel.num_antennas());
    for (int n = 0; n < sel.num_antennas(); ++n)
    {
        int best = 0;
        for (int p = 1; p < sel.num_modes(); ++p)
            if (sel.entries()(p, n) > sel.entries()(best, n))
                best = p;
        e(best, n) = 1.0;
    }
    return SelectionMatrix::binary(std::move(e));
}

} // namespace crasim
