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

#ifndef CRASIM_SCENARIO_HPP
#define CRASIM_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crasim/detector.hpp"
#include "crasim/optimizer.hpp"

namespace crasim
{

enum class Scheme
{
    cra,
    pattern_only,
    polarization_only,
    bb_only
};

const char *to_string(Scheme s);
Scheme scheme_from_string(const std::string &name);

struct DictionarySpec
{
    int num_patterns = 3;
    int num_polarizations = 3;
    // Calibrated to hardware-plausible low directivity; steep lobes make the
    // pattern-only baseline overshoot its reference behavior.
    double sharpness = 0.35;
    bool include_omni = true;
};

/// Placements in degrees/meters; empty fixed lists mean random draws inside
/// the annulus and sector.
struct GeometrySpec
{
    double sector_min_deg = 30.0;
    double sector_max_deg = 150.0;
    double bob_range_min_m = 50.0;
    double bob_range_max_m = 60.0;
    double target_range_min_m = 20.0;
    double target_range_max_m = 40.0;
    std::vector<std::array<double, 2>> bob_positions;     // {angle_deg, range_m}
    std::vector<std::array<double, 2>> clutter_positions; // {angle_deg, range_m}
    std::optional<std::array<double, 2>> target_position;
};

struct ScatteringSpec
{
    double epsilon_re = 0.0;
    double epsilon_im = 0.0;
    double clutter_scale = 1.0;
    double bob_scale = 1.0;
};

struct PathLossSpec
{
    double exponent = 2.5;
    double ref_loss_db = 30.0;
    double ref_distance_m = 1.0;
};

struct NoiseSpec
{
    double bob_dbm = -80.0;
    double eve_dbm = -80.0;
    double radar_dbm = -80.0;
};

struct DetectorSpec
{
    int block_len = 64;
};

// One fully reproducible experiment description: geometry, dictionaries,
// thresholds, power budget and the RNG seed.
struct ScenarioConfig
{
    int num_antennas = 8;
    int angle_samples = 180;
    int num_users = 2;
    int num_clutter = 2;
    int num_paths = 5;
    double carrier_hz = 28e9; // informational; the array is half-wavelength spaced
    double power_budget_w = 60.0;
    std::vector<double> bob_sinr_floor_db{5.0};   // broadcast over users when length 1
    std::vector<double> eve_sinr_ceiling_db{-20.0};
    NoiseSpec noise;
    DictionarySpec dictionary;
    GeometrySpec geometry;
    ScatteringSpec scattering;
    PathLossSpec path_loss;
    std::array<double, 2> bob_rx_pol{0.7071067811865476, 0.7071067811865476};
    std::array<double, 2> eve_rx_pol{0.7071067811865476, 0.7071067811865476};
    Scheme scheme = Scheme::cra;
    AlgorithmConfig algorithm;
    DetectorSpec detector;
    std::uint64_t seed = 1;

    void validate() const;
    Eigen::VectorXd bob_floor_linear() const;
    Eigen::VectorXd eve_ceiling_linear() const;
    NoiseModel noise_model() const;
};

// JSON document <-> config; unknown keys are rejected with their path.
ScenarioConfig parse_config(const std::string &json_text);
ScenarioConfig load_config(const std::string &path);
std::string save_config(const ScenarioConfig &config); // canonical form
std::string config_hash(const ScenarioConfig &config); // FNV-1a 64 over the canonical form

// Built-in documents shipped with the tool.
ScenarioConfig default_scenario();
ScenarioConfig tiny_scenario();
ScenarioConfig roc_scenario();

// Restricted mode dictionary for a baseline scheme: full pattern x
// polarization grid for cra, patterns with a fixed slant-45 state for
// pattern_only, an omni pattern with all polarizations for
// polarization_only, and the single omni/slant-45 mode for bb_only.
EmDictionary apply_scheme(const ScenarioConfig &config, Scheme scheme);

// One seeded channel realization of the configured geometry.
ChannelSet generate_channels(const ScenarioConfig &config, std::uint64_t seed);

// Scattering models derived from the config templates.
ScatteringModel target_scattering_model(const ScenarioConfig &config);
ScatteringModel clutter_scattering_model(const ScenarioConfig &config);

// Assembles the solver-facing problem view; channels and dict must outlive it.
DesignProblem make_problem(const ScenarioConfig &config, const ChannelSet &channels, const EmDictionary &dict);

} // namespace crasim

#endif
