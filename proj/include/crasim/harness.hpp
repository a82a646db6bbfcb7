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

#ifndef CRASIM_HARNESS_HPP
#define CRASIM_HARNESS_HPP

#include <string>
#include <vector>

#include "crasim/scenario.hpp"

namespace crasim
{

/// One attempted realization, recorded whether it succeeded or not.
struct ResultRecord
{
    std::string config_hash;
    std::string axis = "none";
    double axis_value = 0.0;
    Scheme scheme = Scheme::cra;
    int realization = 0;
    std::uint64_t seed = 0; // derived channel seed of this realization
    std::string status;     // "ok" or a failure label
    bool converged = false;
    int iterations = 0;
    double scnr_db = 0.0;
    std::vector<double> bob_sinr_db;
    std::vector<double> eve_sinr_db;
    double power_w = 0.0;
    double binariness = 0.0;
    double wall_ms = 0.0; // reported in run metadata only, never in CSV
};

struct SweepAxis
{
    std::string name = "none"; // none|power|eps_bob|eps_eve|p_pat|p_pol|target_angle
    std::vector<double> values{0.0};
};

struct SweepResult
{
    std::vector<ResultRecord> rows;
    double wall_ms_total = 0.0;

    // Raw realization rows followed by per-(axis value, scheme) aggregate
    // rows holding the mean over successful realizations. Byte-stable for
    // identical config and seed.
    std::string to_csv() const;
};

// Runs axis value x realization x scheme. Channels for one realization
// index are shared across schemes (and across axis values whenever the
// axis leaves the geometry untouched) so comparisons are paired. Failures
// are recorded and the sweep continues. jobs > 1 parallelizes realizations;
// the output order does not depend on scheduling.
SweepResult run_sweep(const ScenarioConfig &config, const SweepAxis &axis, int n_realizations,
                      const std::vector<Scheme> &schemes, int jobs = 1);

// Applies one axis value to a config (exposed for tests).
ScenarioConfig apply_axis(const ScenarioConfig &config, const std::string &axis, double value);

struct RocRow
{
    Scheme scheme = Scheme::cra;
    double pfa = 0.0;
    double pd = 0.0;
    double threshold = 0.0;
    int n_trials = 0;
};

struct RocResult
{
    std::vector<RocRow> rows;
    std::vector<ResultRecord> optimizer_rows; // one per scheme
    double wall_ms_total = 0.0;

    std::string to_csv() const; // scheme, pfa, pd, threshold, n_trials
};

// Optimizes every scheme on one shared channel realization, then runs the
// Monte Carlo detector per scheme on that same realization.
RocResult run_roc(const ScenarioConfig &config, const std::vector<Scheme> &schemes,
                  const std::vector<double> &pfa_grid, int n_trials);

// Runs one seeded realization of one scheme end to end.
ResultRecord run_single(const ScenarioConfig &config, Scheme scheme, int realization_index,
                        IterationTrace *trace_out = nullptr);

// Derived per-realization channel seed (shared across schemes).
std::uint64_t realization_seed(const ScenarioConfig &config, int realization_index);

// Metadata document accompanying each CSV: config echo, content hash and
// wall time.
std::string run_metadata_json(const ScenarioConfig &config, double wall_ms, int rows);

} // namespace crasim

#endif
