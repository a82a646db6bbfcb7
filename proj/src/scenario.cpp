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

#include "crasim/scenario.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace crasim
{

namespace
{
constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kDeg = kPi / 180.0;

using nlohmann::json;

void require_keys(const json &j, const std::string &path, const std::set<std::string> &allowed)
{
    if (!j.is_object())
        throw std::runtime_error("config: expected an object at " + path);
    for (const auto &item : j.items())
        if (!allowed.count(item.key()))
            throw std::runtime_error("config: unknown key " + path + "/" + item.key());
}

std::vector<double> read_number_list(const json &j, const std::string &path)
{
    std::vector<double> out;
    if (j.is_number())
    {
        out.push_back(j.get<double>());
        return out;
    }
    if (!j.is_array())
        throw std::runtime_error("config: expected number or array at " + path);
    for (const auto &v : j)
        out.push_back(v.get<double>());
    return out;
}

std::vector<std::array<double, 2>> read_positions(const json &j, const std::string &path)
{
    std::vector<std::array<double, 2>> out;
    if (!j.is_array())
        throw std::runtime_error("config: expected an array of [angle_deg, range_m] at " + path);
    for (const auto &v : j)
    {
        if (!v.is_array() || v.size() != 2)
            throw std::runtime_error("config: each entry of " + path + " must be [angle_deg, range_m]");
        out.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    return out;
}
} // namespace

const char *to_string(Scheme s)
{
    switch (s)
    {
    case Scheme::cra:
        return "cra";
    case Scheme::pattern_only:
        return "pattern_only";
    case Scheme::polarization_only:
        return "polarization_only";
    default:
        return "bb_only";
    }
}

Scheme scheme_from_string(const std::string &name)
{
    if (name == "cra")
        return Scheme::cra;
    if (name == "pattern_only")
        return Scheme::pattern_only;
    if (name == "polarization_only")
        return Scheme::polarization_only;
    if (name == "bb_only")
        return Scheme::bb_only;
    throw std::runtime_error("unknown scheme tag: " + name);
}

void ScenarioConfig::validate() const
{
    if (num_antennas < 1 || angle_samples < 1 || num_users < 0 || num_clutter < 0 || num_paths < 1)
        throw std::runtime_error("config: counts must be positive");
    if (num_users >= num_antennas)
        throw std::runtime_error("config: num_users must be smaller than num_antennas (radar streams required)");
    if (!(power_budget_w > 0.0) || !(carrier_hz > 0.0))
        throw std::runtime_error("config: power budget and carrier must be positive");
    auto check_thresholds = [](const std::vector<double> &v, int k, const char *name) {
        if (v.size() != 1 && int(v.size()) != k)
            throw std::runtime_error(std::string("config: ") + name + " must have one entry or one per user");
        for (double d : v)
            if (!std::isfinite(d))
                throw std::runtime_error(std::string("config: ") + name + " must be finite");
    };
    check_thresholds(bob_sinr_floor_db, num_users, "bob_sinr_floor_db");
    check_thresholds(eve_sinr_ceiling_db, num_users, "eve_sinr_ceiling_db");
    if (dictionary.num_patterns < 1 || dictionary.num_polarizations < 1 || dictionary.num_polarizations > 4)
        throw std::runtime_error("config: dictionary sizes out of range");
    if (dictionary.num_patterns > angle_samples)
        throw std::runtime_error("config: more patterns than angular samples");
    if (!(dictionary.sharpness > 0.0))
        throw std::runtime_error("config: sharpness must be positive");
    if (!(geometry.sector_min_deg >= 0.0) || !(geometry.sector_max_deg < 180.0) ||
        geometry.sector_min_deg >= geometry.sector_max_deg)
        throw std::runtime_error("config: angular sector must satisfy 0 <= min < max < 180 degrees");
    auto check_range = [](double lo, double hi, const char *name) {
        if (!(lo > 0.0) || hi < lo)
            throw std::runtime_error(std::string("config: bad range for ") + name);
    };
    check_range(geometry.bob_range_min_m, geometry.bob_range_max_m, "bob annulus");
    check_range(geometry.target_range_min_m, geometry.target_range_max_m, "target annulus");
    if (!geometry.bob_positions.empty() && int(geometry.bob_positions.size()) != num_users)
        throw std::runtime_error("config: fixed bob positions must match num_users");
    if (!geometry.clutter_positions.empty() && int(geometry.clutter_positions.size()) != num_clutter)
        throw std::runtime_error("config: fixed clutter positions must match num_clutter");
    if (!(path_loss.exponent > 0.0) || !(path_loss.ref_distance_m > 0.0))
        throw std::runtime_error("config: bad path loss parameters");
    auto check_pol = [](const std::array<double, 2> &p, const char *name) {
        if (std::abs(p[0] * p[0] + p[1] * p[1] - 1.0) > 1e-9)
            throw std::runtime_error(std::string("config: ") + name + " polarization must be unit norm");
    };
    check_pol(bob_rx_pol, "bob");
    check_pol(eve_rx_pol, "eve");
    if (scattering.clutter_scale < 0.0 || scattering.bob_scale < 0.0)
        throw std::runtime_error("config: scattering scales must be nonnegative");
    if (detector.block_len < 1)
        throw std::runtime_error("config: detector block length must be positive");
    algorithm.validate();
}

Eigen::VectorXd ScenarioConfig::bob_floor_linear() const
{
    Eigen::VectorXd v(num_users);
    for (int k = 0; k < num_users; ++k)
        v(k) = db_to_lin(bob_sinr_floor_db.size() == 1 ? bob_sinr_floor_db[0] : bob_sinr_floor_db[std::size_t(k)]);
    return v;
}

Eigen::VectorXd ScenarioConfig::eve_ceiling_linear() const
{
    Eigen::VectorXd v(num_users);
    for (int k = 0; k < num_users; ++k)
        v(k) =
            db_to_lin(eve_sinr_ceiling_db.size() == 1 ? eve_sinr_ceiling_db[0] : eve_sinr_ceiling_db[std::size_t(k)]);
    return v;
}

NoiseModel ScenarioConfig::noise_model() const
{
    return NoiseModel(dbm_to_watts(noise.bob_dbm), dbm_to_watts(noise.eve_dbm), dbm_to_watts(noise.radar_dbm));
}

// --- JSON I/O ----------------------------------------------------------------

ScenarioConfig parse_config(const std::string &json_text)
{
    const json j = json::parse(json_text);
    require_keys(j, "", {"num_antennas", "angle_samples", "num_users", "num_clutter", "num_paths", "carrier_hz",
                         "power_budget_w", "bob_sinr_floor_db", "eve_sinr_ceiling_db", "noise", "dictionary",
                         "geometry", "scattering", "path_loss", "bob_rx_pol", "eve_rx_pol", "scheme", "algorithm",
                         "detector", "seed"});

    ScenarioConfig c;
    c.num_antennas = j.value("num_antennas", c.num_antennas);
    c.angle_samples = j.value("angle_samples", c.angle_samples);
    c.num_users = j.value("num_users", c.num_users);
    c.num_clutter = j.value("num_clutter", c.num_clutter);
    c.num_paths = j.value("num_paths", c.num_paths);
    c.carrier_hz = j.value("carrier_hz", c.carrier_hz);
    c.power_budget_w = j.value("power_budget_w", c.power_budget_w);
    if (j.contains("bob_sinr_floor_db"))
        c.bob_sinr_floor_db = read_number_list(j["bob_sinr_floor_db"], "bob_sinr_floor_db");
    if (j.contains("eve_sinr_ceiling_db"))
        c.eve_sinr_ceiling_db = read_number_list(j["eve_sinr_ceiling_db"], "eve_sinr_ceiling_db");

    if (j.contains("noise"))
    {
        const json &n = j["noise"];
        require_keys(n, "noise", {"bob_dbm", "eve_dbm", "radar_dbm"});
        c.noise.bob_dbm = n.value("bob_dbm", c.noise.bob_dbm);
        c.noise.eve_dbm = n.value("eve_dbm", c.noise.eve_dbm);
        c.noise.radar_dbm = n.value("radar_dbm", c.noise.radar_dbm);
    }
    if (j.contains("dictionary"))
    {
        const json &d = j["dictionary"];
        require_keys(d, "dictionary", {"num_patterns", "num_polarizations", "sharpness", "include_omni"});
        c.dictionary.num_patterns = d.value("num_patterns", c.dictionary.num_patterns);
        c.dictionary.num_polarizations = d.value("num_polarizations", c.dictionary.num_polarizations);
        c.dictionary.sharpness = d.value("sharpness", c.dictionary.sharpness);
        c.dictionary.include_omni = d.value("include_omni", c.dictionary.include_omni);
    }
    if (j.contains("geometry"))
    {
        const json &g = j["geometry"];
        require_keys(g, "geometry",
                     {"sector_min_deg", "sector_max_deg", "bob_range_m", "target_range_m", "bob_positions",
                      "clutter_positions", "target_position"});
        c.geometry.sector_min_deg = g.value("sector_min_deg", c.geometry.sector_min_deg);
        c.geometry.sector_max_deg = g.value("sector_max_deg", c.geometry.sector_max_deg);
        if (g.contains("bob_range_m"))
        {
            const auto r = read_number_list(g["bob_range_m"], "geometry/bob_range_m");
            if (r.size() != 2)
                throw std::runtime_error("config: geometry/bob_range_m must be [min, max]");
            c.geometry.bob_range_min_m = r[0];
            c.geometry.bob_range_max_m = r[1];
        }
        if (g.contains("target_range_m"))
        {
            const auto r = read_number_list(g["target_range_m"], "geometry/target_range_m");
            if (r.size() != 2)
                throw std::runtime_error("config: geometry/target_range_m must be [min, max]");
            c.geometry.target_range_min_m = r[0];
            c.geometry.target_range_max_m = r[1];
        }
        if (g.contains("bob_positions"))
            c.geometry.bob_positions = read_positions(g["bob_positions"], "geometry/bob_positions");
        if (g.contains("clutter_positions"))
            c.geometry.clutter_positions = read_positions(g["clutter_positions"], "geometry/clutter_positions");
        if (g.contains("target_position"))
        {
            const auto p = read_number_list(g["target_position"], "geometry/target_position");
            if (p.size() != 2)
                throw std::runtime_error("config: geometry/target_position must be [angle_deg, range_m]");
            c.geometry.target_position = std::array<double, 2>{p[0], p[1]};
        }
    }
    if (j.contains("scattering"))
    {
        const json &s = j["scattering"];
        require_keys(s, "scattering", {"epsilon_re", "epsilon_im", "clutter_scale", "bob_scale"});
        c.scattering.epsilon_re = s.value("epsilon_re", c.scattering.epsilon_re);
        c.scattering.epsilon_im = s.value("epsilon_im", c.scattering.epsilon_im);
        c.scattering.clutter_scale = s.value("clutter_scale", c.scattering.clutter_scale);
        c.scattering.bob_scale = s.value("bob_scale", c.scattering.bob_scale);
    }
    if (j.contains("path_loss"))
    {
        const json &p = j["path_loss"];
        require_keys(p, "path_loss", {"exponent", "ref_loss_db", "ref_distance_m"});
        c.path_loss.exponent = p.value("exponent", c.path_loss.exponent);
        c.path_loss.ref_loss_db = p.value("ref_loss_db", c.path_loss.ref_loss_db);
        c.path_loss.ref_distance_m = p.value("ref_distance_m", c.path_loss.ref_distance_m);
    }
    auto read_pol = [&](const char *key, std::array<double, 2> &into) {
        if (j.contains(key))
        {
            const auto p = read_number_list(j[key], key);
            if (p.size() != 2)
                throw std::runtime_error(std::string("config: ") + key + " must be [h, v]");
            into = {p[0], p[1]};
        }
    };
    read_pol("bob_rx_pol", c.bob_rx_pol);
    read_pol("eve_rx_pol", c.eve_rx_pol);
    if (j.contains("scheme"))
        c.scheme = scheme_from_string(j["scheme"].get<std::string>());
    if (j.contains("algorithm"))
    {
        const json &a = j["algorithm"];
        require_keys(a, "algorithm",
                     {"max_outer_iters", "scnr_rel_tol", "penalty_tx", "penalty_rx", "penalty_growth", "penalty_cap",
                      "subproblem_tol", "subproblem_max_iter", "gamma_floor", "binariness_tol", "init_candidates"});
        c.algorithm.max_outer_iters = a.value("max_outer_iters", c.algorithm.max_outer_iters);
        c.algorithm.scnr_rel_tol = a.value("scnr_rel_tol", c.algorithm.scnr_rel_tol);
        c.algorithm.penalty_tx = a.value("penalty_tx", c.algorithm.penalty_tx);
        c.algorithm.penalty_rx = a.value("penalty_rx", c.algorithm.penalty_rx);
        c.algorithm.penalty_growth = a.value("penalty_growth", c.algorithm.penalty_growth);
        c.algorithm.penalty_cap = a.value("penalty_cap", c.algorithm.penalty_cap);
        c.algorithm.subproblem_tol = a.value("subproblem_tol", c.algorithm.subproblem_tol);
        c.algorithm.subproblem_max_iter = a.value("subproblem_max_iter", c.algorithm.subproblem_max_iter);
        c.algorithm.gamma_floor = a.value("gamma_floor", c.algorithm.gamma_floor);
        c.algorithm.binariness_tol = a.value("binariness_tol", c.algorithm.binariness_tol);
        c.algorithm.init_candidates = a.value("init_candidates", c.algorithm.init_candidates);
    }
    if (j.contains("detector"))
    {
        const json &d = j["detector"];
        require_keys(d, "detector", {"block_len"});
        c.detector.block_len = d.value("block_len", c.detector.block_len);
    }
    c.seed = j.value("seed", c.seed);

    c.validate();
    return c;
}

ScenarioConfig load_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("load_config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string save_config(const ScenarioConfig &c)
{
    json j;
    j["num_antennas"] = c.num_antennas;
    j["angle_samples"] = c.angle_samples;
    j["num_users"] = c.num_users;
    j["num_clutter"] = c.num_clutter;
    j["num_paths"] = c.num_paths;
    j["carrier_hz"] = c.carrier_hz;
    j["power_budget_w"] = c.power_budget_w;
    j["bob_sinr_floor_db"] = c.bob_sinr_floor_db;
    j["eve_sinr_ceiling_db"] = c.eve_sinr_ceiling_db;
    j["noise"] = {{"bob_dbm", c.noise.bob_dbm}, {"eve_dbm", c.noise.eve_dbm}, {"radar_dbm", c.noise.radar_dbm}};
    j["dictionary"] = {{"num_patterns", c.dictionary.num_patterns},
                       {"num_polarizations", c.dictionary.num_polarizations},
                       {"sharpness", c.dictionary.sharpness},
                       {"include_omni", c.dictionary.include_omni}};
    json g;
    g["sector_min_deg"] = c.geometry.sector_min_deg;
    g["sector_max_deg"] = c.geometry.sector_max_deg;
    g["bob_range_m"] = {c.geometry.bob_range_min_m, c.geometry.bob_range_max_m};
    g["target_range_m"] = {c.geometry.target_range_min_m, c.geometry.target_range_max_m};
    if (!c.geometry.bob_positions.empty())
        g["bob_positions"] = c.geometry.bob_positions;
    if (!c.geometry.clutter_positions.empty())
        g["clutter_positions"] = c.geometry.clutter_positions;
    if (c.geometry.target_position)
        g["target_position"] = *c.geometry.target_position;
    j["geometry"] = std::move(g);
    j["scattering"] = {{"epsilon_re", c.scattering.epsilon_re},
                       {"epsilon_im", c.scattering.epsilon_im},
                       {"clutter_scale", c.scattering.clutter_scale},
                       {"bob_scale", c.scattering.bob_scale}};
    j["path_loss"] = {{"exponent", c.path_loss.exponent},
                      {"ref_loss_db", c.path_loss.ref_loss_db},
                      {"ref_distance_m", c.path_loss.ref_distance_m}};
    j["bob_rx_pol"] = c.bob_rx_pol;
    j["eve_rx_pol"] = c.eve_rx_pol;
    j["scheme"] = to_string(c.scheme);
    j["algorithm"] = {{"max_outer_iters", c.algorithm.max_outer_iters},
                      {"scnr_rel_tol", c.algorithm.scnr_rel_tol},
                      {"penalty_tx", c.algorithm.penalty_tx},
                      {"penalty_rx", c.algorithm.penalty_rx},
                      {"penalty_growth", c.algorithm.penalty_growth},
                      {"penalty_cap", c.algorithm.penalty_cap},
                      {"subproblem_tol", c.algorithm.subproblem_tol},
                      {"subproblem_max_iter", c.algorithm.subproblem_max_iter},
                      {"gamma_floor", c.algorithm.gamma_floor},
                      {"binariness_tol", c.algorithm.binariness_tol},
                      {"init_candidates", c.algorithm.init_candidates}};
    j["detector"] = {{"block_len", c.detector.block_len}};
    j["seed"] = c.seed;
    return j.dump(2);
}

std::string config_hash(const ScenarioConfig &config)
{
    const std::string text = save_config(config);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const unsigned char ch : text)
    {
        h ^= ch;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

ScenarioConfig default_scenario() { return ScenarioConfig{}; }

ScenarioConfig tiny_scenario()
{
    ScenarioConfig c;
    c.num_antennas = 2;
    c.angle_samples = 8;
    c.num_users = 1;
    c.num_clutter = 1;
    c.num_paths = 2;
    c.dictionary.num_patterns = 1;
    c.dictionary.num_polarizations = 3;
    c.algorithm.max_outer_iters = 40;
    return c;
}

ScenarioConfig roc_scenario()
{
    ScenarioConfig c;
    // Close-range sensing geometry so the detection statistic has usable
    // contrast at desk-scale trial counts.
    c.geometry.target_position = std::array<double, 2>{90.0, 5.0};
    c.geometry.target_range_min_m = 20.0;
    c.geometry.target_range_max_m = 40.0;
    return c;
}

// --- scheme restriction and channel synthesis ---------------------------------

EmDictionary apply_scheme(const ScenarioConfig &config, Scheme scheme)
{
    config.validate();
    const int m = config.angle_samples;
    const double s = config.dictionary.sharpness;
    Eigen::MatrixXd slant45(2, 1);
    slant45 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);

    switch (scheme)
    {
    case Scheme::cra:
        return EmDictionary(
            build_pattern_dictionary(m, config.dictionary.num_patterns, s, config.dictionary.include_omni),
            build_polarization_dictionary(config.dictionary.num_polarizations));
    case Scheme::pattern_only:
        return EmDictionary(
            build_pattern_dictionary(m, config.dictionary.num_patterns, s, config.dictionary.include_omni), slant45);
    case Scheme::polarization_only:
        return EmDictionary(build_pattern_dictionary(m, 1, s, true),
                            build_polarization_dictionary(config.dictionary.num_polarizations));
    default:
        return EmDictionary(build_pattern_dictionary(m, 1, s, true), slant45);
    }
}

ScatteringModel target_scattering_model(const ScenarioConfig &config)
{
    return ScatteringModel::reference_template(cplx(config.scattering.epsilon_re, config.scattering.epsilon_im));
}

ScatteringModel clutter_scattering_model(const ScenarioConfig &config)
{
    return ScatteringModel::reference_template(cplx(config.scattering.epsilon_re, config.scattering.epsilon_im),
                                               config.scattering.clutter_scale);
}

ChannelSet generate_channels(const ScenarioConfig &config, std::uint64_t seed)
{
    config.validate();
    Rng rng(seed);
    const AngleGrid grid(config.angle_samples);
    const int n = config.num_antennas;
    const double sector_lo = config.geometry.sector_min_deg * kDeg;
    const double sector_hi = config.geometry.sector_max_deg * kDeg;

    ChannelSet set;
    set.num_angles = grid.M;
    set.num_antennas = n;
    set.eve_rx_pol = Eigen::Vector2d(config.eve_rx_pol[0], config.eve_rx_pol[1]);

    BobChannelOptions bob_opt;
    bob_opt.scattering = ScatteringModel::reference_template(
        cplx(config.scattering.epsilon_re, config.scattering.epsilon_im), config.scattering.bob_scale);
    bob_opt.path_loss = {config.path_loss.exponent, config.path_loss.ref_loss_db, config.path_loss.ref_distance_m};
    bob_opt.sector_min = sector_lo;
    bob_opt.sector_max = sector_hi;

    for (int k = 0; k < config.num_users; ++k)
    {
        PolarPosition pos;
        if (!config.geometry.bob_positions.empty())
        {
            pos.angle = config.geometry.bob_positions[std::size_t(k)][0] * kDeg;
            pos.range_m = config.geometry.bob_positions[std::size_t(k)][1];
        }
        else
        {
            pos.angle = rng.uniform(sector_lo, sector_hi);
            pos.range_m = rng.uniform(config.geometry.bob_range_min_m, config.geometry.bob_range_max_m);
        }
        set.bobs.push_back(generate_bob_channel(rng, pos, config.num_paths, grid, n, bob_opt));
        set.bob_rx_pol.push_back(Eigen::Vector2d(config.bob_rx_pol[0], config.bob_rx_pol[1]));
    }

    auto point_path = [&](const PolarPosition &pos) {
        PropagationPath p;
        p.angle = pos.angle;
        p.angle_index = quantize_angle(pos.angle, grid);
        p.amplitude = std::sqrt(path_loss(pos.range_m, config.path_loss.exponent, config.path_loss.ref_loss_db,
                                          config.path_loss.ref_distance_m)) *
                      rng.unit_phase();
        p.steering = steering_vector(pos.angle, n);
        return p;
    };

    PolarPosition target_pos;
    if (config.geometry.target_position)
    {
        target_pos.angle = (*config.geometry.target_position)[0] * kDeg;
        target_pos.range_m = (*config.geometry.target_position)[1];
    }
    else
    {
        target_pos.angle = rng.uniform(sector_lo, sector_hi);
        target_pos.range_m = rng.uniform(config.geometry.target_range_min_m, config.geometry.target_range_max_m);
    }
    const PropagationPath t_path = point_path(target_pos);
    const Eigen::Matrix2cd phi_t = sample_scattering_matrix(rng, target_scattering_model(config));
    set.eve_target.push_back(CompoundChannel::eve(grid, n, t_path, Eigen::Matrix2d::Identity()));
    set.eve_target.push_back(CompoundChannel::point_scatterer(ChannelKind::target, grid, n, t_path, phi_t));

    const ScatteringModel clutter_model = clutter_scattering_model(config);
    for (int c = 0; c < config.num_clutter; ++c)
    {
        PolarPosition pos;
        if (!config.geometry.clutter_positions.empty())
        {
            pos.angle = config.geometry.clutter_positions[std::size_t(c)][0] * kDeg;
            pos.range_m = config.geometry.clutter_positions[std::size_t(c)][1];
        }
        else
        {
            pos.angle = rng.uniform(sector_lo, sector_hi);
            pos.range_m = rng.uniform(config.geometry.target_range_min_m, config.geometry.target_range_max_m);
        }
        set.clutter.push_back(CompoundChannel::point_scatterer(ChannelKind::clutter, grid, n, point_path(pos),
                                                               sample_scattering_matrix(rng, clutter_model)));
    }
    return set;
}

DesignProblem make_problem(const ScenarioConfig &config, const ChannelSet &channels, const EmDictionary &dict)
{
    DesignProblem p;
    p.channels = &channels;
    p.dict = &dict;
    p.noise = config.noise_model();
    p.power_budget = config.power_budget_w;
    p.bob_sinr_floor = config.bob_floor_linear();
    p.eve_sinr_ceiling = config.eve_ceiling_linear();
    return p;
}

} // namespace crasim
