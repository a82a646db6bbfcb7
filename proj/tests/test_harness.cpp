// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crasim/harness.hpp"

using namespace crasim;

TEST_CASE("default scenario carries the reference parameter set")
{
    const ScenarioConfig c = default_scenario();
    CHECK(c.num_antennas == 8);
    CHECK(c.power_budget_w == 60.0);
    CHECK(c.carrier_hz == 28e9);
    CHECK(c.num_users == 2);
    CHECK(c.num_clutter == 2);
    CHECK(c.num_paths == 5);
    CHECK(c.angle_samples == 180);
    CHECK(c.bob_sinr_floor_db == std::vector<double>{5.0});
    CHECK(c.eve_sinr_ceiling_db == std::vector<double>{-20.0});
    CHECK(c.noise.bob_dbm == -80.0);
    CHECK(c.geometry.bob_range_min_m == 50.0);
    CHECK(c.geometry.bob_range_max_m == 60.0);
    CHECK(c.geometry.target_range_min_m == 20.0);
    CHECK(c.geometry.target_range_max_m == 40.0);
    CHECK(c.geometry.sector_min_deg == 30.0);
    CHECK(c.geometry.sector_max_deg == 150.0);
    CHECK(dbm_to_watts(c.noise.radar_dbm) == doctest::Approx(1e-11));
}

TEST_CASE("config parsing: round trip, defaults, rejection")
{
    const ScenarioConfig c = default_scenario();
    const std::string text = save_config(c);
    const ScenarioConfig back = parse_config(text);
    CHECK(save_config(back) == text);
    CHECK(config_hash(back) == config_hash(c));

    // minimal document inherits the defaults
    const ScenarioConfig minimal = parse_config("{}");
    CHECK(config_hash(minimal) == config_hash(c));

    CHECK_THROWS_WITH_AS(parse_config("{\"frobnicate\": 1}"), doctest::Contains("frobnicate"), std::runtime_error);
    CHECK_THROWS(parse_config("{\"noise\": {\"bob_db\": -80}}")); // misspelled nested key
    CHECK_THROWS(parse_config("{\"num_users\": 8}"));             // K == N leaves no radar stream
    CHECK_THROWS(parse_config("{\"num_users\": 9}"));
    CHECK_THROWS(parse_config("not json"));
}

TEST_CASE("scheme restriction produces the documented dictionary sizes")
{
    ScenarioConfig c = default_scenario(); // low-res: 3 patterns x 3 polarizations
    CHECK(apply_scheme(c, Scheme::cra).num_modes() == 9);
    CHECK(apply_scheme(c, Scheme::pattern_only).num_modes() == 3);
    CHECK(apply_scheme(c, Scheme::polarization_only).num_modes() == 3);
    CHECK(apply_scheme(c, Scheme::bb_only).num_modes() == 1);

    c.dictionary.num_patterns = 7;
    c.dictionary.num_polarizations = 4;
    CHECK(apply_scheme(c, Scheme::cra).num_modes() == 28);

    // fixed slant-45 polarization state in the restricted schemes
    const EmDictionary bb = apply_scheme(c, Scheme::bb_only);
    CHECK(bb.pol_dict()(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(bb.pol_dict()(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
    const EmDictionary pol = apply_scheme(c, Scheme::polarization_only);
    CHECK(pol.pattern_dict().cols() == 1);
    CHECK(pol.pattern_dict()(0, 0) == doctest::Approx(1.0 / std::sqrt(180.0)));
}

TEST_CASE("channel generation is deterministic and honors fixed placements")
{
    ScenarioConfig c = tiny_scenario();
    c.geometry.target_position = std::array<double, 2>{90.0, 25.0};
    c.geometry.bob_positions = {{80.0, 55.0}};
    c.geometry.clutter_positions = {{45.0, 30.0}};

    const ChannelSet a = generate_channels(c, 77);
    const ChannelSet b = generate_channels(c, 77);
    CHECK(save_channels(a) == save_channels(b));
    const ChannelSet other = generate_channels(c, 78);
    CHECK(save_channels(a) != save_channels(other));

    const double quarter_pi = 3.14159265358979 / 4.0;
    CHECK(a.target().paths().front().angle == doctest::Approx(2.0 * quarter_pi));
    CHECK(std::abs(a.target().paths().front().amplitude) ==
          doctest::Approx(std::sqrt(path_loss(25.0, 2.5, 30.0, 1.0))));
    CHECK(a.bobs[0].paths().front().angle == doctest::Approx(80.0 * 3.14159265358979 / 180.0));
    CHECK(a.clutter[0].paths().front().angle == doctest::Approx(quarter_pi));
    CHECK(a.bobs[0].num_paths() == c.num_paths);
}

TEST_CASE("axis application")
{
    const ScenarioConfig c = default_scenario();
    CHECK(apply_axis(c, "power", 40.0).power_budget_w == 40.0);
    CHECK(apply_axis(c, "eps_bob", 10.0).bob_sinr_floor_db == std::vector<double>{10.0});
    CHECK(apply_axis(c, "eps_eve", -10.0).eve_sinr_ceiling_db == std::vector<double>{-10.0});
    CHECK(apply_axis(c, "p_pat", 1.0).dictionary.num_patterns == 1);
    CHECK(apply_axis(c, "p_pol", 4.0).dictionary.num_polarizations == 4);
    const ScenarioConfig angled = apply_axis(c, "target_angle", 120.0);
    REQUIRE(angled.geometry.target_position.has_value());
    CHECK((*angled.geometry.target_position)[0] == 120.0);
    CHECK((*angled.geometry.target_position)[1] == 30.0); // annulus midpoint
    CHECK_THROWS(apply_axis(c, "bogus", 1.0));
}

TEST_CASE("sweep: byte-identical replay, row accounting, failure rows")
{
    ScenarioConfig c = tiny_scenario();
    c.algorithm.max_outer_iters = 15;
    SweepAxis axis;
    axis.name = "power";
    axis.values = {40.0, 60.0};

    const SweepResult a = run_sweep(c, axis, 2, {Scheme::cra, Scheme::bb_only}, 2);
    const SweepResult b = run_sweep(c, axis, 2, {Scheme::cra, Scheme::bb_only}, 1);
    CHECK(a.rows.size() == 2 * 2 * 2);
    CHECK(a.to_csv() == b.to_csv()); // identical across runs and jobs counts

    int ok_rows = 0;
    for (const auto &r : a.rows)
        ok_rows += (r.status == "ok");
    CHECK(ok_rows == int(a.rows.size()));

    // channel seed shared across schemes within one realization
    CHECK(a.rows[0].seed == a.rows[1].seed);

    // unattainable floor: failures are recorded and the sweep continues
    ScenarioConfig hard = c;
    hard.bob_sinr_floor_db = {80.0};
    const SweepResult failed = run_sweep(hard, {"none", {0.0}}, 2, {Scheme::bb_only}, 1);
    CHECK(failed.rows.size() == 2);
    for (const auto &r : failed.rows)
        CHECK(r.status != "ok");
    const std::string csv = failed.to_csv();
    CHECK(csv.find("initialization infeasible") != std::string::npos);
}

TEST_CASE("more transmit power never hurts the mean SCNR")
{
    ScenarioConfig c = tiny_scenario();
    c.algorithm.max_outer_iters = 20;
    const SweepResult res = run_sweep(c, {"power", {1.0, 60.0}}, 3, {Scheme::cra}, 2);
    auto mean_at = [&](double v) {
        double sum = 0.0;
        int n = 0;
        for (const auto &r : res.rows)
            if (r.status == "ok" && r.axis_value == v)
            {
                sum += r.scnr_db;
                ++n;
            }
        return sum / std::max(1, n);
    };
    CHECK(mean_at(60.0) >= mean_at(1.0));
}

TEST_CASE("target-angle sweep with the fixed reference placements")
{
    ScenarioConfig c;
    c.num_antennas = 4;
    c.angle_samples = 16;
    c.num_users = 2;
    c.num_clutter = 2;
    c.num_paths = 2;
    c.geometry.bob_positions = {{80.0, 55.0}, {135.0, 55.0}};
    c.geometry.clutter_positions = {{45.0, 30.0}, {115.0, 30.0}};
    c.algorithm.max_outer_iters = 15;
    const SweepResult res = run_sweep(c, {"target_angle", {60.0, 90.0}}, 1, {Scheme::cra}, 2);
    REQUIRE(res.rows.size() == 2);
    for (const auto &r : res.rows)
        CHECK(r.status == "ok");
}

TEST_CASE("single run is reproducible end to end")
{
    ScenarioConfig c = tiny_scenario();
    IterationTrace t1, t2;
    const ResultRecord r1 = run_single(c, Scheme::cra, 0, &t1);
    const ResultRecord r2 = run_single(c, Scheme::cra, 0, &t2);
    CHECK(r1.status == "ok");
    CHECK(r1.scnr_db == r2.scnr_db);
    CHECK(t1.to_csv() == t2.to_csv());
    CHECK(r1.config_hash == config_hash(c));
}

TEST_CASE("roc harness: deterministic table with sane columns")
{
    ScenarioConfig c = tiny_scenario();
    c.geometry.target_position = std::array<double, 2>{90.0, 6.0};
    const std::vector<double> grid{1e-2, 1e-1};
    const RocResult a = run_roc(c, {Scheme::cra, Scheme::bb_only}, grid, 5000);
    const RocResult b = run_roc(c, {Scheme::cra, Scheme::bb_only}, grid, 5000);
    CHECK(a.to_csv() == b.to_csv());
    REQUIRE(a.rows.size() == 4);
    CHECK(a.rows[0].pfa == 1e-2);
    const std::string csv = a.to_csv();
    CHECK(csv.rfind("scheme,pfa,pd,threshold,n_trials", 0) == 0);

    // doubling the trial count moves pd by less than two binomial sigmas
    const RocResult dbl = run_roc(c, {Scheme::cra}, grid, 10000);
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        const double pd = a.rows[i].pd;
        const double sigma = std::sqrt(std::max(pd * (1.0 - pd), 0.25 / 5000.0) / 5000.0);
        CHECK(std::abs(dbl.rows[i].pd - pd) <= 2.0 * std::sqrt(2.0) * sigma + 2.0 / 5000.0);
    }
}

TEST_CASE("metadata json echoes the config and hash")
{
    const ScenarioConfig c = tiny_scenario();
    const std::string meta = run_metadata_json(c, 12.5, 3);
    CHECK(meta.find(config_hash(c)) != std::string::npos);
    CHECK(meta.find("\"num_antennas\": 2") != std::string::npos);
}
