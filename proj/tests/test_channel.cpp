// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "crasim/channel.hpp"
#include "crasim/em_modes.hpp"
#include "crasim/rng.hpp"

using namespace crasim;

namespace
{
constexpr double kPi = 3.141592653589793238462643383279;

PropagationPath make_path(double angle, const AngleGrid &grid, int N, cplx amplitude)
{
    PropagationPath p;
    p.angle = angle;
    p.angle_index = quantize_angle(angle, grid);
    p.amplitude = amplitude;
    p.steering = steering_vector(angle, N);
    return p;
}

EmBeamformer random_em(Rng &rng, const EmDictionary &dict, int N)
{
    std::vector<int> modes;
    for (int n = 0; n < N; ++n)
        modes.push_back(rng.uniform_int(dict.num_modes()));
    return assemble_em_beamformer(dict, SelectionMatrix::one_hot(dict.num_modes(), modes));
}

// Independent dense construction of the one-way factor H_S^H H_A^H used to
// cross-check the compound channel against the table formulas.
Eigen::MatrixXcd dense_one_way(const CompoundChannel &ch)
{
    const int M = ch.num_angles(), N = ch.num_antennas(), L = ch.num_paths();
    Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(2 * L, 2 * M * N);
    for (int l = 0; l < L; ++l)
        for (int n = 0; n < N; ++n)
        {
            const auto &p = ch.paths()[std::size_t(l)];
            const cplx c = std::conj(p.amplitude * p.steering(n));
            t(2 * l, 2 * M * n + 2 * p.angle_index) = c;
            t(2 * l + 1, 2 * M * n + 2 * p.angle_index + 1) = c;
        }
    return t;
}
} // namespace

TEST_CASE("quantize_angle basics and linear-scan oracle")
{
    const AngleGrid g180(180);
    CHECK(quantize_angle(0.0, g180) == 0);
    CHECK(quantize_angle(kPi / 2.0, g180) == 90);

    const AngleGrid g8(8);
    const double theta = 0.4;
    int best = 0;
    for (int m = 1; m < 8; ++m)
        if (std::abs(m * kPi / 8 - theta) < std::abs(best * kPi / 8 - theta))
            best = m;
    CHECK(quantize_angle(theta, g8) == best);

    // distance tie resolves to the lower index
    const AngleGrid g2(2);
    CHECK(quantize_angle(kPi / 4.0, g2) == 0);

    CHECK_THROWS(quantize_angle(-0.1, g8));
    CHECK_THROWS(quantize_angle(kPi, g8));
}

TEST_CASE("steering vector formula")
{
    const Eigen::VectorXcd broadside = steering_vector(kPi / 2.0, 3);
    for (int n = 0; n < 3; ++n)
        CHECK(std::abs(broadside(n) - cplx(1.0, 0.0)) < 1e-15);

    const Eigen::VectorXcd endfire = steering_vector(0.0, 2);
    CHECK(std::abs(endfire(0) - cplx(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(endfire(1) - cplx(-1.0, 0.0)) < 1e-12);

    const Eigen::VectorXcd a = steering_vector(kPi / 3.0, 4);
    for (int n = 0; n < 4; ++n)
    {
        const double phase = kPi * n * std::cos(kPi / 3.0);
        CHECK(std::abs(a(n) - std::exp(cplx(0.0, phase))) < 1e-15);
    }
}

TEST_CASE("path loss")
{
    CHECK(path_loss(1.0, 2.5, 0.0, 1.0) == doctest::Approx(1.0));
    CHECK(path_loss(1.0, 2.5, 30.0, 1.0) == doctest::Approx(1e-3).epsilon(1e-12));
    // direct numeric evaluation of the distance-power law
    const double expected = std::pow(10.0, -3.0) * std::pow(30.0, -2.5);
    CHECK(path_loss(30.0, 2.5, 30.0, 1.0) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(expected == doctest::Approx(2.0286e-7).epsilon(1e-4));
    CHECK_THROWS(path_loss(0.0, 2.5, 30.0, 1.0));
    CHECK_THROWS(path_loss(10.0, 2.5, 30.0, 0.0));
}

TEST_CASE("scattering model sampling statistics")
{
    Rng rng(123);
    const auto zero = ScatteringModel::zero();
    CHECK(sample_scattering_matrix(rng, zero).cwiseAbs().maxCoeff() == 0.0);

    // Per-entry variances of the reference template with eps = 0.
    const auto diag_model = ScatteringModel::reference_template(cplx(0.0, 0.0));
    const int trials = 100000;
    Eigen::Vector4d acc = Eigen::Vector4d::Zero();
    for (int i = 0; i < trials; ++i)
    {
        const Eigen::Matrix2cd phi = sample_scattering_matrix(rng, diag_model);
        acc(0) += std::norm(phi(0, 0));
        acc(1) += std::norm(phi(1, 0));
        acc(2) += std::norm(phi(0, 1));
        acc(3) += std::norm(phi(1, 1));
    }
    acc /= double(trials);
    CHECK(acc(0) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(acc(1) == doctest::Approx(0.3).epsilon(0.05));
    CHECK(acc(2) == doctest::Approx(0.1).epsilon(0.05));
    CHECK(acc(3) == doctest::Approx(1.0).epsilon(0.05));

    // Monte Carlo covariance oracle for the full template.
    const auto full_model = ScatteringModel::reference_template(cplx(0.5, 0.0));
    Eigen::Matrix4cd cov = Eigen::Matrix4cd::Zero();
    for (int i = 0; i < trials; ++i)
    {
        const Eigen::Matrix2cd phi = sample_scattering_matrix(rng, full_model);
        Eigen::Vector4cd v;
        v << phi(0, 0), phi(1, 0), phi(0, 1), phi(1, 1);
        cov += v * v.adjoint();
    }
    cov /= double(trials);
    const double err = (cov - full_model.covariance()).norm() / full_model.covariance().norm();
    CHECK(err < 0.05);
}

TEST_CASE("scattering model rejects non-PSD covariance")
{
    Eigen::Matrix4cd bad = Eigen::Matrix4cd::Identity();
    bad(0, 0) = -0.5;
    CHECK_THROWS(ScatteringModel(bad));
    Eigen::Matrix4cd nonherm = Eigen::Matrix4cd::Identity();
    nonherm(0, 1) = cplx(0.5, 0.0); // entry without conjugate partner
    CHECK_THROWS(ScatteringModel(nonherm));
}

TEST_CASE("single-path identity bob channel reduces to conjugate amplitude blocks")
{
    const AngleGrid grid(4);
    const int N = 2;
    const cplx amp(0.8, 0.6); // unit-modulus scaling keeps |amplitude| = 1
    auto path = make_path(grid.sample(1), grid, N, amp);
    const auto ch = CompoundChannel::bob(grid, N, {path}, {Eigen::Matrix2cd::Identity()}, Eigen::Matrix2d::Identity());

    const Eigen::MatrixXcd dense = ch.dense();
    REQUIRE(dense.rows() == 2);
    REQUIRE(dense.cols() == 2 * 4 * N);
    for (int n = 0; n < N; ++n)
    {
        const cplx expected = std::conj(amp * path.steering(n));
        const Eigen::Matrix2cd block = dense.block<2, 2>(0, 2 * 4 * n + 2 * path.angle_index);
        CHECK((block - expected * Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-14);
    }
    // every other column is zero (one nonzero block per antenna at the path index)
    double off_mass = dense.cwiseAbs().sum();
    for (int n = 0; n < N; ++n)
        off_mass -= dense.block<2, 2>(0, 2 * 4 * n + 2 * path.angle_index).cwiseAbs().sum();
    CHECK(off_mass == 0.0);
}

TEST_CASE("scalar compound channel: M=1, N=1, real spatial gain")
{
    const AngleGrid grid(1);
    auto path = make_path(0.0, grid, 1, cplx(0.5, 0.0) / 0.5); // placeholder
    // amplitude 0.5 with trivial steering
    path.amplitude = cplx(0.5, 0.0);
    const auto ch =
        CompoundChannel::bob(grid, 1, {path}, {Eigen::Matrix2cd::Identity()}, Eigen::Matrix2d::Identity());
    const Eigen::MatrixXcd dense = ch.dense();
    CHECK((dense - 0.5 * Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("eve channel matches the one-way table formula")
{
    Rng rng(5);
    const AngleGrid grid(8);
    const int N = 3;
    auto path = make_path(rng.uniform(0.6, 2.5), grid, N, 0.3 * rng.unit_phase());
    const auto eve = CompoundChannel::eve(grid, N, path, Eigen::Matrix2d::Identity());
    REQUIRE(eve.dims().first == 2);
    const Eigen::MatrixXcd dense = eve.dense();
    CHECK((dense - dense_one_way(eve)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("factored apply agrees with dense materialization")
{
    Rng rng(17);
    const AngleGrid grid(8);
    const int N = 3; // 2MN = 48
    for (int rep = 0; rep < 20; ++rep)
    {
        std::vector<PropagationPath> paths;
        std::vector<Eigen::Matrix2cd> scat;
        const int L = 1 + rng.uniform_int(2);
        for (int l = 0; l < L; ++l)
        {
            paths.push_back(make_path(rng.uniform(0.1, 3.0), grid, N, 0.5 * rng.unit_phase()));
            Eigen::Matrix2cd phi;
            phi << rng.cgaussian(), rng.cgaussian(), rng.cgaussian(), rng.cgaussian();
            scat.push_back(phi);
        }
        const double ang = rng.uniform(0.0, 2.0 * kPi);
        Eigen::Matrix2d rot;
        rot << std::cos(ang), -std::sin(ang), std::sin(ang), std::cos(ang);

        const auto bob = CompoundChannel::bob(grid, N, paths, scat, rot);
        const auto target = CompoundChannel::point_scatterer(ChannelKind::target, grid, N, paths.front(), scat.front());
        const auto eve = CompoundChannel::eve(grid, N, paths.front(), rot);

        Eigen::VectorXcd x(2 * 8 * N);
        for (int i = 0; i < x.size(); ++i)
            x(i) = rng.cgaussian();

        for (const CompoundChannel *ch : {&bob, &target, &eve})
        {
            const Eigen::MatrixXcd dense = ch->dense();
            CHECK((ch->apply(x) - dense * x).norm() <= 1e-12 * std::max(1.0, (dense * x).norm()));
            Eigen::VectorXcd y(dense.rows());
            for (int i = 0; i < y.size(); ++i)
                y(i) = rng.cgaussian();
            CHECK((ch->apply_adjoint(y) - dense.adjoint() * y).norm() <=
                  1e-12 * std::max(1.0, (dense.adjoint() * y).norm()));
        }
    }
}

TEST_CASE("target channel with identity scattering is Hermitian PSD")
{
    Rng rng(23);
    const AngleGrid grid(6);
    const int N = 2;
    auto path = make_path(rng.uniform(0.5, 2.6), grid, N, 0.7 * rng.unit_phase());
    const auto target =
        CompoundChannel::point_scatterer(ChannelKind::target, grid, N, path, Eigen::Matrix2cd::Identity());
    const Eigen::MatrixXcd dense = target.dense();
    CHECK((dense - dense.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
}

TEST_CASE("factored through-matrix equals dense triple product")
{
    Rng rng(29);
    const AngleGrid grid(8);
    const int N = 2;
    const EmDictionary dict(build_pattern_dictionary(8, 2, 4.0, true), build_polarization_dictionary(2));

    for (int rep = 0; rep < 10; ++rep)
    {
        auto path = make_path(rng.uniform(0.6, 2.5), grid, N, 0.4 * rng.unit_phase());
        Eigen::Matrix2cd phi;
        phi << rng.cgaussian(), rng.cgaussian(), rng.cgaussian(), rng.cgaussian();
        const auto target = CompoundChannel::point_scatterer(ChannelKind::target, grid, N, path, phi);

        const EmBeamformer f = random_em(rng, dict, N);
        const EmBeamformer w = random_em(rng, dict, N);
        const Eigen::MatrixXcd fast = target.through_matrix(f, w);
        const Eigen::MatrixXcd slow = w.dense().transpose().cast<cplx>() * target.dense() * f.dense().cast<cplx>();
        CHECK((fast - slow).norm() <= 1e-12 * std::max(1.0, slow.norm()));
    }
}

TEST_CASE("effective row equals dense row product")
{
    Rng rng(31);
    const AngleGrid grid(8);
    const int N = 3;
    const EmDictionary dict(build_pattern_dictionary(8, 2, 4.0, true), build_polarization_dictionary(3));

    std::vector<PropagationPath> paths;
    std::vector<Eigen::Matrix2cd> scat;
    for (int l = 0; l < 2; ++l)
    {
        paths.push_back(make_path(rng.uniform(0.6, 2.5), grid, N, 0.4 * rng.unit_phase()));
        Eigen::Matrix2cd phi;
        phi << rng.cgaussian(), rng.cgaussian(), rng.cgaussian(), rng.cgaussian();
        scat.push_back(phi);
    }
    const auto bob = CompoundChannel::bob(grid, N, paths, scat, Eigen::Matrix2d::Identity());
    const EmBeamformer f = random_em(rng, dict, N);
    const Eigen::Vector2d pol(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));

    Eigen::VectorXcd pbar(2 * bob.num_paths());
    for (int l = 0; l < bob.num_paths(); ++l)
        pbar.segment<2>(2 * l) = pol.cast<cplx>();
    const Eigen::RowVectorXcd slow = pbar.transpose() * bob.dense() * f.dense().cast<cplx>();
    const Eigen::VectorXcd fast = bob.effective_row(pol, f);
    CHECK((fast.transpose() - slow).norm() < 1e-12);
}

TEST_CASE("bob channel generation: dims, sector, determinism")
{
    const AngleGrid grid(16);
    const int N = 3, L = 5;
    BobChannelOptions opt;
    opt.scattering = ScatteringModel::reference_template(cplx(0.5, 0.0));

    Rng rng(99);
    const auto ch = generate_bob_channel(rng, {kPi / 2.0, 55.0}, L, grid, N, opt);
    CHECK(ch.dims().first == 2 * L);
    CHECK(ch.dims().second == 2 * 16 * N);
    CHECK(ch.paths().front().angle == doctest::Approx(kPi / 2.0));
    for (const auto &p : ch.paths())
    {
        CHECK(p.angle >= opt.sector_min - 1e-12);
        CHECK(p.angle <= opt.sector_max + 1e-12);
    }
    // scatter paths are strictly weaker than the direct path
    for (int l = 1; l < L; ++l)
        CHECK(std::abs(ch.paths()[std::size_t(l)].amplitude) < std::abs(ch.paths()[0].amplitude));

    // same-seed replay is bit-identical
    Rng rng_a(4242), rng_b(4242);
    const auto a = generate_bob_channel(rng_a, {1.0, 30.0}, 3, grid, N, opt);
    const auto b = generate_bob_channel(rng_b, {1.0, 30.0}, 3, grid, N, opt);
    ChannelSet sa, sb;
    sa.num_angles = sb.num_angles = 16;
    sa.num_antennas = sb.num_antennas = N;
    sa.bobs.push_back(a);
    sb.bobs.push_back(b);
    sa.bob_rx_pol.push_back(Eigen::Vector2d(1, 0));
    sb.bob_rx_pol.push_back(Eigen::Vector2d(1, 0));
    auto eve_path = make_path(1.0, grid, N, cplx(1.0, 0.0));
    for (auto *s : {&sa, &sb})
    {
        s->eve_target.push_back(CompoundChannel::eve(grid, N, eve_path, Eigen::Matrix2d::Identity()));
        s->eve_target.push_back(
            CompoundChannel::point_scatterer(ChannelKind::target, grid, N, eve_path, Eigen::Matrix2cd::Identity()));
    }
    CHECK(save_channels(sa) == save_channels(sb));
}

TEST_CASE("channel snapshot round trip")
{
    Rng rng(55);
    const AngleGrid grid(8);
    const int N = 2;
    BobChannelOptions opt;
    opt.scattering = ScatteringModel::reference_template(cplx(0.5, 0.1));

    ChannelSet set;
    set.num_angles = 8;
    set.num_antennas = N;
    set.bobs.push_back(generate_bob_channel(rng, {1.2, 50.0}, 2, grid, N, opt));
    set.bob_rx_pol.push_back(Eigen::Vector2d(0.6, 0.8));
    auto t_path = make_path(1.8, grid, N, 0.01 * rng.unit_phase());
    Eigen::Matrix2cd phi;
    phi << rng.cgaussian(), rng.cgaussian(), rng.cgaussian(), rng.cgaussian();
    set.eve_target.push_back(CompoundChannel::eve(grid, N, t_path, Eigen::Matrix2d::Identity()));
    set.eve_target.push_back(CompoundChannel::point_scatterer(ChannelKind::target, grid, N, t_path, phi));
    set.clutter.push_back(
        CompoundChannel::point_scatterer(ChannelKind::clutter, grid, N, make_path(2.2, grid, N, 0.02), phi));
    set.eve_rx_pol = Eigen::Vector2d(1.0, 0.0);

    const std::string text = save_channels(set);
    const ChannelSet back = load_channels(text);
    CHECK(save_channels(back) == text);
}
