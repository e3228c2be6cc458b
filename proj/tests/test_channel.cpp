// SPDX-License-Identifier: Apache-2.0
//
// nfmm - localization error bounds under near-field / wideband channel model mismatch
// Copyright (C) 2026 the nfmm authors
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

#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <random>

#include "nfmm/channel.hpp"
#include "nfmm/params.hpp"
#include "nfmm/scenario.hpp"

using namespace nfmm;

namespace
{
ScenarioConfig default_cfg()
{
    ScenarioConfig cfg; // paper defaults are the struct defaults
    return cfg;
}

StateParams state_at(const Eigen::Vector2d& p, const ArrayGeometry& geom, double xi = 0.3)
{
    return StateParams{p, path_gain_mag(p, geom), xi};
}
} // namespace

TEST_CASE("antenna positions: half-wavelength ULA on the y-axis")
{
    ScenarioConfig cfg = default_cfg();
    const double lam = speed_of_light / 140e9; // ~2.1414 mm

    cfg.n_antennas = 2;
    cfg.n_rfc = 2;
    auto geom = antenna_positions(cfg);
    CHECK(geom.positions_m[0].x() == 0.0);
    CHECK_THAT(geom.positions_m[0].y(), Catch::Matchers::WithinRel(-lam / 4.0, 1e-15));
    CHECK_THAT(geom.positions_m[1].y(), Catch::Matchers::WithinRel(lam / 4.0, 1e-15));

    cfg.n_antennas = 64;
    cfg.n_rfc = 64;
    geom = antenna_positions(cfg);
    // R = 63 * lambda_c / 2 = 0.067453...
    CHECK_THAT(geom.aperture_m, Catch::Matchers::WithinRel(63.0 * lam / 2.0, 1e-15));
    CHECK_THAT(geom.aperture_m, Catch::Matchers::WithinAbs(0.06745, 1e-5));
    // centered: positions sum to zero
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    for (const auto& b : geom.positions_m) sum += b;
    CHECK(sum.norm() < 1e-15);

    cfg.n_antennas = 1;
    cfg.n_rfc = 1;
    geom = antenna_positions(cfg);
    CHECK(geom.positions_m[0].norm() == 0.0);
    CHECK(geom.aperture_m == 0.0);
}

TEST_CASE("position <-> (aoa, toa) conversions")
{
    const auto [aoa, toa] = params_from_position({2.0, 2.0});
    CHECK_THAT(aoa, Catch::Matchers::WithinRel(M_PI / 4.0, 1e-15));
    CHECK_THAT(toa, Catch::Matchers::WithinRel(2.0 * std::sqrt(2.0) / speed_of_light, 1e-15));

    const auto [aoa2, toa2] = params_from_position({1.0, 0.0});
    CHECK(aoa2 == 0.0);
    CHECK_THAT(toa2, Catch::Matchers::WithinRel(1.0 / speed_of_light, 1e-15));

    CHECK_THROWS_AS(params_from_position({0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(params_from_position({-1.0, 0.5}), std::invalid_argument);

    const Eigen::Vector2d p = position_from_params(M_PI / 4.0, 2.0 * std::sqrt(2.0) / speed_of_light);
    CHECK_THAT(p.x(), Catch::Matchers::WithinRel(2.0, 1e-12));
    CHECK_THAT(p.y(), Catch::Matchers::WithinRel(2.0, 1e-12));

    // aoa = -pi/3, range 2 m -> [1, -sqrt(3)]
    const Eigen::Vector2d q = position_from_params(-M_PI / 3.0, 2.0 / speed_of_light);
    CHECK_THAT(q.x(), Catch::Matchers::WithinRel(1.0, 1e-12));
    CHECK_THAT(q.y(), Catch::Matchers::WithinRel(-std::sqrt(3.0), 1e-12));

    CHECK_THROWS_AS(position_from_params(M_PI / 2.0, 1e-8), std::invalid_argument);
    CHECK_THROWS_AS(position_from_params(0.1, 0.0), std::invalid_argument);
}

TEST_CASE("round trip position -> params -> position, random states")
{
    std::mt19937_64 rng(7);
    auto uni = [&](double lo, double hi) {
        return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    };
    for (int i = 0; i < 1000; ++i)
    {
        const double ang = uni(-M_PI / 2 + 1e-3, M_PI / 2 - 1e-3);
        const double r = uni(0.05, 50.0);
        const Eigen::Vector2d p(r * std::cos(ang), r * std::sin(ang));
        const auto [aoa, toa] = params_from_position(p);
        const Eigen::Vector2d back = position_from_params(aoa, toa);
        REQUIRE((back - p).norm() <= 1e-12 * p.norm());
    }
}

TEST_CASE("path gain: free-space 1/r law")
{
    ScenarioConfig cfg = default_cfg();
    const auto geom = antenna_positions(cfg);
    const double lam = geom.carrier_wavelength_m;

    const Eigen::Vector2d p(2.0, 2.0);
    const cd a = path_gain(p, 0.0, geom);
    const double rho_expect = lam / (4.0 * M_PI * 2.0 * std::sqrt(2.0)); // ~6.025e-5
    CHECK_THAT(a.real(), Catch::Matchers::WithinRel(rho_expect, 1e-14));
    CHECK(a.imag() == 0.0);
    CHECK_THAT(rho_expect, Catch::Matchers::WithinRel(6.025e-5, 1e-3));

    const cd b = path_gain(p, M_PI, geom);
    CHECK_THAT(b.real(), Catch::Matchers::WithinAbs(-rho_expect, 1e-18));

    CHECK_THAT(path_gain_mag(2.0 * p, geom),
               Catch::Matchers::WithinRel(0.5 * path_gain_mag(p, geom), 1e-14));
    CHECK_THROWS_AS(path_gain({0.0, 0.0}, 0.0, geom), std::invalid_argument);
}

TEST_CASE("steering vector basics and far-field limit")
{
    Eigen::VectorXcd a = steering_vector(0.0, 17);
    for (int n = 0; n < 17; ++n)
    {
        CHECK(a(n).real() == 1.0);
        CHECK(a(n).imag() == 0.0);
    }

    a = steering_vector(M_PI / 2.0, 2);
    // elements exp(-j pi/2), exp(+j pi/2) = -j, +j
    CHECK_THAT(a(0).imag(), Catch::Matchers::WithinAbs(-1.0, 1e-15));
    CHECK_THAT(a(1).imag(), Catch::Matchers::WithinAbs(1.0, 1e-15));
    CHECK_THAT(std::abs(a(0).real()), Catch::Matchers::WithinAbs(0.0, 1e-15));

    // far-field oracle: at 1000 m the spherical phase at the carrier matches
    // the planar steering element to < 1e-3 rad
    ScenarioConfig cfg = default_cfg();
    const auto geom = antenna_positions(cfg);
    const double ang = M_PI / 4.0;
    const Eigen::Vector2d p = 1000.0 * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const Eigen::VectorXcd af = steering_vector(ang, cfg.n_antennas);
    for (int n = 0; n < cfg.n_antennas; ++n)
    {
        const cd sph = spherical_phase(p, 0, n, geom, cfg); // k=0: lambda_k = lambda_c exactly
        CHECK(std::abs(std::arg(sph / af(n))) < 1e-3);
    }
}

TEST_CASE("unit modulus of all phase-only factors")
{
    ScenarioConfig cfg = default_cfg();
    const auto geom = antenna_positions(cfg);
    const Eigen::Vector2d p(1.3, -0.7);
    for (int k : {0, 3, 9})
    {
        CHECK_THAT(std::abs(delay_term(p, k, cfg)), Catch::Matchers::WithinAbs(1.0, 1e-14));
        const Eigen::VectorXcd a = steering_vector(0.4, cfg.n_antennas);
        const Eigen::VectorXcd ab = steering_vector_bse(0.4, k, cfg);
        for (int n : {0, 10, 63})
        {
            CHECK_THAT(std::abs(a(n)), Catch::Matchers::WithinAbs(1.0, 1e-14));
            CHECK_THAT(std::abs(ab(n)), Catch::Matchers::WithinAbs(1.0, 1e-14));
            CHECK_THAT(std::abs(spherical_phase(p, k, n, geom, cfg)),
                       Catch::Matchers::WithinAbs(1.0, 1e-14));
        }
    }
}

TEST_CASE("beam squint steering vector")
{
    ScenarioConfig cfg = default_cfg();

    // zero-bandwidth limit: lambda_k -> lambda_c
    ScenarioConfig narrow = cfg;
    narrow.bandwidth_hz = 1e-6;
    const Eigen::VectorXcd a0 = steering_vector(0.7, narrow.n_antennas);
    const Eigen::VectorXcd ab = steering_vector_bse(0.7, narrow.n_subcarriers - 1, narrow);
    CHECK((a0 - ab).norm() < 1e-9 * a0.norm());

    for (int k : {0, 5, 9})
    {
        const Eigen::VectorXcd ones = steering_vector_bse(0.0, k, cfg);
        CHECK((ones - Eigen::VectorXcd::Ones(cfg.n_antennas)).norm() == 0.0);
    }

    // phase scale at the last subcarrier: lambda_c/lambda_9 = 1 + 9*40e6/140e9
    const double ratio = 1.0 + 9.0 * 40e6 / 140e9;
    const double ang = M_PI / 4.0;
    const Eigen::VectorXcd af = steering_vector(ang, cfg.n_antennas);
    const Eigen::VectorXcd asq = steering_vector_bse(ang, 9, cfg);
    const int n = 63;
    const double phase_ff = std::arg(af(n));
    // af(63) phase is pi*63/2*sin(pi/4) mod 2pi; compare unwrapped products
    const double raw_ff = M_PI * 63.0 / 2.0 * std::sin(ang);
    const double raw_sq = raw_ff * ratio;
    CHECK_THAT(std::remainder(raw_ff, 2.0 * M_PI), Catch::Matchers::WithinAbs(std::remainder(phase_ff, 2.0 * M_PI), 1e-12));
    CHECK_THAT(std::arg(asq(n) * std::polar(1.0, -std::remainder(raw_sq, 2.0 * M_PI))),
               Catch::Matchers::WithinAbs(0.0, 1e-12));

    CHECK_THROWS_AS(steering_vector_bse(0.1, 10, cfg), std::invalid_argument);
    CHECK_THROWS_AS(steering_vector_bse(0.1, -1, cfg), std::invalid_argument);
}

TEST_CASE("delay term")
{
    ScenarioConfig cfg = default_cfg();

    // range equal to an integer number of subcarrier wavelengths -> D_k = 1
    const int k = 2;
    const double lam_k = cfg.subcarrier_wavelength_m(k);
    const Eigen::Vector2d p(1000.0 * lam_k, 0.0);
    CHECK_THAT(delay_term(p, k, cfg).real(), Catch::Matchers::WithinAbs(1.0, 1e-9));

    // tau -> 0 limit
    CHECK(delay_term_toa(0.0, 5, cfg) == cd(1.0, 0.0));

    // independent phase evaluation at k=1, range 2*sqrt(2)
    const double r = 2.0 * std::sqrt(2.0);
    const double phase = -2.0 * M_PI * (140e9 + 1.0 * 40e6) * r / speed_of_light;
    const cd expect = std::polar(1.0, std::remainder(phase, 2.0 * M_PI));
    const cd got = delay_term({2.0, 2.0}, 1, cfg);
    CHECK(std::abs(got - expect) < 1e-6); // large-argument trig reduction differs in the last bits
}

TEST_CASE("non-stationary amplitude c_{k,n}")
{
    ScenarioConfig cfg = default_cfg();
    cfg.n_antennas = 3;
    cfg.n_rfc = 3;
    auto geom = antenna_positions(cfg);

    // center antenna (b = [0,0]) at k = 0 (lambda_0 = lambda_c exactly): c = 1
    CHECK_THAT(sns_amplitude({0.8, 0.3}, 0, 1, geom, cfg), Catch::Matchers::WithinRel(1.0, 1e-15));

    // far-field limit: c -> lambda_k / lambda_c
    cfg = default_cfg();
    geom = antenna_positions(cfg);
    const int k = 9;
    const double ratio = cfg.subcarrier_wavelength_m(k) / geom.carrier_wavelength_m;
    CHECK_THAT(sns_amplitude({5e4, 0.0}, k, 0, geom, cfg), Catch::Matchers::WithinRel(ratio, 1e-6));

    // brute-force norm oracle at N=64, p=[0.25, 0], n=63, k=1
    const Eigen::Vector2d p(0.25, 0.0);
    const double by = (2.0 * 64.0 - 64.0 - 1.0) * geom.carrier_wavelength_m / 4.0; // b_64,y
    const double dist = std::hypot(p.x() - 0.0, p.y() - by);
    const double lam1 = speed_of_light / (140e9 + 40e6);
    const double expect = lam1 * 0.25 / (geom.carrier_wavelength_m * dist);
    CHECK_THAT(sns_amplitude(p, 1, 63, geom, cfg), Catch::Matchers::WithinRel(expect, 1e-13));

    // UE on top of an antenna
    CHECK_THROWS_AS(sns_amplitude(geom.positions_m[5], 0, 5, geom, cfg), std::invalid_argument);
}

TEST_CASE("spherical phase term")
{
    ScenarioConfig cfg = default_cfg();
    cfg.n_antennas = 5;
    cfg.n_rfc = 5;
    auto geom = antenna_positions(cfg);

    // center antenna: zero excess path
    CHECK(spherical_phase({1.0, 0.2}, 3, 2, geom, cfg) == cd(1.0, 0.0));

    // mirror symmetry for p on the x-axis
    const Eigen::Vector2d p(0.7, 0.0);
    for (int k : {0, 4})
        for (int n = 0; n < 5; ++n)
        {
            const cd lhs = spherical_phase(p, k, n, geom, cfg);
            const cd rhs = spherical_phase(p, k, 4 - n, geom, cfg);
            CHECK(std::abs(lhs - rhs) < 1e-14);
        }
}

TEST_CASE("channel vector: single-antenna collapse")
{
    ScenarioConfig cfg = default_cfg();
    cfg.n_antennas = 1;
    cfg.n_rfc = 1;
    const auto geom = antenna_positions(cfg);
    const StateParams st = state_at({1.7, -0.4}, geom);
    const cd alpha = st.gain_mag * std::exp(-cj * st.gain_phase_rad);

    // k = 0 has lambda_k = lambda_c exactly: all five variants coincide
    {
        const cd expect = alpha * delay_term(st.position_m, 0, cfg);
        for (ModelKind kind : {ModelKind::MM, ModelKind::TM, ModelKind::TM_SNS, ModelKind::TM_SWM,
                               ModelKind::TM_BSE})
        {
            const Eigen::VectorXcd h = channel_vector(kind, st, 0, geom, cfg);
            REQUIRE(h.size() == 1);
            CHECK(std::abs(h(0) - expect) <= 1e-14 * std::abs(expect));
        }
    }
    // k > 0: the phase-only variants still equal alpha D_k; TM and TM-SNS
    // carry the lambda_k/lambda_c amplitude of the non-stationary gain
    for (int k : {1, 9})
    {
        const cd base = alpha * delay_term(st.position_m, k, cfg);
        const double ratio = cfg.subcarrier_wavelength_m(k) / geom.carrier_wavelength_m;
        for (ModelKind kind : {ModelKind::MM, ModelKind::TM_SWM, ModelKind::TM_BSE})
        {
            const cd h0 = channel_vector(kind, st, k, geom, cfg)(0);
            CHECK(std::abs(h0 - base) <= 1e-14 * std::abs(base));
        }
        for (ModelKind kind : {ModelKind::TM, ModelKind::TM_SNS})
        {
            const cd h0 = channel_vector(kind, st, k, geom, cfg)(0);
            CHECK(std::abs(h0 - ratio * base) <= 1e-14 * std::abs(base));
        }
    }
}

TEST_CASE("channel vector: TM matches a scalar-loop oracle")
{
    ScenarioConfig cfg = default_cfg();
    const auto geom = antenna_positions(cfg);
    const StateParams st = state_at({2.0, 2.0}, geom);
    const int k = 5;
    const Eigen::VectorXcd h = channel_vector(ModelKind::TM, st, k, geom, cfg);

    const double r = st.position_m.norm();
    const double lam_c = geom.carrier_wavelength_m;
    const double fk = 140e9 + k * 40e6;
    const double lam_k = speed_of_light / fk;
    const cd alpha = st.gain_mag * std::exp(-cj * st.gain_phase_rad);
    const cd dk = std::exp(-cj * (2.0 * M_PI * fk * (r / speed_of_light)));
    for (int n = 0; n < cfg.n_antennas; ++n)
    {
        const double bn_y = (2.0 * (n + 1) - 64.0 - 1.0) * lam_c / 4.0;
        const double dx = st.position_m.x(), dy = st.position_m.y() - bn_y;
        const double dist = std::sqrt(dx * dx + dy * dy);
        const double c = lam_k * r / (lam_c * dist);
        const cd d = std::exp(-cj * (2.0 * M_PI / lam_k * (dist - r)));
        const cd expect = alpha * c * d * dk;
        REQUIRE(std::abs(h(n) - expect) <= 1e-12 * std::abs(expect));
    }
}

TEST_CASE("channel vector: far-field narrowband limit and monotone convergence")
{
    ScenarioConfig cfg = default_cfg();
    cfg.bandwidth_hz = 1e3;
    const auto geom = antenna_positions(cfg);
    const double df = fresnel_fraunhofer(geom).fraunhofer_m;
    const double ang = 0.3;

    double prev = std::numeric_limits<double>::infinity();
    for (double scale : {10.0, 100.0, 1000.0})
    {
        const Eigen::Vector2d p = scale * df * Eigen::Vector2d(std::cos(ang), std::sin(ang));
        const StateParams st = state_at(p, geom);
        double worst = 0.0;
        for (int k : {0, 9})
        {
            const Eigen::VectorXcd tm = channel_vector(ModelKind::TM, st, k, geom, cfg);
            const Eigen::VectorXcd mm = channel_vector(ModelKind::MM, st, k, geom, cfg);
            worst = std::max(worst, (tm - mm).cwiseAbs().maxCoeff() / mm.cwiseAbs().maxCoeff());
        }
        CHECK(worst < prev);
        prev = worst;
    }
    // at 1000 m (well beyond 10x Fraunhofer) the relative gap is tiny
    const Eigen::Vector2d p1000 = 1000.0 * Eigen::Vector2d(std::cos(ang), std::sin(ang));
    const StateParams st = state_at(p1000, geom);
    const Eigen::VectorXcd tm = channel_vector(ModelKind::TM, st, 9, geom, cfg);
    const Eigen::VectorXcd mm = channel_vector(ModelKind::MM, st, 9, geom, cfg);
    CHECK((tm - mm).norm() / mm.norm() < 1e-3);
}

TEST_CASE("channel vector: zero-bandwidth collapse of the squint")
{
    ScenarioConfig cfg = default_cfg();
    cfg.bandwidth_hz = 1e-6; // lambda_k == lambda_c to ~1e-19 relative
    const auto geom = antenna_positions(cfg);
    const StateParams st = state_at({1.1, 0.9}, geom);
    for (int k : {0, 9})
    {
        const Eigen::VectorXcd bse = channel_vector(ModelKind::TM_BSE, st, k, geom, cfg);
        const Eigen::VectorXcd mm = channel_vector(ModelKind::MM, st, k, geom, cfg);
        CHECK((bse - mm).norm() <= 1e-12 * mm.norm());

        // TM amplitude profile collapses to ||p|| / ||p - b_n||
        const Eigen::VectorXcd tm = channel_vector(ModelKind::TM, st, k, geom, cfg);
        for (int n : {0, 31, 63})
        {
            const double cn = std::abs(tm(n)) / st.gain_mag;
            const double expect = st.position_m.norm() / (st.position_m - geom.positions_m[n]).norm();
            CHECK_THAT(cn, Catch::Matchers::WithinRel(expect, 1e-9));
        }
    }
}

TEST_CASE("channel vector: mirror symmetry on the array axis normal")
{
    ScenarioConfig cfg = default_cfg();
    const auto geom = antenna_positions(cfg);
    const StateParams st = state_at({0.9, 0.0}, geom);
    for (ModelKind kind : {ModelKind::MM, ModelKind::TM_SWM})
        for (int k : {0, 9})
        {
            const Eigen::VectorXcd h = channel_vector(kind, st, k, geom, cfg);
            for (int n = 0; n < cfg.n_antennas; ++n)
            {
                CHECK(std::abs(std::abs(h(n)) - std::abs(h(cfg.n_antennas - 1 - n))) < 1e-14 * std::abs(h(n)));
                CHECK(std::abs(h(n) - h(cfg.n_antennas - 1 - n)) < 1e-12 * std::abs(h(n)));
            }
        }
}

TEST_CASE("Fresnel and Fraunhofer distances")
{
    ScenarioConfig cfg = default_cfg();
    auto geom = antenna_positions(cfg);
    auto fr = fresnel_fraunhofer(geom);
    // N = 64 at 140 GHz: D_N ~ 0.235 m, D_F ~ 4.25 m
    CHECK_THAT(fr.fresnel_m, Catch::Matchers::WithinRel(0.235, 5e-3));
    CHECK_THAT(fr.fraunhofer_m, Catch::Matchers::WithinRel(4.25, 5e-3));
    CHECK(fr.fresnel_m < fr.fraunhofer_m);

    cfg.n_antennas = 1;
    cfg.n_rfc = 1;
    fr = fresnel_fraunhofer(antenna_positions(cfg));
    CHECK(fr.fresnel_m == 0.0);
    CHECK(fr.fraunhofer_m == 0.0);

    cfg.n_antennas = 32;
    cfg.n_rfc = 32;
    geom = antenna_positions(cfg);
    fr = fresnel_fraunhofer(geom);
    const double R = 31.0 * geom.carrier_wavelength_m / 2.0;
    CHECK_THAT(fr.fraunhofer_m,
               Catch::Matchers::WithinRel(2.0 * R * R / geom.carrier_wavelength_m, 1e-14));
}

TEST_CASE("scenario config: validation and noise variance")
{
    ScenarioConfig cfg = default_cfg();
    cfg.validate();
    // delta_f * K = W exactly
    CHECK(cfg.subcarrier_spacing_hz() * cfg.n_subcarriers == cfg.bandwidth_hz);

    // dB arithmetic oracle: sigma^2 = 10^((-173.855 + 10)/10) mW/Hz * 400 MHz
    const double expect = std::pow(10.0, (-173.855 + 10.0) / 10.0) * 1e-3 * 400e6;
    CHECK_THAT(cfg.noise_variance_w(), Catch::Matchers::WithinRel(expect, 1e-14));
    CHECK_THAT(cfg.noise_variance_w(), Catch::Matchers::WithinRel(1.6464935e-11, 1e-6));

    ScenarioConfig no_nf = cfg;
    no_nf.noise_figure_db = 0.0;
    CHECK_THAT(no_nf.noise_variance_w(),
               Catch::Matchers::WithinRel(cfg.noise_psd_w_hz * cfg.bandwidth_hz, 1e-15));

    ScenarioConfig half = cfg;
    half.bandwidth_hz /= 2.0;
    CHECK_THAT(half.noise_variance_w(), Catch::Matchers::WithinRel(cfg.noise_variance_w() / 2.0, 1e-15));

    ScenarioConfig bad = cfg;
    bad.n_rfc = 100;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.bandwidth_hz = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = cfg;
    bad.n_antennas = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("scenario config file round trip")
{
    const std::string path = "test_scenario.cfg";
    {
        std::ofstream out(path);
        out << "# test scenario\n";
        out << "n_antennas 32\n";
        out << "n_rfc 1\n";
        out << "n_transmissions 50\n";
        out << "n_subcarriers 10\n";
        out << "carrier_freq_hz 140e9\n";
        out << "bandwidth_hz 100e6\n";
        out << "tx_power_dbm 10\n";
        out << "noise_psd_dbm_hz -173.855\n";
        out << "noise_figure_db 10\n";
        out << "seed 42\n";
    }
    const ScenarioConfig cfg = load_scenario_config(path);
    CHECK(cfg.n_antennas == 32);
    CHECK(cfg.n_rfc == 1);
    CHECK(cfg.n_transmissions == 50);
    CHECK(cfg.bandwidth_hz == 100e6);
    CHECK_THAT(cfg.tx_power_w, Catch::Matchers::WithinRel(0.01, 1e-14));
    CHECK(cfg.seed == 42);

    {
        std::ofstream out(path);
        out << "n_antennas 32\nbogus_key 1\n";
    }
    CHECK_THROWS(load_scenario_config(path));
    std::remove(path.c_str());
}
