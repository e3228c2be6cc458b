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

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace nfmm
{

/// Speed of light [m/s].
inline constexpr double speed_of_light = 299792458.0;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, dbm / 10.0) * 1e-3; }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w * 1e3); }
inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

/// Physical and waveform constants of one uplink snapshot.
///
/// All stored quantities are linear SI units; dB/dBm appear only at the
/// configuration and CLI boundaries. Subcarrier k runs 0..K-1 with
/// f_k = f_c + k * delta_f.
struct ScenarioConfig
{
    int n_antennas = 64;      // N
    int n_rfc = 64;           // M, combiner outputs per transmission
    int n_transmissions = 1;  // G
    int n_subcarriers = 10;   // K
    double carrier_freq_hz = 140e9;
    double bandwidth_hz = 400e6;
    double tx_power_w = dbm_to_watt(20.0);
    double noise_psd_w_hz = dbm_to_watt(-173.855);
    double noise_figure_db = 10.0;
    std::uint64_t seed = 1;

    double subcarrier_spacing_hz() const { return bandwidth_hz / n_subcarriers; }
    double wavelength_m() const { return speed_of_light / carrier_freq_hz; }

    double subcarrier_freq_hz(int k) const
    {
        check_subcarrier(k);
        return carrier_freq_hz + k * subcarrier_spacing_hz();
    }

    double subcarrier_wavelength_m(int k) const { return speed_of_light / subcarrier_freq_hz(k); }

    /// sigma_n^2 = N_0 * W * 10^(N_f/10), in watts.
    double noise_variance_w() const
    {
        return noise_psd_w_hz * bandwidth_hz * db_to_linear(noise_figure_db);
    }

    void check_subcarrier(int k) const
    {
        if (k < 0 || k >= n_subcarriers)
            throw std::invalid_argument("subcarrier index out of range: " + std::to_string(k));
    }

    void validate() const
    {
        if (n_antennas < 1) throw std::invalid_argument("n_antennas must be >= 1");
        if (n_rfc < 1) throw std::invalid_argument("n_rfc must be >= 1");
        if (n_rfc > n_antennas) throw std::invalid_argument("n_rfc must be <= n_antennas");
        if (n_transmissions < 1) throw std::invalid_argument("n_transmissions must be >= 1");
        if (n_subcarriers < 1) throw std::invalid_argument("n_subcarriers must be >= 1");
        if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("bandwidth_hz must be > 0");
        if (!(carrier_freq_hz > 0.0)) throw std::invalid_argument("carrier_freq_hz must be > 0");
        if (!(tx_power_w > 0.0)) throw std::invalid_argument("tx_power_w must be > 0");
        if (!(noise_psd_w_hz > 0.0)) throw std::invalid_argument("noise_psd_w_hz must be > 0");
        if (!(noise_variance_w() > 0.0)) throw std::invalid_argument("noise variance must be > 0");
        if (!std::isfinite(noise_figure_db)) throw std::invalid_argument("noise_figure_db must be finite");
    }
};

/// Uniform linear array on the y-axis, half-wavelength spacing, centered at
/// the origin: b_n = [0, (2n - N - 1) * lambda_c / 4], n = 1..N.
struct ArrayGeometry
{
    std::vector<Eigen::Vector2d> positions_m;
    double aperture_m = 0.0;         // R = (N-1) * lambda_c / 2
    double carrier_wavelength_m = 0.0;

    int n_antennas() const { return static_cast<int>(positions_m.size()); }
};

inline ArrayGeometry antenna_positions(const ScenarioConfig& cfg)
{
    cfg.validate();
    ArrayGeometry g;
    g.carrier_wavelength_m = cfg.wavelength_m();
    g.positions_m.resize(cfg.n_antennas);
    for (int n = 0; n < cfg.n_antennas; ++n)
    {
        const double coef = 2.0 * (n + 1) - cfg.n_antennas - 1; // 2n - N - 1 for 1-based n
        g.positions_m[n] = Eigen::Vector2d(0.0, coef * g.carrier_wavelength_m / 4.0);
    }
    g.aperture_m = (cfg.n_antennas - 1) * g.carrier_wavelength_m / 2.0;
    return g;
}

struct FresnelRegion
{
    double fresnel_m = 0.0;    // D_N = 0.62 sqrt(R^3 / lambda_c)
    double fraunhofer_m = 0.0; // D_F = 2 R^2 / lambda_c
};

inline FresnelRegion fresnel_fraunhofer(const ArrayGeometry& geom)
{
    const double R = geom.aperture_m;
    const double lc = geom.carrier_wavelength_m;
    FresnelRegion r;
    r.fresnel_m = 0.62 * std::sqrt(R * R * R / lc);
    r.fraunhofer_m = 2.0 * R * R / lc;
    return r;
}

/// Loads a ScenarioConfig from a flat key-value text file. Lines are
/// "key value" or "key = value"; '#' starts a comment. Power and noise
/// keys are given in dBm / dBm/Hz / dB and converted to SI on load.
inline ScenarioConfig load_scenario_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);

    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line))
    {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::string key, eq, value;
        std::istringstream ls(line);
        if (!(ls >> key)) continue;
        if (!(ls >> value)) throw std::runtime_error("malformed config line: " + line);
        if (value == "=" && !(ls >> value))
            throw std::runtime_error("malformed config line: " + line);
        kv[key] = value;
    }

    ScenarioConfig cfg;
    auto take = [&kv](const std::string& key, auto parse, auto& out) {
        auto it = kv.find(key);
        if (it == kv.end()) return;
        out = parse(it->second);
        kv.erase(it);
    };
    auto as_int = [](const std::string& s) { return std::stoi(s); };
    auto as_double = [](const std::string& s) { return std::stod(s); };
    auto as_u64 = [](const std::string& s) { return static_cast<std::uint64_t>(std::stoull(s)); };

    take("n_antennas", as_int, cfg.n_antennas);
    take("n_rfc", as_int, cfg.n_rfc);
    take("n_transmissions", as_int, cfg.n_transmissions);
    take("n_subcarriers", as_int, cfg.n_subcarriers);
    take("carrier_freq_hz", as_double, cfg.carrier_freq_hz);
    take("bandwidth_hz", as_double, cfg.bandwidth_hz);
    double tmp;
    if (kv.count("tx_power_dbm")) { tmp = as_double(kv["tx_power_dbm"]); cfg.tx_power_w = dbm_to_watt(tmp); kv.erase("tx_power_dbm"); }
    if (kv.count("noise_psd_dbm_hz")) { tmp = as_double(kv["noise_psd_dbm_hz"]); cfg.noise_psd_w_hz = dbm_to_watt(tmp); kv.erase("noise_psd_dbm_hz"); }
    take("noise_figure_db", as_double, cfg.noise_figure_db);
    take("seed", as_u64, cfg.seed);

    if (!kv.empty()) throw std::runtime_error("unknown config key: " + kv.begin()->first);
    cfg.validate();
    return cfg;
}

} // namespace nfmm
