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
#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "nfmm/params.hpp"
#include "nfmm/scenario.hpp"

namespace nfmm
{

using cd = std::complex<double>;
constexpr cd cj{0.0, 1.0};

/// pi * (2n - N - 1) / 2 for 0-based antenna index n; the half-wavelength
/// ULA phase coefficient such that the far-field steering element is
/// exp(j * coef * sin(aoa)).
inline double ula_phase_coef(int n, int n_antennas)
{
    return M_PI * (2.0 * (n + 1) - n_antennas - 1) / 2.0;
}

/// Far-field steering vector a(aoa); element n is
/// exp(j * pi * (2n - N - 1) * sin(aoa) / 2). Unit-modulus elements.
inline Eigen::VectorXcd steering_vector(double aoa_rad, int n_antennas)
{
    Eigen::VectorXcd a(n_antennas);
    const double s = std::sin(aoa_rad);
    for (int n = 0; n < n_antennas; ++n)
        a(n) = std::exp(cj * (ula_phase_coef(n, n_antennas) * s));
    return a;
}

/// Frequency-dependent (squinted) steering vector; element n is
/// exp(j * pi * (2n - N - 1) * sin(aoa) * (lambda_c / lambda_k) / 2).
inline Eigen::VectorXcd steering_vector_bse(double aoa_rad, int k, const ScenarioConfig& cfg)
{
    const double ratio = cfg.wavelength_m() / cfg.subcarrier_wavelength_m(k);
    Eigen::VectorXcd a(cfg.n_antennas);
    const double s = std::sin(aoa_rad) * ratio;
    for (int n = 0; n < cfg.n_antennas; ++n)
        a(n) = std::exp(cj * (ula_phase_coef(n, cfg.n_antennas) * s));
    return a;
}

/// Delay term D_k = exp(-j * 2 pi * f_k * toa), full form (the carrier
/// component is kept rather than folded into the gain).
inline cd delay_term_toa(double toa_s, int k, const ScenarioConfig& cfg)
{
    return std::exp(-cj * (2.0 * M_PI * cfg.subcarrier_freq_hz(k) * toa_s));
}

inline cd delay_term(const Eigen::Vector2d& p, int k, const ScenarioConfig& cfg)
{
    const double r = p.norm();
    if (!(r > 0.0)) throw std::invalid_argument("zero-norm position");
    return delay_term_toa(r / speed_of_light, k, cfg);
}

/// Free-space complex gain alpha = rho * exp(-j xi), rho = lambda_c / (4 pi ||p||).
inline cd path_gain(const Eigen::Vector2d& p, double xi_rad, const ArrayGeometry& geom)
{
    const double r = p.norm();
    if (!(r > 0.0)) throw std::invalid_argument("zero-norm position");
    const double rho = geom.carrier_wavelength_m / (4.0 * M_PI * r);
    return rho * std::exp(-cj * xi_rad);
}

/// Free-space gain magnitude rho(p) = lambda_c / (4 pi ||p||).
inline double path_gain_mag(const Eigen::Vector2d& p, const ArrayGeometry& geom)
{
    const double r = p.norm();
    if (!(r > 0.0)) throw std::invalid_argument("zero-norm position");
    return geom.carrier_wavelength_m / (4.0 * M_PI * r);
}

/// Non-stationary amplitude c_{k,n} = lambda_k ||p|| / (lambda_c ||p - b_n||).
inline double sns_amplitude(const Eigen::Vector2d& p, int k, int n, const ArrayGeometry& geom,
                            const ScenarioConfig& cfg)
{
    const double d = (p - geom.positions_m.at(n)).norm();
    if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
    return cfg.subcarrier_wavelength_m(k) * p.norm() / (geom.carrier_wavelength_m * d);
}

/// Spherical-wavefront phase d_{k,n} = exp(-j (2 pi / lambda_k)(||p - b_n|| - ||p||)).
inline cd spherical_phase(const Eigen::Vector2d& p, int k, int n, const ArrayGeometry& geom,
                          const ScenarioConfig& cfg)
{
    const double d = (p - geom.positions_m.at(n)).norm();
    if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
    const double excess = d - p.norm();
    return std::exp(-cj * (2.0 * M_PI / cfg.subcarrier_wavelength_m(k) * excess));
}

/// Channel vector h_k for the requested model variant. All variants share
/// the gain alpha = rho exp(-j xi) and the full delay term D_k; they differ
/// in the per-antenna factor:
///   MM      a_n(aoa)
///   TM      c_{k,n}(p) * d_{k,n}(p)
///   TM_SNS  c_{k,n}(p) * a_n(aoa)
///   TM_SWM  exp(-j (2 pi / lambda_c)(||p - b_n|| - ||p||))
///   TM_BSE  a~_{k,n}(aoa)
inline Eigen::VectorXcd channel_vector(ModelKind kind, const StateParams& state, int k,
                                       const ArrayGeometry& geom, const ScenarioConfig& cfg)
{
    state.validate();
    cfg.check_subcarrier(k);
    const Eigen::Vector2d p = state.position_m;
    const double r = p.norm();
    const auto [aoa, toa] = params_from_position(p);
    const cd alpha = state.gain_mag * std::exp(-cj * state.gain_phase_rad);
    const cd dk = delay_term_toa(toa, k, cfg);
    const double lam_c = geom.carrier_wavelength_m;
    const double lam_k = cfg.subcarrier_wavelength_m(k);
    const int N = cfg.n_antennas;

    Eigen::VectorXcd h(N);
    switch (kind)
    {
    case ModelKind::MM:
    {
        const double s = std::sin(aoa);
        for (int n = 0; n < N; ++n)
            h(n) = alpha * std::exp(cj * (ula_phase_coef(n, N) * s)) * dk;
        break;
    }
    case ModelKind::TM:
    {
        for (int n = 0; n < N; ++n)
        {
            const double d = (p - geom.positions_m[n]).norm();
            if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
            const double c = lam_k * r / (lam_c * d);
            const cd sph = std::exp(-cj * (2.0 * M_PI / lam_k * (d - r)));
            h(n) = alpha * c * sph * dk;
        }
        break;
    }
    case ModelKind::TM_SNS:
    {
        const double s = std::sin(aoa);
        for (int n = 0; n < N; ++n)
        {
            const double d = (p - geom.positions_m[n]).norm();
            if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
            const double c = lam_k * r / (lam_c * d);
            h(n) = alpha * c * std::exp(cj * (ula_phase_coef(n, N) * s)) * dk;
        }
        break;
    }
    case ModelKind::TM_SWM:
    {
        for (int n = 0; n < N; ++n)
        {
            const double d = (p - geom.positions_m[n]).norm();
            if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
            const cd sph = std::exp(-cj * (2.0 * M_PI / lam_c * (d - r)));
            h(n) = alpha * sph * dk;
        }
        break;
    }
    case ModelKind::TM_BSE:
    {
        const double s = std::sin(aoa) * (lam_c / lam_k);
        for (int n = 0; n < N; ++n)
            h(n) = alpha * std::exp(cj * (ula_phase_coef(n, N) * s)) * dk;
        break;
    }
    }
    return h;
}

} // namespace nfmm
