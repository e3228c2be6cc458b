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
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "nfmm/scenario.hpp"

namespace nfmm
{

/// Channel model selector. MM is the stationary narrowband far-field model;
/// TM is the full near-field wideband model; the TM_* variants switch on a
/// single impairment at a time (amplitude non-stationarity, spherical
/// wavefront, beam squint).
enum class ModelKind
{
    MM,
    TM,
    TM_SNS,
    TM_SWM,
    TM_BSE
};

inline const char* to_string(ModelKind kind)
{
    switch (kind)
    {
    case ModelKind::MM: return "MM";
    case ModelKind::TM: return "TM";
    case ModelKind::TM_SNS: return "TM-SNS";
    case ModelKind::TM_SWM: return "TM-SWM";
    case ModelKind::TM_BSE: return "TM-BSE";
    }
    throw std::logic_error("unreachable model kind");
}

inline ModelKind parse_model_kind(const std::string& s)
{
    if (s == "MM" || s == "mm") return ModelKind::MM;
    if (s == "TM" || s == "tm") return ModelKind::TM;
    if (s == "TM-SNS" || s == "tm-sns" || s == "TM_SNS") return ModelKind::TM_SNS;
    if (s == "TM-SWM" || s == "tm-swm" || s == "TM_SWM") return ModelKind::TM_SWM;
    if (s == "TM-BSE" || s == "tm-bse" || s == "TM_BSE") return ModelKind::TM_BSE;
    throw std::invalid_argument("unknown model kind: " + s);
}

/// Channel parameterization theta_c = [aoa, toa, rho, xi].
struct ChannelParams
{
    double aoa_rad = 0.0;       // in (-pi/2, pi/2)
    double toa_s = 0.0;         // > 0
    double gain_mag = 0.0;      // rho > 0
    double gain_phase_rad = 0.0; // xi in [0, 2*pi)

    Eigen::Vector4d vec() const { return {aoa_rad, toa_s, gain_mag, gain_phase_rad}; }

    void validate() const
    {
        if (!(std::abs(aoa_rad) < M_PI / 2.0)) throw std::invalid_argument("aoa out of (-pi/2, pi/2)");
        if (!(toa_s > 0.0)) throw std::invalid_argument("toa must be > 0");
        if (!(gain_mag > 0.0)) throw std::invalid_argument("gain magnitude must be > 0");
        if (!std::isfinite(gain_phase_rad)) throw std::invalid_argument("gain phase must be finite");
    }
};

/// State parameterization theta_s = [p_x, p_y, rho, xi].
struct StateParams
{
    Eigen::Vector2d position_m{0.0, 0.0};
    double gain_mag = 0.0;
    double gain_phase_rad = 0.0;

    Eigen::Vector4d vec() const
    {
        return {position_m.x(), position_m.y(), gain_mag, gain_phase_rad};
    }

    void validate() const
    {
        if (!(position_m.norm() > 0.0)) throw std::invalid_argument("position must be nonzero");
        if (!(position_m.x() > 0.0)) throw std::invalid_argument("position must lie in the x > 0 half-plane");
        if (!(gain_mag > 0.0)) throw std::invalid_argument("gain magnitude must be > 0");
        if (!std::isfinite(gain_phase_rad)) throw std::invalid_argument("gain phase must be finite");
    }
};

/// (aoa, toa) from a position in the front half-plane. The UE is restricted
/// to p_x > 0 so the AOA stays inside (-pi/2, pi/2).
inline std::pair<double, double> params_from_position(const Eigen::Vector2d& p)
{
    const double r = p.norm();
    if (!(r > 0.0)) throw std::invalid_argument("zero-norm position");
    if (!(p.x() > 0.0)) throw std::invalid_argument("position must lie in the x > 0 half-plane");
    return {std::atan2(p.y(), p.x()), r / speed_of_light};
}

inline Eigen::Vector2d position_from_params(double aoa_rad, double toa_s)
{
    if (!(std::abs(aoa_rad) < M_PI / 2.0)) throw std::invalid_argument("aoa out of (-pi/2, pi/2)");
    if (!(toa_s > 0.0)) throw std::invalid_argument("toa must be > 0");
    const double r = toa_s * speed_of_light;
    return {r * std::cos(aoa_rad), r * std::sin(aoa_rad)};
}

inline ChannelParams channel_from_state(const StateParams& s)
{
    const auto [aoa, toa] = params_from_position(s.position_m);
    return ChannelParams{aoa, toa, s.gain_mag, s.gain_phase_rad};
}

inline StateParams state_from_channel(const ChannelParams& c)
{
    return StateParams{position_from_params(c.aoa_rad, c.toa_s), c.gain_mag, c.gain_phase_rad};
}

} // namespace nfmm
