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

#include <array>

#include <Eigen/Dense>

#include "nfmm/channel.hpp"
#include "nfmm/observation.hpp"
#include "nfmm/params.hpp"

namespace nfmm
{

/// d h_k / d [p_x, p_y, rho, xi], each a complex N-vector.
struct ChannelStateDerivs
{
    Eigen::VectorXcd d_px, d_py, d_rho, d_xi;
};

/// d h_k / d [aoa, toa, rho, xi].
struct ChannelParamDerivs
{
    Eigen::VectorXcd d_aoa, d_toa, d_rho, d_xi;
};

/// Analytic state-space derivatives of the channel vector. The gain rows are
/// common to every variant: dh/drho = h / rho, dh/dxi = -j h. The position
/// rows use the closed forms of the free-space terms:
///   dc_{k,n}/dp = (lam_k/lam_c) (p/(||p|| ||p-b_n||) - (p-b_n)||p|| / ||p-b_n||^3)
///   dd_{k,n}/dp = -j (2 pi/lam_k) d_{k,n} ((p-b_n)/||p-b_n|| - p/||p||)
///   dD_k/dp    = -j (2 pi/lam_k) D_k p/||p||
/// with rho held fixed (it is a free parameter of theta_s, not a function of p).
/// Variant-specific factors (a_n, a~_{k,n}) differentiate through
/// d aoa/dp = (1/||p||) [-sin aoa, cos aoa].
inline ChannelStateDerivs channel_state_derivatives(ModelKind kind, const StateParams& state, int k,
                                                    const ArrayGeometry& geom,
                                                    const ScenarioConfig& cfg)
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
    const Eigen::Vector2d u = p / r;
    const Eigen::Vector2d daoa_dp = Eigen::Vector2d(-std::sin(aoa), std::cos(aoa)) / r;

    ChannelStateDerivs out;
    out.d_px.resize(N);
    out.d_py.resize(N);

    // dD_k/dp factor, shared by all variants
    const cd dDk_fac = -cj * (2.0 * M_PI / lam_k) * dk; // times u

    const Eigen::VectorXcd h = channel_vector(kind, state, k, geom, cfg);

    switch (kind)
    {
    case ModelKind::MM:
    {
        const double s = std::sin(aoa);
        for (int n = 0; n < N; ++n)
        {
            const cd a = std::exp(cj * (ula_phase_coef(n, N) * s));
            const cd da_daoa = cj * ula_phase_coef(n, N) * std::cos(aoa) * a;
            for (int i = 0; i < 2; ++i)
            {
                const cd v = alpha * (da_daoa * daoa_dp(i) * dk + a * dDk_fac * u(i));
                (i == 0 ? out.d_px : out.d_py)(n) = v;
            }
        }
        break;
    }
    case ModelKind::TM:
    {
        for (int n = 0; n < N; ++n)
        {
            const Eigen::Vector2d q = p - geom.positions_m[n];
            const double d = q.norm();
            if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
            const Eigen::Vector2d un = q / d;
            const double c = lam_k * r / (lam_c * d);
            const cd sph = std::exp(-cj * (2.0 * M_PI / lam_k * (d - r)));
            const Eigen::Vector2d dc_dp = (lam_k / lam_c) * (u / d - un * (r / (d * d)));
            const cd dsph_fac = -cj * (2.0 * M_PI / lam_k) * sph; // times (un - u)
            for (int i = 0; i < 2; ++i)
            {
                const cd v = alpha * (dc_dp(i) * sph * dk + c * dsph_fac * (un(i) - u(i)) * dk +
                                      c * sph * dDk_fac * u(i));
                (i == 0 ? out.d_px : out.d_py)(n) = v;
            }
        }
        break;
    }
    case ModelKind::TM_SNS:
    {
        const double s = std::sin(aoa);
        for (int n = 0; n < N; ++n)
        {
            const Eigen::Vector2d q = p - geom.positions_m[n];
            const double d = q.norm();
            if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
            const Eigen::Vector2d un = q / d;
            const double c = lam_k * r / (lam_c * d);
            const Eigen::Vector2d dc_dp = (lam_k / lam_c) * (u / d - un * (r / (d * d)));
            const cd a = std::exp(cj * (ula_phase_coef(n, N) * s));
            const cd da_daoa = cj * ula_phase_coef(n, N) * std::cos(aoa) * a;
            for (int i = 0; i < 2; ++i)
            {
                const cd v = alpha * (dc_dp(i) * a * dk + c * da_daoa * daoa_dp(i) * dk +
                                      c * a * dDk_fac * u(i));
                (i == 0 ? out.d_px : out.d_py)(n) = v;
            }
        }
        break;
    }
    case ModelKind::TM_SWM:
    {
        for (int n = 0; n < N; ++n)
        {
            const Eigen::Vector2d q = p - geom.positions_m[n];
            const double d = q.norm();
            if (!(d > 0.0)) throw std::invalid_argument("position coincides with an antenna");
            const Eigen::Vector2d un = q / d;
            const cd sph = std::exp(-cj * (2.0 * M_PI / lam_c * (d - r)));
            const cd dsph_fac = -cj * (2.0 * M_PI / lam_c) * sph;
            for (int i = 0; i < 2; ++i)
            {
                const cd v = alpha * (dsph_fac * (un(i) - u(i)) * dk + sph * dDk_fac * u(i));
                (i == 0 ? out.d_px : out.d_py)(n) = v;
            }
        }
        break;
    }
    case ModelKind::TM_BSE:
    {
        const double ratio = lam_c / lam_k;
        const double s = std::sin(aoa) * ratio;
        for (int n = 0; n < N; ++n)
        {
            const cd a = std::exp(cj * (ula_phase_coef(n, N) * s));
            const cd da_daoa = cj * ula_phase_coef(n, N) * std::cos(aoa) * ratio * a;
            for (int i = 0; i < 2; ++i)
            {
                const cd v = alpha * (da_daoa * daoa_dp(i) * dk + a * dDk_fac * u(i));
                (i == 0 ? out.d_px : out.d_py)(n) = v;
            }
        }
        break;
    }
    }

    out.d_rho = h / state.gain_mag;
    out.d_xi = -cj * h;
    return out;
}

/// Channel-parameter derivatives. For the MM these are the natural analytic
/// forms (da_n/daoa = j pi (2n-N-1) cos(aoa)/2 a_n, dh/dtoa = -j 2 pi f_k h);
/// the near-field variants chain through p(aoa, toa) with
/// dp/daoa = c toa [-sin, cos], dp/dtoa = c [cos, sin].
inline ChannelParamDerivs channel_param_derivatives(ModelKind kind, const ChannelParams& params,
                                                    int k, const ArrayGeometry& geom,
                                                    const ScenarioConfig& cfg)
{
    params.validate();
    cfg.check_subcarrier(k);
    const StateParams state = state_from_channel(params);

    ChannelParamDerivs out;
    if (kind == ModelKind::MM)
    {
        const cd alpha = params.gain_mag * std::exp(-cj * params.gain_phase_rad);
        const cd dk = delay_term_toa(params.toa_s, k, cfg);
        const int N = cfg.n_antennas;
        const double s = std::sin(params.aoa_rad);
        const double omega = 2.0 * M_PI * cfg.subcarrier_freq_hz(k);
        out.d_aoa.resize(N);
        out.d_toa.resize(N);
        out.d_rho.resize(N);
        out.d_xi.resize(N);
        for (int n = 0; n < N; ++n)
        {
            const cd a = std::exp(cj * (ula_phase_coef(n, N) * s));
            const cd da = cj * ula_phase_coef(n, N) * std::cos(params.aoa_rad) * a;
            const cd h = alpha * a * dk;
            out.d_aoa(n) = alpha * da * dk;
            out.d_toa(n) = -cj * omega * h;
            out.d_rho(n) = h / params.gain_mag;
            out.d_xi(n) = -cj * h;
        }
        return out;
    }

    const ChannelStateDerivs ds = channel_state_derivatives(kind, state, k, geom, cfg);
    const double ct = speed_of_light * params.toa_s;
    const Eigen::Vector2d dp_daoa(-ct * std::sin(params.aoa_rad), ct * std::cos(params.aoa_rad));
    const Eigen::Vector2d dp_dtoa(speed_of_light * std::cos(params.aoa_rad),
                                  speed_of_light * std::sin(params.aoa_rad));
    out.d_aoa = ds.d_px * dp_daoa.x() + ds.d_py * dp_daoa.y();
    out.d_toa = ds.d_px * dp_dtoa.x() + ds.d_py * dp_dtoa.y();
    out.d_rho = ds.d_rho;
    out.d_xi = ds.d_xi;
    return out;
}

/// Stacked noise-free mean mu and its four channel-parameter (or state)
/// derivative columns, combiner- and pilot-weighted. Column order matches
/// the parameter vector ([aoa, toa, rho, xi] or [p_x, p_y, rho, xi]).
struct StackedMeanDerivs
{
    Eigen::VectorXcd mean;
    std::array<Eigen::VectorXcd, 4> d;
};

enum class Parameterization
{
    channel,
    state
};

inline StackedMeanDerivs stacked_mean_derivatives(ModelKind kind, const StateParams& state,
                                                  Parameterization param, const Scene& scene)
{
    const auto& cfg = scene.config;
    const int G = cfg.n_transmissions, K = cfg.n_subcarriers;
    const int M = scene.combiners.n_outputs();
    const Eigen::Index L = static_cast<Eigen::Index>(G) * K * M;

    StackedMeanDerivs out;
    out.mean.resize(L);
    for (auto& v : out.d) v.resize(L);

    const ChannelParams cp = channel_from_state(state);
    for (int k = 0; k < K; ++k)
    {
        const Eigen::VectorXcd h = channel_vector(kind, state, k, scene.geometry, cfg);
        std::array<Eigen::VectorXcd, 4> dh;
        if (param == Parameterization::state)
        {
            const ChannelStateDerivs ds =
                channel_state_derivatives(kind, state, k, scene.geometry, cfg);
            dh = {ds.d_px, ds.d_py, ds.d_rho, ds.d_xi};
        }
        else
        {
            const ChannelParamDerivs dc = channel_param_derivatives(kind, cp, k, scene.geometry, cfg);
            dh = {dc.d_aoa, dc.d_toa, dc.d_rho, dc.d_xi};
        }
        for (int g = 0; g < G; ++g)
        {
            const cd x = scene.pilots.symbols(g, k);
            const Eigen::Index off = static_cast<Eigen::Index>(g * K + k) * M;
            if (scene.combiners.mode == CombinerMode::digital)
            {
                out.mean.segment(off, M) = h * x;
                for (int j = 0; j < 4; ++j) out.d[j].segment(off, M) = dh[j] * x;
            }
            else
            {
                const auto wt = scene.combiners.w[g].transpose();
                out.mean.segment(off, M) = wt * (h * x);
                for (int j = 0; j < 4; ++j) out.d[j].segment(off, M) = wt * (dh[j] * x);
            }
        }
    }
    return out;
}

/// Analytic second derivatives of the MM stacked mean with respect to
/// theta_c = [aoa, toa, rho, xi]. The MM mean factors as
/// mu = alpha a_n(aoa) D_k(toa) x, so every mixed partial is a product of
/// elementary factor derivatives. Returned as the 10 unique (i <= j) blocks
/// of the symmetric 4x4 Hessian.
struct MmMeanHessian
{
    std::array<Eigen::VectorXcd, 10> h2; // index via upper_index(i, j)

    static int upper_index(int i, int j)
    {
        if (i > j) std::swap(i, j);
        static constexpr int base[4] = {0, 4, 7, 9};
        return base[i] + (j - i);
    }

    const Eigen::VectorXcd& operator()(int i, int j) const { return h2[upper_index(i, j)]; }
};

inline MmMeanHessian mm_mean_hessian(const ChannelParams& params, const Scene& scene)
{
    const auto& cfg = scene.config;
    const int G = cfg.n_transmissions, K = cfg.n_subcarriers, N = cfg.n_antennas;
    const int M = scene.combiners.n_outputs();
    const Eigen::Index L = static_cast<Eigen::Index>(G) * K * M;

    MmMeanHessian out;
    for (auto& v : out.h2) v.resize(L);

    const cd alpha = params.gain_mag * std::exp(-cj * params.gain_phase_rad);
    const cd e_xi = std::exp(-cj * params.gain_phase_rad);
    const double s = std::sin(params.aoa_rad), c = std::cos(params.aoa_rad);

    Eigen::VectorXcd base(N), A1(N), A2(N);
    for (int k = 0; k < K; ++k)
    {
        const double omega = 2.0 * M_PI * cfg.subcarrier_freq_hz(k);
        const cd dk = delay_term_toa(params.toa_s, k, cfg);
        const cd T1 = -cj * omega;       // D'/D
        const double T2 = -omega * omega; // D''/D
        for (int n = 0; n < N; ++n)
        {
            const double coef = ula_phase_coef(n, N);
            const double phi = coef * s;   // steering phase
            const double phi1 = coef * c;  // d phi / d aoa
            const cd a = std::exp(cj * phi);
            base(n) = a * dk;
            A1(n) = cj * phi1;                  // a'/a
            A2(n) = -cj * phi - phi1 * phi1;    // a''/a  (phi'' = -phi)
        }

        // per-antenna second-derivative factors relative to alpha * base
        std::array<Eigen::VectorXcd, 10> blk;
        blk[MmMeanHessian::upper_index(0, 0)] = alpha * A2.cwiseProduct(base);
        blk[MmMeanHessian::upper_index(0, 1)] = alpha * T1 * A1.cwiseProduct(base);
        blk[MmMeanHessian::upper_index(0, 2)] = e_xi * A1.cwiseProduct(base);
        blk[MmMeanHessian::upper_index(0, 3)] = -cj * alpha * A1.cwiseProduct(base);
        blk[MmMeanHessian::upper_index(1, 1)] = alpha * T2 * base;
        blk[MmMeanHessian::upper_index(1, 2)] = e_xi * T1 * base;
        blk[MmMeanHessian::upper_index(1, 3)] = -cj * alpha * T1 * base;
        blk[MmMeanHessian::upper_index(2, 2)] = Eigen::VectorXcd::Zero(N);
        blk[MmMeanHessian::upper_index(2, 3)] = -cj * e_xi * base;
        blk[MmMeanHessian::upper_index(3, 3)] = -alpha * base;

        for (int g = 0; g < G; ++g)
        {
            const cd x = scene.pilots.symbols(g, k);
            const Eigen::Index off = static_cast<Eigen::Index>(g * K + k) * M;
            for (int q = 0; q < 10; ++q)
            {
                if (scene.combiners.mode == CombinerMode::digital)
                    out.h2[q].segment(off, M) = blk[q] * x;
                else
                    out.h2[q].segment(off, M) = scene.combiners.w[g].transpose() * (blk[q] * x);
            }
        }
    }
    return out;
}

} // namespace nfmm
