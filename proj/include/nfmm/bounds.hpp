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

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "nfmm/derivatives.hpp"
#include "nfmm/observation.hpp"
#include "nfmm/params.hpp"

namespace nfmm
{

/// Thrown when a Fisher information matrix is numerically singular
/// (condition number beyond the guard); carries the numerical rank.
struct SingularFimError : std::runtime_error
{
    int rank;
    explicit SingularFimError(int r, double cond)
        : std::runtime_error("singular FIM: rank " + std::to_string(r) +
                             ", condition " + std::to_string(cond)),
          rank(r)
    {
    }
};

struct FimMatrix
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    Parameterization param = Parameterization::state;
    ModelKind kind = ModelKind::TM;
};

/// I(theta) = (2/sigma^2) sum_{g,k} Re{(dmu_{g,k}/dtheta)^H (dmu_{g,k}/dtheta)}.
inline FimMatrix fim(ModelKind kind, const StateParams& state, Parameterization param,
                     const Scene& scene)
{
    const StackedMeanDerivs d = stacked_mean_derivatives(kind, state, param, scene);
    const double sigma2 = scene.config.noise_variance_w();
    FimMatrix out;
    out.param = param;
    out.kind = kind;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
        {
            const double v = 2.0 / sigma2 * d.d[i].dot(d.d[j]).real(); // dot() conjugates lhs
            out.m(i, j) = v;
            out.m(j, i) = v;
        }
    if (!out.m.allFinite())
        throw std::runtime_error("non-finite FIM entries (degenerate geometry?)");
    return out;
}

/// J_s = blkdiag(J~_s, I_2) with J~_s columns [d aoa/dp, d toa/dp]:
///   d aoa/dp = (1/(c toa)) [-sin, cos], d toa/dp = p/(c ||p||).
/// Used as I(theta_s) = J_s I(theta_c) J_s^T.
inline Eigen::Matrix4d jacobian_state_from_channel(const ChannelParams& params)
{
    params.validate();
    const double s = std::sin(params.aoa_rad), c = std::cos(params.aoa_rad);
    const double ct = speed_of_light * params.toa_s;
    Eigen::Matrix4d j = Eigen::Matrix4d::Identity();
    j(0, 0) = -s / ct;
    j(1, 0) = c / ct;
    j(0, 1) = c / speed_of_light;
    j(1, 1) = s / speed_of_light;
    return j;
}

/// J_c = blkdiag(J~_c, I_2) with J~_c columns [dp/d aoa, dp/d toa]:
///   dp/d aoa = c toa [-sin, cos], dp/d toa = c [cos, sin].
/// Satisfies J~_s J~_c^T = I_2; covariance-like matrices (bounds) map as
/// LB_s = J_c LB_c J_c^T, information matrices as I_c = J_c^T I_s J_c.
inline Eigen::Matrix4d jacobian_channel_from_state(const StateParams& state)
{
    const auto [aoa, toa] = params_from_position(state.position_m);
    const double s = std::sin(aoa), c = std::cos(aoa);
    const double ct = speed_of_light * toa;
    Eigen::Matrix4d j = Eigen::Matrix4d::Identity();
    j(0, 0) = -ct * s;
    j(1, 0) = ct * c;
    j(0, 1) = speed_of_light * c;
    j(1, 1) = speed_of_light * s;
    return j;
}

struct PsdInverse
{
    Eigen::Matrix4d inverse;
    double condition = 0.0;
    int rank = 4;
};

/// Inverse of a symmetric PSD 4x4 via eigendecomposition of the
/// diagonally-scaled matrix (the parameters carry wildly different units, so
/// the raw matrix is badly scaled but not ill-conditioned). The condition
/// guard applies to the unit-diagonal form; throws SingularFimError beyond
/// `cond_limit`.
inline PsdInverse psd_inverse(const Eigen::Matrix4d& m, double cond_limit = 1e12)
{
    const Eigen::Matrix4d sym = 0.5 * (m + m.transpose());
    Eigen::Vector4d scale;
    for (int i = 0; i < 4; ++i) scale(i) = sym(i, i) > 0.0 ? 1.0 / std::sqrt(sym(i, i)) : 1.0;
    const Eigen::Matrix4d r = scale.asDiagonal() * sym * scale.asDiagonal();

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(r);
    const Eigen::Vector4d ev = es.eigenvalues();
    const double emax = ev.cwiseAbs().maxCoeff();
    if (!(emax > 0.0)) throw SingularFimError(0, std::numeric_limits<double>::infinity());
    int rank = 0;
    for (int i = 0; i < 4; ++i)
        if (ev(i) > emax / cond_limit) ++rank;
    const double emin = ev.minCoeff();
    const double cond = emin > 0.0 ? emax / emin : std::numeric_limits<double>::infinity();
    if (rank < 4) throw SingularFimError(rank, cond);
    PsdInverse out;
    out.condition = cond;
    out.rank = rank;
    out.inverse = scale.asDiagonal() *
                  (es.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                   es.eigenvectors().transpose()) *
                  scale.asDiagonal();
    return out;
}

/// Scalar error bounds from the two FIM parameterizations:
///   PEB = sqrt(tr([I(theta_s)^-1]_{1:2,1:2}))  (position block; rho, xi nuisance)
///   AEB = sqrt([I(theta_c)^-1]_{1,1})
///   DEB = sqrt([I(theta_c)^-1]_{2,2})
struct BoundReport
{
    double peb_m = 0.0;
    double aeb_rad = 0.0;
    double deb_s = 0.0;
    FimMatrix fim_state;
    FimMatrix fim_channel;
    double cond_state = 0.0;
    double cond_channel = 0.0;

    // variance-domain values (traces of the inverse blocks)
    double peb2_m2 = 0.0;
    double aeb2_rad2 = 0.0;
    double deb2_s2 = 0.0;
};

inline BoundReport error_bounds(const FimMatrix& fim_state, const FimMatrix& fim_channel)
{
    if (fim_state.param != Parameterization::state || fim_channel.param != Parameterization::channel)
        throw std::invalid_argument("error_bounds expects (state, channel) FIMs");
    BoundReport r;
    r.fim_state = fim_state;
    r.fim_channel = fim_channel;
    const PsdInverse inv_s = psd_inverse(fim_state.m);
    const PsdInverse inv_c = psd_inverse(fim_channel.m);
    r.cond_state = inv_s.condition;
    r.cond_channel = inv_c.condition;
    r.peb2_m2 = inv_s.inverse.topLeftCorner<2, 2>().trace();
    r.aeb2_rad2 = inv_c.inverse(0, 0);
    r.deb2_s2 = inv_c.inverse(1, 1);
    r.peb_m = std::sqrt(r.peb2_m2);
    r.aeb_rad = std::sqrt(r.aeb2_rad2);
    r.deb_s = std::sqrt(r.deb2_s2);
    return r;
}

/// Convenience: both FIMs and the bound report for a data-generating model.
inline BoundReport crb_bounds(ModelKind kind, const StateParams& state, const Scene& scene)
{
    return error_bounds(fim(kind, state, Parameterization::state, scene),
                        fim(kind, state, Parameterization::channel, scene));
}

} // namespace nfmm
