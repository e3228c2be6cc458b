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

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "nfmm/bounds.hpp"
#include "nfmm/derivatives.hpp"
#include "nfmm/observation.hpp"

namespace nfmm
{

struct PseudoTrueOptions
{
    int n_angle_grid = 200;
    int n_range_grid = 200;
    double angle_margin_rad = 0.01;  // grid spans (-pi/2 + m, pi/2 - m)
    double range_min_m = 0.1;
    double range_max_m = 20.0;
    int max_refine_iterations = 600;
    double step_tol = 1e-10;         // simplex extent, in (rad, m) coordinates
    double objective_tol_rel = 1e-14; // f-spread relative to ||mu_bar||^2
    double tie_tol_rel = 1e-9;       // cost tie tolerance for alias branches
};

/// Pseudo-true parameters of the mismatched (MM) fit to a true-model mean.
struct PseudoTrueResult
{
    ChannelParams theta0;
    double residual = 0.0; // ||mu_bar - mu~(theta0)||^2
    bool converged = false;
    int iterations = 0;
    double stationarity = 0.0; // max_i |Re<dmu_i, eps>| / (||mu_bar|| ||dmu_i||)
};

namespace detail
{

/// 2-D Nelder-Mead. Returns best point; `iters` counts accepted iterations.
inline Eigen::Vector2d nelder_mead_2d(const std::function<double(const Eigen::Vector2d&)>& f,
                                      const Eigen::Vector2d& start, const Eigen::Vector2d& init_step,
                                      int max_iter, double step_tol, double f_tol, int& iters,
                                      bool& converged, double* best_f = nullptr)
{
    std::array<Eigen::Vector2d, 3> x{start, start + Eigen::Vector2d(init_step.x(), 0.0),
                                     start + Eigen::Vector2d(0.0, init_step.y())};
    std::array<double, 3> fx{f(x[0]), f(x[1]), f(x[2])};

    auto order = [&] {
        if (fx[0] > fx[1]) { std::swap(fx[0], fx[1]); std::swap(x[0], x[1]); }
        if (fx[1] > fx[2]) { std::swap(fx[1], fx[2]); std::swap(x[1], x[2]); }
        if (fx[0] > fx[1]) { std::swap(fx[0], fx[1]); std::swap(x[0], x[1]); }
    };
    order();

    converged = false;
    for (iters = 0; iters < max_iter; ++iters)
    {
        const double extent = std::max((x[1] - x[0]).cwiseAbs().maxCoeff(),
                                       (x[2] - x[0]).cwiseAbs().maxCoeff());
        if (extent < step_tol && std::abs(fx[2] - fx[0]) < f_tol)
        {
            converged = true;
            break;
        }
        const Eigen::Vector2d centroid = 0.5 * (x[0] + x[1]);
        const Eigen::Vector2d xr = centroid + (centroid - x[2]);
        const double fr = f(xr);
        if (fr < fx[0])
        {
            const Eigen::Vector2d xe = centroid + 2.0 * (centroid - x[2]);
            const double fe = f(xe);
            if (fe < fr) { x[2] = xe; fx[2] = fe; }
            else { x[2] = xr; fx[2] = fr; }
        }
        else if (fr < fx[1])
        {
            x[2] = xr;
            fx[2] = fr;
        }
        else
        {
            const Eigen::Vector2d xc =
                centroid + 0.5 * ((fr < fx[2] ? xr : x[2]) - centroid);
            const double fc = f(xc);
            if (fc < std::min(fr, fx[2])) { x[2] = xc; fx[2] = fc; }
            else
            {
                // shrink toward the best vertex
                for (int i = 1; i < 3; ++i)
                {
                    x[i] = x[0] + 0.5 * (x[i] - x[0]);
                    fx[i] = f(x[i]);
                }
            }
        }
        order();
    }
    if (best_f) *best_f = fx[0];
    return x[0];
}

/// Concentrated MM least-squares cost over (aoa, range): with the gain
/// eliminated in closed form, cost = ||mu_bar||^2 - |eta^H mu_bar|^2 / ||eta||^2
/// where eta(aoa, toa) is the MM mean at unit gain.
struct MmFitObjective
{
    const Scene* scene;
    Eigen::VectorXcd mu_bar;
    double mu_norm2 = 0.0;

    MmFitObjective(const Scene& s, const Eigen::VectorXcd& mu) : scene(&s), mu_bar(mu)
    {
        mu_norm2 = mu_bar.squaredNorm();
    }

    Eigen::VectorXcd eta(double aoa, double toa_s) const
    {
        const auto& cfg = scene->config;
        const int G = cfg.n_transmissions, K = cfg.n_subcarriers;
        const int M = scene->combiners.n_outputs();
        const Eigen::VectorXcd a = steering_vector(aoa, cfg.n_antennas);
        Eigen::VectorXcd out(static_cast<Eigen::Index>(G) * K * M);
        for (int k = 0; k < K; ++k)
        {
            const cd dk = delay_term_toa(toa_s, k, cfg);
            for (int g = 0; g < G; ++g)
            {
                const cd x = scene->pilots.symbols(g, k);
                const Eigen::Index off = static_cast<Eigen::Index>(g * K + k) * M;
                if (scene->combiners.mode == CombinerMode::digital)
                    out.segment(off, M) = a * (dk * x);
                else
                    out.segment(off, M) = scene->combiners.w[g].transpose() * (a * (dk * x));
            }
        }
        return out;
    }

    /// z = (aoa [rad], range [m])
    double operator()(const Eigen::Vector2d& z) const
    {
        if (!(std::abs(z.x()) < M_PI / 2.0) || !(z.y() > 0.0))
            return std::numeric_limits<double>::infinity();
        const Eigen::VectorXcd e = eta(z.x(), z.y() / speed_of_light);
        const cd s = e.dot(mu_bar);
        return mu_norm2 - std::norm(s) / e.squaredNorm();
    }

    cd gain(const Eigen::Vector2d& z) const
    {
        const Eigen::VectorXcd e = eta(z.x(), z.y() / speed_of_light);
        return e.dot(mu_bar) / e.squaredNorm();
    }
};

} // namespace detail

/// theta_0 = argmin_theta ||mu_bar(theta_bar) - mu~(theta)||^2 over the MM
/// manifold, with the complex gain concentrated out. Coarse grid over
/// (aoa, range), Nelder-Mead refinement, and a delay-alias disambiguation:
/// the MM cost is periodic in toa with period 1/delta_f whenever
/// f_c/delta_f is an integer, so near-tied minimizers are resolved toward
/// the branch nearest the true delay.
inline PseudoTrueResult pseudo_true(ModelKind kind_data, const StateParams& theta_bar,
                                    const Scene& scene, const PseudoTrueOptions& opt = {})
{
    theta_bar.validate();
    const Eigen::VectorXcd mu_bar = noise_free_observation(kind_data, theta_bar, scene);
    const detail::MmFitObjective obj(scene, mu_bar);
    const auto& cfg = scene.config;
    const auto [aoa_bar, toa_bar] = params_from_position(theta_bar.position_m);
    const double range_bar = toa_bar * speed_of_light;

    // --- coarse grid, factorized: cost(aoa, range) needs only
    //     c_k(aoa) = sum_g (W_g^T a)^H mu_{g,k} and the per-angle eta norm.
    const int A = opt.n_angle_grid, T = opt.n_range_grid;
    const int G = cfg.n_transmissions, K = cfg.n_subcarriers;
    const int M = scene.combiners.n_outputs();
    const double x_abs = std::sqrt(cfg.tx_power_w);

    Eigen::MatrixXcd ck(A, K);
    Eigen::VectorXd eta_norm2(A);
    std::vector<double> angles(A), ranges(T);
    for (int i = 0; i < A; ++i)
        angles[i] = -M_PI / 2.0 + opt.angle_margin_rad +
                    i * (M_PI - 2.0 * opt.angle_margin_rad) / (A - 1);
    for (int j = 0; j < T; ++j)
        ranges[j] = opt.range_min_m + j * (opt.range_max_m - opt.range_min_m) / (T - 1);

    for (int i = 0; i < A; ++i)
    {
        const Eigen::VectorXcd a = steering_vector(angles[i], cfg.n_antennas);
        double n2 = 0.0;
        for (int k = 0; k < K; ++k) ck(i, k) = cd(0.0, 0.0);
        for (int g = 0; g < G; ++g)
        {
            Eigen::VectorXcd wa;
            if (scene.combiners.mode == CombinerMode::digital)
                wa = a;
            else
                wa = scene.combiners.w[g].transpose() * a;
            n2 += wa.squaredNorm();
            for (int k = 0; k < K; ++k)
                ck(i, k) += wa.dot(mu_bar.segment(static_cast<Eigen::Index>(g * K + k) * M, M));
        }
        eta_norm2(i) = cfg.tx_power_w * K * n2;
    }

    double best_cost = std::numeric_limits<double>::infinity();
    int best_i = 0, best_j = 0;
    Eigen::VectorXcd dbar(K);
    for (int j = 0; j < T; ++j)
    {
        const double toa = ranges[j] / speed_of_light;
        for (int k = 0; k < K; ++k)
            dbar(k) = std::conj(delay_term_toa(toa, k, cfg)) * x_abs;
        for (int i = 0; i < A; ++i)
        {
            cd s(0.0, 0.0);
            for (int k = 0; k < K; ++k) s += dbar(k) * ck(i, k);
            const double cost = obj.mu_norm2 - std::norm(s) / eta_norm2(i);
            if (cost < best_cost) // strict: lowest linear index wins ties
            {
                best_cost = cost;
                best_i = i;
                best_j = j;
            }
        }
    }

    // --- local refinement candidates
    const Eigen::Vector2d grid_step(angles.size() > 1 ? angles[1] - angles[0] : 1e-2,
                                    ranges.size() > 1 ? ranges[1] - ranges[0] : 1e-2);
    const double f_tol = opt.objective_tol_rel * obj.mu_norm2;
    const double tie_tol = opt.tie_tol_rel * obj.mu_norm2;

    struct Candidate
    {
        Eigen::Vector2d z;
        double cost;
        int iters;
        bool converged;
    };
    auto refine = [&](const Eigen::Vector2d& z0, double step_scale) {
        Candidate c;
        c.z = detail::nelder_mead_2d(std::cref(obj), z0, step_scale * grid_step,
                                     opt.max_refine_iterations, opt.step_tol, f_tol, c.iters,
                                     c.converged, &c.cost);
        return c;
    };

    std::vector<Candidate> cands;
    cands.push_back(refine({angles[best_i], ranges[best_j]}, 0.5));

    // delay-alias wrap toward the true range (exact ties when fc/df is integer)
    const double period_m = speed_of_light / cfg.subcarrier_spacing_hz();
    const double wrap = std::round((cands[0].z.y() - range_bar) / period_m);
    if (wrap != 0.0)
    {
        const Eigen::Vector2d z_wrapped(cands[0].z.x(), cands[0].z.y() - wrap * period_m);
        if (z_wrapped.y() > 0.0) cands.push_back(refine(z_wrapped, 0.05));
    }
    // the projection of theta_bar itself; guarantees residual <= start residual
    cands.push_back(refine({aoa_bar, range_bar}, 0.05));

    const Candidate* best = &cands[0];
    for (const auto& c : cands)
    {
        const bool better = c.cost < best->cost - tie_tol;
        const bool tie_nearer = std::abs(c.cost - best->cost) <= tie_tol &&
                                std::abs(c.z.y() - range_bar) < std::abs(best->z.y() - range_bar);
        if (better || tie_nearer) best = &c;
    }

    PseudoTrueResult res;
    const cd gain = obj.gain(best->z);
    res.theta0.aoa_rad = best->z.x();
    res.theta0.toa_s = best->z.y() / speed_of_light;
    res.theta0.gain_mag = std::abs(gain);
    res.theta0.gain_phase_rad = std::fmod(-std::arg(gain) + 2.0 * M_PI, 2.0 * M_PI);
    res.residual = best->cost;
    res.converged = best->converged;
    res.iterations = best->iters;

    // first-order optimality of the least-squares fit
    {
        const Scene& s = scene;
        const StateParams st0 = state_from_channel(res.theta0);
        const StackedMeanDerivs d =
            stacked_mean_derivatives(ModelKind::MM, st0, Parameterization::channel, s);
        const Eigen::VectorXcd eps = mu_bar - d.mean;
        const double mu_norm = std::sqrt(obj.mu_norm2);
        double worst = 0.0;
        for (int i = 0; i < 4; ++i)
        {
            const double v = std::abs(d.d[i].dot(eps).real()) / (mu_norm * d.d[i].norm());
            worst = std::max(worst, v);
        }
        res.stationarity = worst;
    }
    return res;
}

/// [A]_{ij} = (2/sigma^2) Re{ <eps, d2mu~_ij> - <dmu~_i, dmu~_j> } at theta0.
/// Second derivatives of the MM mean are analytic (the MM factors into
/// elementary terms); finite differences of the first derivatives are kept
/// as a test oracle only, being too noisy at small mismatch.
inline Eigen::Matrix4d matrix_a(const ChannelParams& theta0, const Eigen::VectorXcd& mu_bar,
                                const Scene& scene)
{
    const StateParams st0 = state_from_channel(theta0);
    const StackedMeanDerivs d =
        stacked_mean_derivatives(ModelKind::MM, st0, Parameterization::channel, scene);
    const MmMeanHessian h2 = mm_mean_hessian(theta0, scene);
    const Eigen::VectorXcd eps = mu_bar - d.mean;
    const double sigma2 = scene.config.noise_variance_w();

    Eigen::Matrix4d a;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
        {
            const double v =
                2.0 / sigma2 * (eps.dot(h2(i, j)).real() - d.d[j].dot(d.d[i]).real());
            a(i, j) = v;
            a(j, i) = v;
        }
    return a;
}

/// [B]_{ij} = (4/sigma^4) Re<dmu~_i, eps> Re<dmu~_j, eps>
///          + (2/sigma^2) Re<dmu~_i, dmu~_j>, at theta0. Symmetric PSD.
inline Eigen::Matrix4d matrix_b(const ChannelParams& theta0, const Eigen::VectorXcd& mu_bar,
                                const Scene& scene)
{
    const StateParams st0 = state_from_channel(theta0);
    const StackedMeanDerivs d =
        stacked_mean_derivatives(ModelKind::MM, st0, Parameterization::channel, scene);
    const Eigen::VectorXcd eps = mu_bar - d.mean;
    const double sigma2 = scene.config.noise_variance_w();

    Eigen::Vector4d v;
    for (int i = 0; i < 4; ++i) v(i) = eps.dot(d.d[i]).real();
    Eigen::Matrix4d b;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j)
        {
            const double g = d.d[j].dot(d.d[i]).real();
            const double val = 4.0 / (sigma2 * sigma2) * v(i) * v(j) + 2.0 / sigma2 * g;
            b(i, j) = val;
            b(j, i) = val;
        }
    return b;
}

/// MCRB sandwich and total lower bound of the mismatched estimator:
/// LB = A^-1 B A^-1 + (theta_bar - theta0)(theta_bar - theta0)^T, in MM
/// channel parameters; the state-domain matrices map through the Jacobian
/// at theta0.
struct McrbResult
{
    PseudoTrueResult pseudo;
    Eigen::Matrix4d matrix_a = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d matrix_b = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d mcrb = Eigen::Matrix4d::Zero();      // channel parameters
    Eigen::Matrix4d bias_term = Eigen::Matrix4d::Zero(); // channel parameters
    Eigen::Matrix4d lb = Eigen::Matrix4d::Zero();        // channel parameters
    Eigen::Matrix4d mcrb_state = Eigen::Matrix4d::Zero();
    Eigen::Matrix4d lb_state = Eigen::Matrix4d::Zero();

    double lb_peb_m() const { return std::sqrt(lb_state.topLeftCorner<2, 2>().trace()); }
    double lb_aeb_rad() const { return std::sqrt(lb(0, 0)); }
    double lb_deb_s() const { return std::sqrt(lb(1, 1)); }
    double mcrb_peb_m() const { return std::sqrt(mcrb_state.topLeftCorner<2, 2>().trace()); }
};

inline McrbResult lower_bound(ModelKind kind_data, const StateParams& theta_bar, const Scene& scene,
                              const PseudoTrueOptions& opt = {})
{
    McrbResult res;
    res.pseudo = pseudo_true(kind_data, theta_bar, scene, opt);
    const Eigen::VectorXcd mu_bar = noise_free_observation(kind_data, theta_bar, scene);

    res.matrix_a = matrix_a(res.pseudo.theta0, mu_bar, scene);
    res.matrix_b = matrix_b(res.pseudo.theta0, mu_bar, scene);

    const Eigen::Matrix4d a_inv = psd_inverse(-res.matrix_a).inverse; // -A is PD near theta0
    res.mcrb = a_inv * res.matrix_b * a_inv;

    const ChannelParams theta_bar_c = channel_from_state(theta_bar);
    Eigen::Vector4d delta = theta_bar_c.vec() - res.pseudo.theta0.vec();
    delta(3) = std::remainder(delta(3), 2.0 * M_PI); // phase difference in (-pi, pi]
    res.bias_term = delta * delta.transpose();
    res.lb = res.mcrb + res.bias_term;

    const Eigen::Matrix4d jc = jacobian_channel_from_state(state_from_channel(res.pseudo.theta0));
    res.mcrb_state = jc * res.mcrb * jc.transpose();
    res.lb_state = jc * res.lb * jc.transpose();
    return res;
}

/// Whether Eq.-(22)-style model-mismatch errors are formed from variance
/// bounds (squared) or root bounds. Calibrated default: rmse.
enum class MmeDomain
{
    variance,
    rmse
};

inline const char* to_string(MmeDomain d)
{
    return d == MmeDomain::variance ? "variance" : "rmse";
}

inline MmeDomain parse_mme_domain(const std::string& s)
{
    if (s == "variance") return MmeDomain::variance;
    if (s == "rmse") return MmeDomain::rmse;
    throw std::invalid_argument("unknown mme domain: " + s);
}

inline constexpr double mme_floor_db = -120.0;

/// MME = 10 log10(|crb - lb| / crb), floored at -120 dB.
inline double mme_db(double crb, double lb)
{
    if (!(crb > 0.0)) throw std::invalid_argument("CRB must be > 0 in the MME");
    const double ratio = std::abs(crb - lb) / crb;
    if (!(ratio > 0.0)) return mme_floor_db;
    return std::max(10.0 * std::log10(ratio), mme_floor_db);
}

struct MmeReport
{
    double mme_peb_db = 0.0, mme_aeb_db = 0.0, mme_deb_db = 0.0;
    double crb_peb = 0.0, crb_aeb = 0.0, crb_deb = 0.0; // in the selected domain
    double lb_peb = 0.0, lb_aeb = 0.0, lb_deb = 0.0;
    MmeDomain domain = MmeDomain::rmse;
};

/// Assembles the three MMEs from a true-model CRB report and the MCRB lower
/// bound, in the requested domain.
inline MmeReport make_mme_report(const BoundReport& crb_tm, const McrbResult& mcrb,
                                 MmeDomain domain)
{
    MmeReport r;
    r.domain = domain;
    const double lb_peb2 = mcrb.lb_state.topLeftCorner<2, 2>().trace();
    const double lb_aeb2 = mcrb.lb(0, 0);
    const double lb_deb2 = mcrb.lb(1, 1);
    if (domain == MmeDomain::variance)
    {
        r.crb_peb = crb_tm.peb2_m2;
        r.crb_aeb = crb_tm.aeb2_rad2;
        r.crb_deb = crb_tm.deb2_s2;
        r.lb_peb = lb_peb2;
        r.lb_aeb = lb_aeb2;
        r.lb_deb = lb_deb2;
    }
    else
    {
        r.crb_peb = crb_tm.peb_m;
        r.crb_aeb = crb_tm.aeb_rad;
        r.crb_deb = crb_tm.deb_s;
        r.lb_peb = std::sqrt(lb_peb2);
        r.lb_aeb = std::sqrt(lb_aeb2);
        r.lb_deb = std::sqrt(lb_deb2);
    }
    r.mme_peb_db = mme_db(r.crb_peb, r.lb_peb);
    r.mme_aeb_db = mme_db(r.crb_aeb, r.lb_aeb);
    r.mme_deb_db = mme_db(r.crb_deb, r.lb_deb);
    return r;
}

} // namespace nfmm
