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

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nfmm/derivatives.hpp"
#include "nfmm/observation.hpp"
#include "nfmm/parallel.hpp"

namespace nfmm
{

/// Grid-then-refine settings for the concentrated ML estimators.
struct EstimatorConfig
{
    int n_angle_bins = 100;
    int n_range_bins = 100;              // log-spaced
    double angle_min_rad = -89.0 * M_PI / 180.0;
    double angle_max_rad = 89.0 * M_PI / 180.0;
    double range_min_m = 0.1;
    double range_max_m = 20.0;
    int max_iterations = 300;
    double initial_step_m = 1.0;  // after gradient normalization
    double step_shrink = 0.5;
    double armijo_c = 1e-4;
    double grad_tol_rel = 1e-10; // on |grad| * 1 m relative to ||y||^2
    double step_tol_m = 1e-12;   // line-search cutoff; smaller steps are rounding noise

    void validate() const
    {
        if (n_angle_bins < 1 || n_range_bins < 1)
            throw std::invalid_argument("grid bins must be positive");
        if (!(range_min_m > 0.0) || !(range_max_m > range_min_m))
            throw std::invalid_argument("invalid range interval");
        if (!(angle_max_rad > angle_min_rad) || !(std::abs(angle_min_rad) < M_PI / 2.0) ||
            !(std::abs(angle_max_rad) < M_PI / 2.0))
            throw std::invalid_argument("invalid angle range");
        if (max_iterations < 0 || !(initial_step_m > 0.0) || !(step_shrink > 0.0) ||
            !(step_shrink < 1.0) || !(armijo_c > 0.0))
            throw std::invalid_argument("invalid line-search parameters");
    }
};

/// Model direction eta(p) = mu(alpha, p)/alpha: the stacked mean at unit gain.
inline Eigen::VectorXcd model_direction(ModelKind kind, const Eigen::Vector2d& p, const Scene& scene)
{
    return noise_free_observation(kind, StateParams{p, 1.0, 0.0}, scene);
}

/// Concentrated (plug-in) negative log-likelihood up to scale:
/// cost(p) = ||y - (eta^H y / ||eta||^2) eta||^2 = ||y||^2 - |eta^H y|^2/||eta||^2.
inline double concentrated_cost(const Eigen::VectorXcd& y, const Eigen::Vector2d& p, ModelKind kind,
                                const Scene& scene)
{
    const Eigen::VectorXcd eta = model_direction(kind, p, scene);
    const double n2 = eta.squaredNorm();
    if (!(n2 > 0.0)) throw std::runtime_error("degenerate model direction");
    const cd s = eta.dot(y);
    return y.squaredNorm() - std::norm(s) / n2;
}

/// Precomputed polar search grid: unit-norm model directions for every grid
/// point. Independent of the observation, so one cache serves all trials.
struct GridCache
{
    std::vector<Eigen::Vector2d> points; // angle-major: index = ia * n_range + ir
    Eigen::MatrixXcd directions;         // rows: normalized eta^H
    ModelKind kind = ModelKind::TM;
};

inline GridCache build_grid_cache(ModelKind kind, const Scene& scene, const EstimatorConfig& ec,
                                  int n_threads = 0)
{
    ec.validate();
    GridCache cache;
    cache.kind = kind;
    const int na = ec.n_angle_bins, nr = ec.n_range_bins;
    cache.points.resize(static_cast<std::size_t>(na) * nr);
    const double log_lo = std::log(ec.range_min_m), log_hi = std::log(ec.range_max_m);
    for (int ia = 0; ia < na; ++ia)
    {
        const double ang = na == 1 ? 0.5 * (ec.angle_min_rad + ec.angle_max_rad)
                                   : ec.angle_min_rad +
                                         ia * (ec.angle_max_rad - ec.angle_min_rad) / (na - 1);
        for (int ir = 0; ir < nr; ++ir)
        {
            const double r =
                nr == 1 ? ec.range_min_m
                        : std::exp(log_lo + ir * (log_hi - log_lo) / (nr - 1));
            cache.points[static_cast<std::size_t>(ia) * nr + ir] =
                Eigen::Vector2d(r * std::cos(ang), r * std::sin(ang));
        }
    }
    cache.directions.resize(static_cast<Eigen::Index>(cache.points.size()), scene.stacked_size());
    parallel_for(static_cast<int>(cache.points.size()), n_threads, [&](int i) {
        const Eigen::VectorXcd eta = model_direction(kind, cache.points[i], scene);
        cache.directions.row(i) = (eta / eta.norm()).adjoint();
    });
    return cache;
}

/// Coarse grid search: argmin of the concentrated cost = argmax of
/// |eta^H y|^2 over the cached grid. Ties keep the lowest linear index.
inline Eigen::Vector2d grid_init(const Eigen::VectorXcd& y, const GridCache& cache)
{
    const Eigen::VectorXcd scores = cache.directions * y;
    int best = 0;
    double best_score = std::norm(scores(0));
    for (Eigen::Index i = 1; i < scores.size(); ++i)
    {
        const double v = std::norm(scores(i));
        if (v > best_score)
        {
            best_score = v;
            best = static_cast<int>(i);
        }
    }
    return cache.points[best];
}

struct TrialResult
{
    Eigen::Vector2d estimate{0.0, 0.0};
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
    std::uint64_t seed = 0;
};

/// Gradient descent with Armijo backtracking on the concentrated cost,
/// gradient computed analytically through the channel derivatives. The
/// accepted step warm-starts the next line search.
inline TrialResult refine(const Eigen::VectorXcd& y, const Eigen::Vector2d& p_init, ModelKind kind,
                          const Scene& scene, const EstimatorConfig& ec)
{
    ec.validate();
    const double y2 = y.squaredNorm();
    const double grad_tol = ec.grad_tol_rel * y2; // cost-units per meter

    auto cost_at = [&](const Eigen::Vector2d& p) -> double {
        if (!(p.x() > 0.0) || !(p.norm() > 0.0)) return std::numeric_limits<double>::infinity();
        return concentrated_cost(y, p, kind, scene);
    };
    auto gradient_at = [&](const Eigen::Vector2d& p) -> Eigen::Vector2d {
        const StackedMeanDerivs d = stacked_mean_derivatives(kind, StateParams{p, 1.0, 0.0},
                                                             Parameterization::state, scene);
        const double n2 = d.mean.squaredNorm();
        const cd s = d.mean.dot(y);
        Eigen::Vector2d g;
        for (int i = 0; i < 2; ++i)
        {
            const cd dy = d.d[i].dot(y);       // deta_i^H y
            const cd de = d.d[i].dot(d.mean);  // deta_i^H eta
            g(i) = -2.0 / n2 * (dy * std::conj(s)).real() +
                   2.0 * std::norm(s) / (n2 * n2) * de.real();
        }
        return g;
    };

    TrialResult res;
    res.estimate = p_init;
    res.cost = cost_at(p_init);
    double warm_step = ec.initial_step_m;

    for (int it = 0; it < ec.max_iterations; ++it)
    {
        const Eigen::Vector2d g = gradient_at(res.estimate);
        const double gn = g.norm();
        if (gn <= grad_tol)
        {
            res.converged = true;
            break;
        }
        const Eigen::Vector2d dir = -g / gn;
        double t = warm_step;
        bool accepted = false;
        while (t >= ec.step_tol_m)
        {
            const Eigen::Vector2d cand = res.estimate + t * dir;
            const double c = cost_at(cand);
            if (c <= res.cost - ec.armijo_c * t * gn)
            {
                res.estimate = cand;
                res.cost = c;
                accepted = true;
                break;
            }
            t *= ec.step_shrink;
        }
        if (!accepted)
        {
            // no admissible descent step above the cutoff: local minimum at
            // working precision
            res.converged = true;
            break;
        }
        ++res.iterations;
        warm_step = std::min(ec.initial_step_m, t / ec.step_shrink);
    }
    return res;
}

struct MonteCarloReport
{
    double rmse_m = 0.0;
    std::vector<double> errors_m;       // per trial, index = trial
    std::vector<TrialResult> trials;
    int n_trials = 0;
    int n_unconverged = 0;
    ModelKind kind_data = ModelKind::TM;
    ModelKind kind_estimator = ModelKind::TM;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimator benchmark: per trial t the noise stream is seeded
/// with seed + t, the estimate is grid-init + refine, and the position error
/// is recorded. Fully deterministic given (scene, seed), independent of the
/// thread count; the RMSE reduction is a compensated sum in trial order.
///
/// `shared_cache` may carry a grid cache built for the same scenario shape
/// and estimator kind (the normalized directions do not depend on the
/// transmit power, so one cache serves a whole power sweep).
inline MonteCarloReport run_monte_carlo(const Scene& scene, ModelKind kind_data,
                                        ModelKind kind_estimator, const StateParams& truth,
                                        int n_trials, std::uint64_t seed,
                                        const EstimatorConfig& ec, int n_threads = 0,
                                        const GridCache* shared_cache = nullptr)
{
    if (n_trials < 1) throw std::invalid_argument("n_trials must be >= 1");
    truth.validate();
    if (shared_cache && shared_cache->kind != kind_estimator)
        throw std::invalid_argument("shared grid cache was built for a different model kind");
    const Eigen::VectorXcd mu = noise_free_observation(kind_data, truth, scene);
    const double sigma2 = scene.config.noise_variance_w();
    GridCache local_cache;
    if (!shared_cache) local_cache = build_grid_cache(kind_estimator, scene, ec, n_threads);
    const GridCache& cache = shared_cache ? *shared_cache : local_cache;

    MonteCarloReport rep;
    rep.n_trials = n_trials;
    rep.kind_data = kind_data;
    rep.kind_estimator = kind_estimator;
    rep.seed = seed;
    rep.errors_m.resize(n_trials);
    rep.trials.resize(n_trials);

    parallel_for(n_trials, n_threads, [&](int t) {
        const std::uint64_t trial_seed = seed + static_cast<std::uint64_t>(t);
        const Eigen::VectorXcd y =
            sample_observation(mu, scene.combiners, sigma2, trial_seed, scene.config);
        const Eigen::Vector2d p0 = grid_init(y, cache);
        TrialResult tr = refine(y, p0, kind_estimator, scene, ec);
        tr.seed = trial_seed;
        rep.trials[t] = tr;
        rep.errors_m[t] = (tr.estimate - truth.position_m).norm();
    });

    std::vector<double> sq(n_trials);
    for (int t = 0; t < n_trials; ++t)
    {
        sq[t] = rep.errors_m[t] * rep.errors_m[t];
        if (!rep.trials[t].converged) ++rep.n_unconverged;
    }
    rep.rmse_m = std::sqrt(compensated_sum(sq) / n_trials);
    return rep;
}

} // namespace nfmm
