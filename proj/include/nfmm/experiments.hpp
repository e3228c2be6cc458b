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

#include <functional>
#include <limits>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nfmm/bounds.hpp"
#include "nfmm/contour.hpp"
#include "nfmm/estimators.hpp"
#include "nfmm/io.hpp"
#include "nfmm/mcrb.hpp"
#include "nfmm/parallel.hpp"

namespace nfmm
{

/// The canonical simulation operating point: UE at [2, 2] m on the
/// aoa = pi/4 ray, gain tied to the free-space law, phase fixed.
inline StateParams default_truth(const ArrayGeometry& geom)
{
    const Eigen::Vector2d p(2.0, 2.0);
    return StateParams{p, path_gain_mag(p, geom), 0.3};
}

struct ExperimentSpec
{
    ScenarioConfig base;
    CombinerMode mode = CombinerMode::digital;
    int trials = 500;
    std::uint64_t seed = 1;
    MmeDomain mme_domain = MmeDomain::rmse; // calibrated default
    int threads = 0;                        // 0: hardware concurrency

    // position-grid settings (fig4 / fig5)
    int grid_nx = 60, grid_ny = 60;
    double grid_x_min = 0.1, grid_x_max = 6.0;
    double grid_y_min = -3.0, grid_y_max = 3.0;
};

// ---------------------------------------------------------------- fig2 ---

struct Fig2Point
{
    double p_dbm = 0.0;
    double crb_tm_peb_m = 0.0, crb_mm_peb_m = 0.0;
    double lb_peb_m = 0.0, mcrb_peb_m = 0.0;
    double mle_tm_rmse_m = 0.0, mmle_rmse_m = 0.0;
    bool has_rmse = false;
};

/// The 15-point power sweep grid, -10 to 30 dBm.
inline std::vector<double> fig2_power_grid_dbm()
{
    std::vector<double> p(15);
    for (int i = 0; i < 15; ++i) p[i] = -10.0 + 40.0 * i / 14.0;
    return p;
}

/// Estimator settings for the power sweep. The range interval is one delay
/// ambiguity period (c/delta_f = 7.49 m at 400 MHz / 10 subcarriers): beyond
/// that the MM cost repeats exactly and the argmin is no longer unique.
inline EstimatorConfig fig2_estimator_config()
{
    EstimatorConfig ec;
    ec.range_min_m = 0.1;
    ec.range_max_m = 7.4;
    return ec;
}

inline std::vector<Fig2Point> run_fig2(const ExperimentSpec& spec,
                                       const std::function<void(const Fig2Point&)>& on_point = {})
{
    ScenarioConfig cfg = spec.base;
    cfg.validate();
    const auto powers = fig2_power_grid_dbm();
    const EstimatorConfig ec = fig2_estimator_config();

    // the normalized grid directions are independent of the transmit power;
    // build them once for the whole sweep
    GridCache cache_tm, cache_mm;
    if (spec.trials > 0)
    {
        const Scene scene(cfg, spec.mode);
        cache_tm = build_grid_cache(ModelKind::TM, scene, ec, spec.threads);
        cache_mm = build_grid_cache(ModelKind::MM, scene, ec, spec.threads);
    }

    std::vector<Fig2Point> out;
    for (const double p_dbm : powers)
    {
        cfg.tx_power_w = dbm_to_watt(p_dbm);
        const Scene scene(cfg, spec.mode);
        const StateParams truth = default_truth(scene.geometry);

        Fig2Point pt;
        pt.p_dbm = p_dbm;
        pt.crb_tm_peb_m = crb_bounds(ModelKind::TM, truth, scene).peb_m;
        pt.crb_mm_peb_m = crb_bounds(ModelKind::MM, truth, scene).peb_m;
        const McrbResult mc = lower_bound(ModelKind::TM, truth, scene);
        pt.lb_peb_m = mc.lb_peb_m();
        pt.mcrb_peb_m = mc.mcrb_peb_m();

        if (spec.trials > 0)
        {
            pt.has_rmse = true;
            pt.mle_tm_rmse_m = run_monte_carlo(scene, ModelKind::TM, ModelKind::TM, truth,
                                               spec.trials, spec.seed, ec, spec.threads, &cache_tm)
                                   .rmse_m;
            pt.mmle_rmse_m = run_monte_carlo(scene, ModelKind::TM, ModelKind::MM, truth,
                                             spec.trials, spec.seed, ec, spec.threads, &cache_mm)
                                 .rmse_m;
        }
        if (on_point) on_point(pt);
        out.push_back(pt);
    }
    return out;
}

inline OutputTable fig2_table(const std::vector<Fig2Point>& pts)
{
    OutputTable t;
    const bool rmse = !pts.empty() && pts.front().has_rmse;
    t.columns = {"p_dbm",     "crb_tm_peb_m",   "crb_mm_peb_m",   "lb_peb_m",
                 "mcrb_peb_m", "crb_tm_peb2_m2", "crb_mm_peb2_m2", "lb_peb2_m2"};
    if (rmse)
    {
        t.columns.push_back("mle_tm_rmse_m");
        t.columns.push_back("mmle_rmse_m");
    }
    for (const auto& p : pts)
    {
        std::vector<std::string> row = {
            fmt_double(p.p_dbm),          fmt_double(p.crb_tm_peb_m),
            fmt_double(p.crb_mm_peb_m),   fmt_double(p.lb_peb_m),
            fmt_double(p.mcrb_peb_m),     fmt_double(p.crb_tm_peb_m * p.crb_tm_peb_m),
            fmt_double(p.crb_mm_peb_m * p.crb_mm_peb_m), fmt_double(p.lb_peb_m * p.lb_peb_m)};
        if (rmse)
        {
            row.push_back(fmt_double(p.mle_tm_rmse_m));
            row.push_back(fmt_double(p.mmle_rmse_m));
        }
        t.add_row(std::move(row));
    }
    return t;
}

// ---------------------------------------------------------------- fig3 ---

struct Fig3Row
{
    std::string sweep; // "array" | "distance"
    int n_antennas = 0;
    double distance_m = 0.0;
    ModelKind kind = ModelKind::TM;
    MmeReport mme;
};

inline const std::vector<int>& fig3_array_sizes()
{
    static const std::vector<int> sizes{4, 9, 16, 25, 36, 49, 64, 81, 100, 121, 144};
    return sizes;
}

/// 13 log-spaced distances over [0.25, 10] m; the odd count leaves a median
/// point between the near-field and far-field halves.
inline std::vector<double> fig3_distance_grid_m()
{
    std::vector<double> d(13);
    const double lo = std::log(0.25), hi = std::log(10.0);
    for (int i = 0; i < 13; ++i) d[i] = std::exp(lo + (hi - lo) * i / 12.0);
    return d;
}

inline MmeReport mme_at(ModelKind kind_data, const StateParams& truth, const Scene& scene,
                        MmeDomain domain)
{
    const BoundReport crb = crb_bounds(kind_data, truth, scene);
    const McrbResult mc = lower_bound(kind_data, truth, scene);
    return make_mme_report(crb, mc, domain);
}

/// Impairment sweeps at W = 100 MHz: array size at the default position,
/// and distance along the aoa = pi/4 ray.
inline std::vector<Fig3Row> run_fig3(const ExperimentSpec& spec)
{
    ScenarioConfig cfg = spec.base;
    cfg.bandwidth_hz = 100e6;
    cfg.validate();
    static const ModelKind kinds[] = {ModelKind::TM, ModelKind::TM_SNS, ModelKind::TM_SWM,
                                      ModelKind::TM_BSE};

    struct Task
    {
        std::string sweep;
        int n;
        double dist;
        ModelKind kind;
    };
    std::vector<Task> tasks;
    for (int n : fig3_array_sizes())
        for (ModelKind k : kinds)
            tasks.push_back({"array", n, 2.0 * std::sqrt(2.0), k});
    for (double d : fig3_distance_grid_m())
        for (ModelKind k : kinds)
            tasks.push_back({"distance", cfg.n_antennas, d, k});

    std::vector<Fig3Row> rows(tasks.size());
    parallel_for(static_cast<int>(tasks.size()), spec.threads, [&](int i) {
        const Task& tk = tasks[i];
        ScenarioConfig c = cfg;
        c.n_antennas = tk.n;
        c.n_rfc = spec.mode == CombinerMode::digital ? tk.n : 1;
        const Scene scene(c, spec.mode);
        const Eigen::Vector2d p = tk.dist / std::sqrt(2.0) * Eigen::Vector2d(1.0, 1.0);
        const StateParams truth{p, path_gain_mag(p, scene.geometry), 0.3};
        rows[i] = Fig3Row{tk.sweep, tk.n, tk.dist, tk.kind,
                          mme_at(tk.kind, truth, scene, spec.mme_domain)};
    });
    return rows;
}

inline OutputTable fig3_table(const std::vector<Fig3Row>& rows)
{
    OutputTable t;
    t.columns = {"sweep",      "n_antennas", "distance_m", "model",      "domain",
                 "mme_peb_db", "mme_aeb_db", "mme_deb_db", "crb_peb",    "lb_peb",
                 "crb_aeb",    "lb_aeb",     "crb_deb",    "lb_deb"};
    for (const auto& r : rows)
        t.add_row({r.sweep, std::to_string(r.n_antennas), fmt_double(r.distance_m),
                   to_string(r.kind), to_string(r.mme.domain), fmt_double(r.mme.mme_peb_db),
                   fmt_double(r.mme.mme_aeb_db), fmt_double(r.mme.mme_deb_db),
                   fmt_double(r.mme.crb_peb), fmt_double(r.mme.lb_peb), fmt_double(r.mme.crb_aeb),
                   fmt_double(r.mme.lb_aeb), fmt_double(r.mme.crb_deb), fmt_double(r.mme.lb_deb)});
    return t;
}

// ----------------------------------------------------------- fig4/fig5 ---

struct MmeGridResult
{
    GridField peb_db, aeb_db, deb_db;
    int n_skipped = 0;
};

/// Full-mismatch (TM vs MM) MME field over a rectilinear position grid.
/// Points that coincide with an antenna or leave the front half-plane are
/// skipped (NaN) and counted.
inline MmeGridResult run_mme_grid(const ScenarioConfig& cfg, CombinerMode mode, MmeDomain domain,
                                  int nx, int ny, double x_min, double x_max, double y_min,
                                  double y_max, int threads)
{
    cfg.validate();
    const Scene scene(cfg, mode);
    MmeGridResult res;
    for (GridField* f : {&res.peb_db, &res.aeb_db, &res.deb_db})
    {
        f->xs.resize(nx);
        f->ys.resize(ny);
        for (int i = 0; i < nx; ++i)
            f->xs[i] = nx == 1 ? x_min : x_min + (x_max - x_min) * i / (nx - 1);
        for (int j = 0; j < ny; ++j)
            f->ys[j] = ny == 1 ? y_min : y_min + (y_max - y_min) * j / (ny - 1);
        f->values.setConstant(nx, ny, std::numeric_limits<double>::quiet_NaN());
    }

    std::atomic<int> skipped{0};
    parallel_for(nx * ny, threads, [&](int idx) {
        const int ix = idx / ny, iy = idx % ny;
        const Eigen::Vector2d p(res.peb_db.xs[ix], res.peb_db.ys[iy]);
        bool degenerate = !(p.x() > 0.0) || !(p.norm() > 0.0);
        for (const auto& b : scene.geometry.positions_m)
            if ((p - b).norm() < 1e-9) degenerate = true;
        if (degenerate)
        {
            ++skipped;
            return;
        }
        const StateParams truth{p, path_gain_mag(p, scene.geometry), 0.3};
        try
        {
            const MmeReport r = mme_at(ModelKind::TM, truth, scene, domain);
            res.peb_db.values(ix, iy) = r.mme_peb_db;
            res.aeb_db.values(ix, iy) = r.mme_aeb_db;
            res.deb_db.values(ix, iy) = r.mme_deb_db;
        }
        catch (const SingularFimError&)
        {
            // unobservable geometry at this point (e.g. vanishing bandwidth);
            // leave the NaN marker
            ++skipped;
        }
    });
    res.n_skipped = skipped.load();
    if (res.n_skipped > 0)
        std::cerr << "mme grid: skipped " << res.n_skipped << " degenerate grid points\n";
    return res;
}

inline OutputTable mme_grid_table(const MmeGridResult& g)
{
    OutputTable t;
    t.columns = {"px", "py", "mme_peb_db", "mme_aeb_db", "mme_deb_db"};
    for (std::size_t ix = 0; ix < g.peb_db.xs.size(); ++ix)
        for (std::size_t iy = 0; iy < g.peb_db.ys.size(); ++iy)
            t.add_row({fmt_double(g.peb_db.xs[ix]), fmt_double(g.peb_db.ys[iy]),
                       fmt_double(g.peb_db.values(ix, iy)), fmt_double(g.aeb_db.values(ix, iy)),
                       fmt_double(g.deb_db.values(ix, iy))});
    return t;
}

struct Fig4Result
{
    MmeGridResult grid;
    std::vector<Polyline> contour_peb, contour_aeb, contour_deb; // at -3 dB
};

inline Fig4Result run_fig4(const ExperimentSpec& spec)
{
    Fig4Result r;
    r.grid = run_mme_grid(spec.base, spec.mode, spec.mme_domain, spec.grid_nx, spec.grid_ny,
                          spec.grid_x_min, spec.grid_x_max, spec.grid_y_min, spec.grid_y_max,
                          spec.threads);
    r.contour_peb = marching_squares(r.grid.peb_db, -3.0);
    r.contour_aeb = marching_squares(r.grid.aeb_db, -3.0);
    r.contour_deb = marching_squares(r.grid.deb_db, -3.0);
    return r;
}

struct Fig5Variant
{
    std::string name;
    MmeGridResult grid;
    std::vector<Polyline> contour_peb;
    double area_above_m2 = 0.0; // region with MME-PEB > -3 dB
};

struct Fig5Result
{
    double baseline_area_m2 = 0.0; // fig4 configuration
    std::vector<Fig5Variant> variants;
};

/// Scenario variants benchmarked against the fig4 baseline: higher power,
/// analog array with 50 transmissions, smaller array, smaller bandwidth.
inline Fig5Result run_fig5(const ExperimentSpec& spec)
{
    Fig5Result out;
    auto area = [](const MmeGridResult& g) { return area_above(g.peb_db, -3.0); };

    {
        const MmeGridResult base =
            run_mme_grid(spec.base, spec.mode, spec.mme_domain, spec.grid_nx, spec.grid_ny,
                         spec.grid_x_min, spec.grid_x_max, spec.grid_y_min, spec.grid_y_max,
                         spec.threads);
        out.baseline_area_m2 = area(base);
    }

    auto add = [&](const std::string& name, ScenarioConfig cfg, CombinerMode mode) {
        Fig5Variant v;
        v.name = name;
        v.grid = run_mme_grid(cfg, mode, spec.mme_domain, spec.grid_nx, spec.grid_ny,
                              spec.grid_x_min, spec.grid_x_max, spec.grid_y_min, spec.grid_y_max,
                              spec.threads);
        v.contour_peb = marching_squares(v.grid.peb_db, -3.0);
        v.area_above_m2 = area(v.grid);
        out.variants.push_back(std::move(v));
    };

    {
        ScenarioConfig c = spec.base;
        c.tx_power_w = dbm_to_watt(30.0);
        add("p30dbm", c, spec.mode);
    }
    {
        ScenarioConfig c = spec.base;
        c.n_rfc = 1;
        c.n_transmissions = 50;
        add("analog_g50", c, CombinerMode::analog);
    }
    {
        ScenarioConfig c = spec.base;
        c.n_antennas = 32;
        c.n_rfc = spec.mode == CombinerMode::digital ? 32 : 1;
        add("n32", c, spec.mode);
    }
    {
        ScenarioConfig c = spec.base;
        c.bandwidth_hz = 100e6;
        add("w100mhz", c, spec.mode);
    }
    return out;
}

inline OutputTable fig5_area_table(const Fig5Result& r)
{
    OutputTable t;
    t.columns = {"variant", "area_above_m2", "baseline_area_m2"};
    for (const auto& v : r.variants)
        t.add_row({v.name, fmt_double(v.area_above_m2), fmt_double(r.baseline_area_m2)});
    return t;
}

// ------------------------------------------------------------ reports ---

inline OutputTable bound_report_table(const std::vector<std::tuple<ModelKind, StateParams, double,
                                                                   BoundReport>>& rows)
{
    OutputTable t;
    t.columns = {"model", "px", "py", "P_dbm", "peb_m", "aeb_rad", "deb_s"};
    for (const auto& [kind, st, p_dbm, br] : rows)
        t.add_row({to_string(kind), fmt_double(st.position_m.x()), fmt_double(st.position_m.y()),
                   fmt_double(p_dbm), fmt_double(br.peb_m), fmt_double(br.aeb_rad),
                   fmt_double(br.deb_s)});
    return t;
}

inline OutputTable trial_table(const MonteCarloReport& rep)
{
    OutputTable t;
    t.columns = {"trial", "seed", "px_hat", "py_hat", "err_m", "converged", "iters"};
    for (int i = 0; i < rep.n_trials; ++i)
    {
        const TrialResult& tr = rep.trials[i];
        t.add_row({std::to_string(i), std::to_string(tr.seed), fmt_double(tr.estimate.x()),
                   fmt_double(tr.estimate.y()), fmt_double(rep.errors_m[i]),
                   tr.converged ? "1" : "0", std::to_string(tr.iterations)});
    }
    return t;
}

} // namespace nfmm
