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

#include "nfmm/experiments.hpp"

using namespace nfmm;

TEST_CASE("table export: empty set refused, csv round trip byte-identical")
{
    OutputTable t;
    t.columns = {"a", "b"};
    CHECK_THROWS(to_csv(t));
    CHECK_THROWS(to_json(t));

    t.add_row({fmt_double(1.0 / 3.0), "TM"});
    t.add_row({fmt_double(-2.5e-13), "MM"});
    const std::string csv = to_csv(t);
    const OutputTable back = parse_csv(csv);
    CHECK(to_csv(back) == csv);

    const std::string json = to_json(t);
    CHECK(json.find("\"a\": 0.33333333333333331") != std::string::npos);
    CHECK(json.find("\"b\": \"TM\"") != std::string::npos);
}

TEST_CASE("fig2 bounds-only: 15 rows, fixed schema, deterministic")
{
    ExperimentSpec spec;
    spec.trials = 0;
    const auto pts = run_fig2(spec);
    REQUIRE(pts.size() == 15);
    CHECK(pts.front().p_dbm == -10.0);
    CHECK(pts.back().p_dbm == 30.0);
    CHECK_FALSE(pts.front().has_rmse);

    const OutputTable t = fig2_table(pts);
    REQUIRE(t.columns.size() == 8);
    CHECK(t.columns.front() == "p_dbm");
    REQUIRE(t.rows.size() == 15);

    // deterministic bytes across runs
    const auto pts2 = run_fig2(spec);
    CHECK(to_csv(fig2_table(pts2)) == to_csv(t));

    // spot value: CRB-TM at P = 10 dBm (row 7 in the 15-point grid)
    const double v = std::stod(t.rows[7][1]);
    CHECK_THAT(v, Catch::Matchers::WithinRel(7.934e-3, 0.02));
}

TEST_CASE("fig2 with trials appends the RMSE columns")
{
    ExperimentSpec spec;
    spec.trials = 2;
    spec.threads = 4;
    const auto pts = run_fig2(spec);
    const OutputTable t = fig2_table(pts);
    REQUIRE(t.columns.size() == 10);
    CHECK(t.columns[8] == "mle_tm_rmse_m");
    CHECK(t.columns[9] == "mmle_rmse_m");
    for (const auto& row : t.rows) CHECK(std::stod(row[8]) > 0.0);
}

TEST_CASE("fig3 sweep structure")
{
    ExperimentSpec spec;
    spec.threads = 0;
    const auto rows = run_fig3(spec);
    REQUIRE(rows.size() == (11 + 13) * 4);

    int n_array = 0, n_dist = 0;
    for (const auto& r : rows)
    {
        if (r.sweep == "array")
        {
            ++n_array;
            CHECK(r.distance_m == 2.0 * std::sqrt(2.0));
        }
        else
        {
            ++n_dist;
            CHECK(r.n_antennas == 64);
            CHECK(r.distance_m >= 0.25 - 1e-12);
            CHECK(r.distance_m <= 10.0 + 1e-12);
        }
        CHECK(std::isfinite(r.mme.mme_peb_db));
    }
    CHECK(n_array == 44);
    CHECK(n_dist == 52);

    const OutputTable t = fig3_table(rows);
    CHECK(t.columns.front() == "sweep");
    CHECK(t.rows.size() == rows.size());
}

TEST_CASE("fig3 distance sweep: MME-AEB jump near 0.9 m")
{
    ExperimentSpec spec;
    const auto rows = run_fig3(spec);
    std::vector<std::pair<double, double>> aeb; // (distance, mme_aeb)
    for (const auto& r : rows)
        if (r.sweep == "distance" && r.kind == ModelKind::TM)
            aeb.emplace_back(r.distance_m, r.mme.mme_aeb_db);
    std::sort(aeb.begin(), aeb.end());
    double largest_jump = 0.0;
    for (std::size_t i = 1; i < aeb.size(); ++i)
    {
        const double mid = 0.5 * (aeb[i - 1].first + aeb[i].first);
        if (mid > 0.5 && mid < 1.5)
            largest_jump = std::max(largest_jump, std::abs(aeb[i].second - aeb[i - 1].second));
    }
    CHECK(largest_jump > 6.0);
}

TEST_CASE("mme grid: small map with contours and the exact export schema")
{
    ExperimentSpec spec;
    spec.grid_nx = 12;
    spec.grid_ny = 12;
    const auto r = run_fig4(spec);
    CHECK(r.grid.n_skipped == 0);
    CHECK(r.grid.peb_db.values.allFinite());

    const OutputTable t = mme_grid_table(r.grid);
    REQUIRE(t.columns == std::vector<std::string>{"px", "py", "mme_peb_db", "mme_aeb_db",
                                                  "mme_deb_db"});
    CHECK(t.rows.size() == 144);

    // near the array the mismatch is material: some -3 dB contour exists
    CHECK(!r.contour_aeb.empty());
}

TEST_CASE("mme grid: analog combiners on a tiny map")
{
    ExperimentSpec spec;
    spec.base.n_rfc = 1;
    spec.base.n_transmissions = 16;
    spec.mode = CombinerMode::analog;
    spec.grid_nx = 4;
    spec.grid_ny = 4;
    const auto g = run_mme_grid(spec.base, spec.mode, spec.mme_domain, spec.grid_nx, spec.grid_ny,
                                spec.grid_x_min, spec.grid_x_max, spec.grid_y_min, spec.grid_y_max,
                                spec.threads);
    CHECK(g.peb_db.values.allFinite());
    CHECK(g.n_skipped == 0);
}

TEST_CASE("far grid with small bandwidth has no mismatch region")
{
    ExperimentSpec spec;
    spec.base.bandwidth_hz = 4e6; // narrowband but delay still observable
    spec.grid_nx = 6;
    spec.grid_ny = 4;
    spec.grid_x_min = 50.0;
    spec.grid_x_max = 60.0;
    spec.grid_y_min = -3.0;
    spec.grid_y_max = 3.0;
    const auto r = run_fig4(spec);
    CHECK(r.grid.n_skipped == 0);
    CHECK(r.contour_peb.empty());
    CHECK(r.contour_aeb.empty());
    CHECK(r.contour_deb.empty());
    CHECK(area_above(r.grid.peb_db, -3.0) == 0.0);
}

TEST_CASE("fig4 region structure: angle suffers more than delay")
{
    ExperimentSpec spec;
    spec.grid_nx = 30;
    spec.grid_ny = 30;
    const auto r = run_fig4(spec);

    // the area where angle estimation is materially hurt strictly contains
    // the delay one, and the delay region hugs the array
    const double area_aeb = area_above(r.grid.aeb_db, -3.0);
    const double area_deb = area_above(r.grid.deb_db, -3.0);
    CHECK(area_aeb > area_deb);
    CHECK(area_deb > 0.0);

    double deb_max_range = 0.0;
    for (std::size_t ix = 0; ix < r.grid.deb_db.xs.size(); ++ix)
        for (std::size_t iy = 0; iy < r.grid.deb_db.ys.size(); ++iy)
            if (r.grid.deb_db.values(ix, iy) > -3.0)
                deb_max_range = std::max(deb_max_range,
                                         std::hypot(r.grid.deb_db.xs[ix], r.grid.deb_db.ys[iy]));
    CHECK(deb_max_range < 1.0);
}

TEST_CASE("unobservable geometry is skipped, not fatal")
{
    // at 1 kHz bandwidth the delay and gain-phase scores are numerically
    // collinear: the FIM fails the condition guard everywhere
    ExperimentSpec spec;
    spec.base.bandwidth_hz = 1e3;
    spec.grid_nx = 3;
    spec.grid_ny = 2;
    spec.grid_x_min = 50.0;
    spec.grid_x_max = 60.0;
    const auto r = run_fig4(spec);
    CHECK(r.grid.n_skipped == 6);
    CHECK(r.contour_peb.empty());
}

TEST_CASE("invalid scenario is rejected before any computation")
{
    ExperimentSpec spec;
    spec.base.n_rfc = 1000;
    CHECK_THROWS_AS(run_fig2(spec), std::invalid_argument);
    CHECK_THROWS_AS(run_fig3(spec), std::invalid_argument);
}

TEST_CASE("report tables use the documented headers")
{
    const std::vector<std::string> bound_cols{"model", "px",    "py",   "P_dbm",
                                              "peb_m", "aeb_rad", "deb_s"};
    ScenarioConfig cfg;
    const Scene scene(cfg, CombinerMode::digital);
    const StateParams st = default_truth(scene.geometry);
    const BoundReport br = crb_bounds(ModelKind::TM, st, scene);
    const OutputTable bt = bound_report_table({{ModelKind::TM, st, 20.0, br}});
    CHECK(bt.columns == bound_cols);
    CHECK(bt.rows.size() == 1);
    CHECK(bt.rows[0][0] == "TM");

    EstimatorConfig ec;
    ec.n_angle_bins = 8;
    ec.n_range_bins = 8;
    ec.range_max_m = 7.4;
    const MonteCarloReport rep =
        run_monte_carlo(scene, ModelKind::TM, ModelKind::TM, st, 3, 1, ec, 1);
    const OutputTable tt = trial_table(rep);
    CHECK(tt.columns == std::vector<std::string>{"trial", "seed", "px_hat", "py_hat", "err_m",
                                                 "converged", "iters"});
    CHECK(tt.rows.size() == 3);
}

TEST_CASE("contour text blocks")
{
    std::vector<Polyline> lines{{Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 1)},
                                {Eigen::Vector2d(2, 2), Eigen::Vector2d(3, 3)}};
    const std::string text = contours_to_text(lines);
    CHECK(text == "0,0\n1,1\n\n2,2\n3,3\n");
}
