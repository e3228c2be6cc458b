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

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "nfmm/nfmm.hpp"

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_config_error = 2;
constexpr int exit_numerical_failure = 3;

struct GlobalOptions
{
    std::string config_path;
    std::uint64_t seed = 1;
    std::string out_dir = ".";
    std::string format = "csv";
    int trials = 500;
    std::string mme_domain = "rmse";
    int threads = 0;
};

nfmm::ScenarioConfig load_base(const GlobalOptions& g)
{
    nfmm::ScenarioConfig cfg;
    if (!g.config_path.empty()) cfg = nfmm::load_scenario_config(g.config_path);
    cfg.seed = g.seed;
    cfg.validate();
    return cfg;
}

nfmm::CombinerMode infer_mode(const nfmm::ScenarioConfig& cfg)
{
    if (cfg.n_rfc == cfg.n_antennas) return nfmm::CombinerMode::digital;
    if (cfg.n_rfc == 1) return nfmm::CombinerMode::analog;
    throw std::invalid_argument("n_rfc must equal n_antennas (digital) or 1 (analog)");
}

nfmm::ExperimentSpec make_spec(const GlobalOptions& g)
{
    nfmm::ExperimentSpec spec;
    spec.base = load_base(g);
    spec.mode = infer_mode(spec.base);
    spec.trials = g.trials;
    spec.seed = g.seed;
    spec.mme_domain = nfmm::parse_mme_domain(g.mme_domain);
    spec.threads = g.threads;
    return spec;
}

std::string out_stem(const GlobalOptions& g, const std::string& name)
{
    std::filesystem::create_directories(g.out_dir);
    return (std::filesystem::path(g.out_dir) / name).string();
}

void write_contours(const GlobalOptions& g, const std::string& name,
                    const std::vector<nfmm::Polyline>& lines)
{
    nfmm::write_file(out_stem(g, name) + ".txt", nfmm::contours_to_text(lines));
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Localization error bounds under near-field / wideband channel model mismatch"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    GlobalOptions g;
    app.add_option("--config", g.config_path, "scenario config file (flat key-value)");
    app.add_option("--seed", g.seed, "master RNG seed");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--format", g.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--trials", g.trials, "Monte Carlo trials per point (0: bounds only)");
    app.add_option("--mme-domain", g.mme_domain, "variance|rmse")
        ->check(CLI::IsMember({"variance", "rmse"}));
    app.add_option("--threads", g.threads, "worker threads (0: hardware)");

    // fig2: power sweep with bounds and estimator RMSE
    auto* fig2 = app.add_subcommand("fig2", "power sweep: CRB-TM, CRB-MM, LB, MLE/MMLE RMSE");

    // fig3: impairment sweeps
    auto* fig3 = app.add_subcommand("fig3", "MME sweeps over array size and distance (W = 100 MHz)");

    // fig4: MME position maps + contours
    auto* fig4 = app.add_subcommand("fig4", "MME position maps and -3 dB contours");
    int grid_nx = 60, grid_ny = 60;
    fig4->add_option("--grid-nx", grid_nx, "grid columns");
    fig4->add_option("--grid-ny", grid_ny, "grid rows");

    // fig5: scenario variants benchmarked by -3 dB area
    auto* fig5 = app.add_subcommand("fig5", "MME map variants: P=30 dBm, analog G=50, N=32, W=100 MHz");
    fig5->add_option("--grid-nx", grid_nx, "grid columns");
    fig5->add_option("--grid-ny", grid_ny, "grid rows");

    // bounds: deterministic CRB report at one point
    auto* bounds = app.add_subcommand("bounds", "CRB bound report at a position");
    std::string kind_str = "TM";
    double px = 2.0, py = 2.0;
    bounds->add_option("--kind", kind_str, "MM|TM|TM-SNS|TM-SWM|TM-BSE");
    bounds->add_option("--px", px, "UE x [m]");
    bounds->add_option("--py", py, "UE y [m]");

    // mcrb: pseudo-true fit and lower bound at one point
    auto* mcrb = app.add_subcommand("mcrb", "MCRB lower bound and MME at a position");
    std::string mcrb_kind = "TM";
    double mpx = 2.0, mpy = 2.0;
    mcrb->add_option("--kind", mcrb_kind, "data model: TM|TM-SNS|TM-SWM|TM-BSE|MM");
    mcrb->add_option("--px", mpx, "UE x [m]");
    mcrb->add_option("--py", mpy, "UE y [m]");

    // estimate: Monte Carlo estimator run with a per-trial dump
    auto* est = app.add_subcommand("estimate", "Monte Carlo ML estimation benchmark");
    std::string est_data = "TM", est_model = "TM";
    double epx = 2.0, epy = 2.0;
    est->add_option("--kind-data", est_data, "data-generating model");
    est->add_option("--kind-est", est_model, "estimator model (MM for the MMLE)");
    est->add_option("--px", epx, "UE x [m]");
    est->add_option("--py", epy, "UE y [m]");
    double range_min = 0.1, range_max = 20.0;
    est->add_option("--range-min", range_min, "grid range minimum [m]");
    est->add_option("--range-max", range_max, "grid range maximum [m]");

    CLI11_PARSE(app, argc, argv);

    try
    {
        const nfmm::ExportFormat fmt = nfmm::parse_export_format(g.format);

        if (*fig2)
        {
            auto spec = make_spec(g);
            const auto pts = nfmm::run_fig2(spec, [](const nfmm::Fig2Point& p) {
                std::cout << "P = " << p.p_dbm << " dBm: CRB-TM " << p.crb_tm_peb_m << " m, LB "
                          << p.lb_peb_m << " m" << (p.has_rmse ? " (+RMSE)" : "") << "\n";
            });
            std::cout << "wrote " << export_table(nfmm::fig2_table(pts), out_stem(g, "fig2"), fmt)
                      << "\n";
        }
        else if (*fig3)
        {
            auto spec = make_spec(g);
            const auto rows = nfmm::run_fig3(spec);
            std::cout << "wrote " << export_table(nfmm::fig3_table(rows), out_stem(g, "fig3"), fmt)
                      << "\n";
        }
        else if (*fig4)
        {
            auto spec = make_spec(g);
            spec.grid_nx = grid_nx;
            spec.grid_ny = grid_ny;
            const auto r = nfmm::run_fig4(spec);
            std::cout << "wrote "
                      << export_table(nfmm::mme_grid_table(r.grid), out_stem(g, "fig4_grid"), fmt)
                      << "\n";
            write_contours(g, "fig4_contour_peb", r.contour_peb);
            write_contours(g, "fig4_contour_aeb", r.contour_aeb);
            write_contours(g, "fig4_contour_deb", r.contour_deb);
        }
        else if (*fig5)
        {
            auto spec = make_spec(g);
            spec.grid_nx = grid_nx;
            spec.grid_ny = grid_ny;
            const auto r = nfmm::run_fig5(spec);
            for (const auto& v : r.variants)
            {
                export_table(nfmm::mme_grid_table(v.grid), out_stem(g, "fig5_grid_" + v.name), fmt);
                write_contours(g, "fig5_contour_peb_" + v.name, v.contour_peb);
                std::cout << v.name << ": area(MME-PEB > -3 dB) = " << v.area_above_m2
                          << " m^2 (baseline " << r.baseline_area_m2 << ")\n";
            }
            std::cout << "wrote "
                      << export_table(nfmm::fig5_area_table(r), out_stem(g, "fig5_areas"), fmt)
                      << "\n";
        }
        else if (*bounds)
        {
            const auto cfg = load_base(g);
            const nfmm::Scene scene(cfg, infer_mode(cfg));
            const Eigen::Vector2d p(px, py);
            const nfmm::StateParams st{p, nfmm::path_gain_mag(p, scene.geometry), 0.3};
            const auto br = nfmm::crb_bounds(nfmm::parse_model_kind(kind_str), st, scene);
            std::vector<std::tuple<nfmm::ModelKind, nfmm::StateParams, double, nfmm::BoundReport>>
                rows{{nfmm::parse_model_kind(kind_str), st, nfmm::watt_to_dbm(cfg.tx_power_w), br}};
            const auto table = nfmm::bound_report_table(rows);
            std::cout << nfmm::to_csv(table);
            export_table(table, out_stem(g, "bounds"), fmt);
        }
        else if (*mcrb)
        {
            const auto cfg = load_base(g);
            const nfmm::Scene scene(cfg, infer_mode(cfg));
            const Eigen::Vector2d p(mpx, mpy);
            const nfmm::StateParams st{p, nfmm::path_gain_mag(p, scene.geometry), 0.3};
            const auto kind = nfmm::parse_model_kind(mcrb_kind);
            const auto crb = nfmm::crb_bounds(kind, st, scene);
            const auto mc = nfmm::lower_bound(kind, st, scene);
            const auto rep = nfmm::make_mme_report(crb, mc, nfmm::parse_mme_domain(g.mme_domain));
            std::cout << "pseudo-true: aoa " << mc.pseudo.theta0.aoa_rad << " rad, range "
                      << mc.pseudo.theta0.toa_s * nfmm::speed_of_light << " m, residual "
                      << mc.pseudo.residual << (mc.pseudo.converged ? "" : " (NOT CONVERGED)")
                      << "\n";
            std::cout << "LB-PEB " << mc.lb_peb_m() << " m (MCRB part " << mc.mcrb_peb_m()
                      << " m), CRB-PEB " << crb.peb_m << " m\n";
            std::cout << "MME (" << nfmm::to_string(rep.domain) << "): PEB " << rep.mme_peb_db
                      << " dB, AEB " << rep.mme_aeb_db << " dB, DEB " << rep.mme_deb_db << " dB\n";
        }
        else if (*est)
        {
            const auto cfg = load_base(g);
            const nfmm::Scene scene(cfg, infer_mode(cfg));
            const Eigen::Vector2d p(epx, epy);
            const nfmm::StateParams st{p, nfmm::path_gain_mag(p, scene.geometry), 0.3};
            nfmm::EstimatorConfig ec;
            ec.range_min_m = range_min;
            ec.range_max_m = range_max;
            const auto rep = nfmm::run_monte_carlo(scene, nfmm::parse_model_kind(est_data),
                                                   nfmm::parse_model_kind(est_model), st,
                                                   g.trials, g.seed, ec, g.threads);
            std::cout << "RMSE = " << rep.rmse_m << " m over " << rep.n_trials << " trials ("
                      << rep.n_unconverged << " unconverged)\n";
            std::cout << "wrote "
                      << export_table(nfmm::trial_table(rep), out_stem(g, "trials"), fmt) << "\n";
        }
    }
    catch (const std::invalid_argument& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return exit_config_error;
    }
    catch (const std::exception& e)
    {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return exit_numerical_failure;
    }
    return exit_ok;
}
