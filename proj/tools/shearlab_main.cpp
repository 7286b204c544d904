// shearlab command-line interface.
//
// Subcommands: ou-sample, bounds, simulate, ensemble, sweep,
// verify {background|energy|ensemble|gibbs}. Any verification subcommand
// exits nonzero when a hard invariant fails.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "shearlab/diagnostics.hpp"
#include "shearlab/harness.hpp"
#include "shearlab/io.hpp"
#include "shearlab/quadrature.hpp"
#include "shearlab/stats.hpp"

using namespace shearlab;
using nlohmann::json;

namespace {

struct FlowArgs {
    double u = 1.0;
    double theta = 1.0;
    double sigma = 0.25;
    double nu = 0.02;
    double h = 1.0;
    double l = 1.0;

    void attach(CLI::App* app) {
        app->set_help_flag("--help", "print help");  // frees -h for the gap height
        app->add_option("--u", u, "mean wall speed U");
        app->add_option("--theta", theta, "OU reversion rate");
        app->add_option("--sigma", sigma, "OU noise amplitude");
        app->add_option("--nu", nu, "kinematic viscosity");
        app->add_option("--h", h, "channel height");
        app->add_option("--L", l, "horizontal period");
    }

    bounds::FlowConfig flow() const {
        background::Geometry geom{l, h};
        ou::OUParams p{u, theta, sigma};
        return bounds::FlowConfig::standard(geom, nu, p);
    }
};

int cmd_ou_sample(double u, double theta, double sigma, double t_end, double dt, int paths,
                  std::uint64_t seed, const std::string& mode, const std::string& out) {
    const ou::OUParams p{u, theta, sigma};
    const ou::PathMode path_mode = (mode == "wiener") ? ou::PathMode::wiener : ou::PathMode::ou;
    const ou::PathInitial init = (path_mode == ou::PathMode::wiener)
                                     ? ou::PathInitial::fixed(0.0)
                                     : ou::PathInitial::stationary();
    std::ofstream f(out);
    if (!f) throw std::runtime_error("ou-sample: cannot open " + out);
    f << "path_id,t,x\n";
    for (int i = 0; i < paths; ++i) {
        const auto path =
            ou::sample_path_uniform(p, t_end, dt, derive_stream_seed(seed, i), init, path_mode);
        for (std::size_t n = 0; n < path.times.size(); ++n)
            f << i << ',' << io::format_full(path.times[n]) << ',' << io::format_full(path.values[n])
              << '\n';
    }
    std::cout << "wrote " << paths << " paths to " << out << "\n";
    return 0;
}

int cmd_bounds(const FlowArgs& args, bool as_json) {
    const auto cfg = args.flow();
    const auto report = bounds::make_report(cfg);
    if (as_json) {
        json j;
        j["reynolds"] = {{"value", report.reynolds}, {"unit", "dimensionless"}};
        j["mean_bound"] = {{"value", report.mean_bound}, {"unit", "velocity^2/time (U^3/h)"}};
        j["second_moment_bound"] = {{"value", report.second_moment_bound},
                                    {"unit", "(velocity^2/time)^2 ((U^3/h)^2)"}};
        j["large_noise_bound"] = {{"value", report.large_noise_bound},
                                  {"unit", "velocity^2/time (U^3/h)"}};
        j["kolmogorov_scale_u3_over_h"] = {{"value", report.kolmogorov_scale_u3_over_h},
                                           {"unit", "velocity^2/time (U^3/h)"}};
        j["expected_y_rate"] = {{"value", bounds::expected_Y_rate(cfg)},
                                {"unit", "velocity^2 length^2/time"}};
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("Re                  = %.6g\n", report.reynolds);
        std::printf("mean bound          = %.10g   (U^3/h units)\n", report.mean_bound);
        std::printf("second moment bound = %.10g   ((U^3/h)^2 units)\n", report.second_moment_bound);
        std::printf("large-noise bound   = %.10g\n", report.large_noise_bound);
        std::printf("U^3/h               = %.10g\n", report.kolmogorov_scale_u3_over_h);
    }
    return 0;
}

int cmd_simulate(const std::string& config_path, double t_end_override, std::int64_t seed_override,
                 const std::string& out_override) {
    auto cfg = harness::ExperimentConfig::load(config_path);
    if (t_end_override > 0.0) cfg.t_end = t_end_override;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (cfg.out_dir.empty()) throw std::runtime_error("simulate: no output directory configured");
    const std::uint64_t seed = seed_override >= 0 ? static_cast<std::uint64_t>(seed_override)
                                                  : harness::trajectory_seed(cfg.master_seed, 0);

    const std::filesystem::path out(cfg.out_dir);
    std::filesystem::create_directories(out);

    solver::SimulateOptions opt;
    opt.initial.kind = cfg.initial;
    opt.initial.amplitude = cfg.perturbation_amplitude;
    opt.record_audit = cfg.audit_energy;
    opt.wall_mode = cfg.wall_mode;
    opt.wall_initial = cfg.wall_initial;
    opt.snapshot_cadence = cfg.snapshot_cadence;
    if (cfg.snapshot_cadence > 0)
        opt.snapshot_sink = [&](const solver::VelocityField& f, std::size_t step) {
            char name[32];
            std::snprintf(name, sizeof(name), "snap_%06zu.fld", step);
            io::write_snapshot(out / name, f);
        };

    const auto rec = solver::simulate_trajectory(cfg.flow, cfg.grid, cfg.t_end, seed, opt);
    harness::save_trajectory(out, rec, cfg);
    if (!rec.completed) {
        std::cerr << "trajectory aborted: " << rec.abort_reason << "\n";
        return 2;
    }
    std::cout << "trajectory complete: steps=" << rec.steps() << " dt=" << rec.dt
              << " <eps>_T=" << io::format_full(rec.mean_dissipation()) << "\n";
    return 0;
}

int cmd_ensemble(const std::string& config_path, const std::string& out_override) {
    auto cfg = harness::ExperimentConfig::load(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    const auto result = harness::run_ensemble(cfg);
    const auto bound = result.bounds;
    std::printf("completed %d / %d trajectories (%d failed)\n", result.completed, cfg.trajectories,
                result.failed);
    if (result.stats.trajectory_count >= 2) {
        std::printf("<eps>_T mean         = %.10g  (se %.3g)\n", result.stats.mean,
                    result.stats.se_mean);
        std::printf("<eps>_T second moment = %.10g (se %.3g)\n", result.stats.second_moment,
                    result.stats.se_second_moment);
        std::printf("mean bound            = %.10g  (mean + 3se %s bound)\n", bound.mean_bound,
                    result.stats.mean + 3.0 * result.stats.se_mean <= bound.mean_bound ? "<=" : ">");
    }
    return result.failed == 0 ? 0 : 2;
}

int cmd_sweep(const std::string& config_path, std::vector<double> sigmas,
              std::vector<double> thetas, std::vector<double> res, const std::string& out_dir) {
    auto base = harness::ExperimentConfig::load(config_path);
    if (!out_dir.empty()) base.out_dir = out_dir;
    const auto result = harness::sweep(base, sigmas, thetas, res);

    io::CsvTable table;
    table.columns = {"sigma", "theta",       "reynolds",      "skipped",          "mean",
                     "se_mean", "second_moment", "mean_bound", "second_moment_bound", "large_noise_bound"};
    json jpoints = json::array();
    for (const auto& pt : result.points) {
        table.rows.push_back({pt.sigma, pt.theta, pt.reynolds, pt.skipped ? 1.0 : 0.0,
                              pt.stats.mean, pt.stats.se_mean, pt.stats.second_moment,
                              pt.bounds.mean_bound, pt.bounds.second_moment_bound,
                              pt.bounds.large_noise_bound});
        json j = {{"sigma", pt.sigma},
                  {"theta", pt.theta},
                  {"reynolds", pt.reynolds},
                  {"skipped", pt.skipped}};
        if (pt.skipped) j["reason"] = pt.skip_reason;
        jpoints.push_back(std::move(j));
    }
    std::filesystem::create_directories(base.out_dir);
    io::write_csv(std::filesystem::path(base.out_dir) / "sweep.csv", table);
    json j;
    j["points"] = jpoints;
    j["mean_bound_nondecreasing_in_sigma"] = result.mean_bound_nondecreasing_in_sigma;
    j["mean_bound_increases_as_theta_decreases"] = result.mean_bound_increases_as_theta_decreases;
    std::ofstream jf(std::filesystem::path(base.out_dir) / "sweep.json");
    jf << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_verify_background(const FlowArgs& args, int samples, std::uint64_t seed) {
    const auto cfg = args.flow();
    const auto& bp = cfg.background;
    Rng rng(seed);

    struct Check {
        std::string name;
        int violations = 0;
        double min_margin = 1e300;
        double max_margin = -1e300;
        void note(double margin, double tol = 0.0) {
            min_margin = std::min(min_margin, margin);
            max_margin = std::max(max_margin, margin);
            if (margin < -tol) ++violations;
        }
    };
    Check margin{"delta_inequality_margin_in_[1/4,1/2]"};
    Check layer{"delta_below_h"};
    Check cap3{"(3z^2+B)/A <= 3/delta"};
    Check capz{"z^2 <= A/delta"};
    Check capd{"delta <= A/B"};
    Check fcap{"int_fprime_sq <= 3A/B"};
    Check fquad{"int_fprime_sq matches quadrature (1e-10 rel)"};
    Check gquad{"grad_phi_norm_sq matches quadrature (1e-8 rel)"};
    Check lfcap{"int |Lf|^2 <= 6(A/B)theta^2(U-z)^2 + 6 sigma^4 A/B^2"};
    Check fd{"f', f'' match finite differences"};

    const double tol_round = 1e-12;
    for (int s = 0; s < samples; ++s) {
        const double z = ou::stationary_sample(cfg.ou, rng);
        const double d = background::delta(z, bp);
        const double m = background::delta_inequality_margin(z, bp, cfg.nu);
        margin.note(m - 0.25, tol_round);
        margin.note(0.5 - m, tol_round);
        layer.note(cfg.geometry.height - d, tol_round);
        cap3.note(3.0 / d - (3.0 * z * z + bp.b) / bp.a, tol_round * (3.0 / d));
        capz.note(bp.a / d - z * z, tol_round * (bp.a / d));
        capd.note(bp.a / bp.b - d, tol_round * (bp.a / bp.b));

        const double closed = background::int_fprime_sq(z, bp);
        fcap.note(3.0 * bp.a / bp.b - closed, tol_round * 3.0 * bp.a / bp.b);
        const auto quad = integrate(
            [&](double x3) {
                const double fp = 1.0 - x3 * (3.0 * z * z + bp.b) / bp.a;
                return fp * fp;
            },
            0.0, d, 1e-13);
        fquad.note(1e-10 - std::abs(closed - quad.value) / std::max(1e-300, std::abs(closed)));

        const double gphi = background::grad_phi_norm_sq(z, bp);
        const double step = d * 1e-4;
        const auto gq = integrate(
            [&](double x3) {
                const double lo = std::max(0.0, x3 - step);
                const double hi = std::min(d * (1.0 - 1e-12), x3 + step);
                const double fd_deriv =
                    (background::phi(hi, z, bp) - background::phi(lo, z, bp)) / (hi - lo);
                return fd_deriv * fd_deriv;
            },
            0.0, d * (1.0 - 1e-9), 1e-12);
        const double g3d = gq.value * cfg.geometry.length * cfg.geometry.length;
        gquad.note(1e-8 - std::abs(gphi - g3d) / std::max(1e-300, std::abs(gphi) + 1e-30));

        const auto lf_quad = integrate(
            [&](double x3) {
                const double lf = background::generator_Lf(z, x3, bp, cfg.ou);
                return lf * lf;
            },
            0.0, d, 1e-12);
        const double cap = background::int_Lf_sq_cap(z, bp, cfg.ou);
        lfcap.note(cap - lf_quad.value, 1e-9 * cap);

        const double x3 = 0.5 * d;
        const auto an = background::f_derivatives(z, x3, bp);
        const double fd_step = 1e-4 * std::sqrt(bp.b);
        auto f_at = [&](double zz) { return (1.0 - x3 / background::delta(zz, bp)) * zz; };
        const double fp_fd = (f_at(z + fd_step) - f_at(z - fd_step)) / (2.0 * fd_step);
        const double fpp_fd =
            (f_at(z + fd_step) - 2.0 * f_at(z) + f_at(z - fd_step)) / (fd_step * fd_step);
        const double scale = 1.0 + std::abs(an.f_prime) + std::abs(an.f_double_prime);
        fd.note(1e-5 * scale - std::abs(an.f_prime - fp_fd));
        fd.note(2e-4 * scale - std::abs(an.f_double_prime - fpp_fd));
    }

    json checks = json::array();
    int total_violations = 0;
    for (const Check* c : {&margin, &layer, &cap3, &capz, &capd, &fcap, &fquad, &gquad, &lfcap, &fd}) {
        checks.push_back({{"name", c->name},
                          {"violations", c->violations},
                          {"min_margin", c->min_margin},
                          {"max_margin", c->max_margin}});
        total_violations += c->violations;
    }
    json out;
    out["samples"] = samples;
    out["reynolds"] = cfg.reynolds();
    out["checks"] = checks;
    out["pass"] = total_violations == 0;
    std::cout << out.dump(2) << "\n";
    return total_violations == 0 ? 0 : 1;
}

int cmd_verify_energy(const std::string& traj_dir, const std::string& config_path) {
    const auto cfg = harness::ExperimentConfig::load(config_path);
    const auto rec = harness::load_trajectory(traj_dir);
    diag::AuditOptions opt;
    opt.tolerance_constant = cfg.audit_tolerance_constant;
    const auto led = diag::energy_inequality_audit(rec, cfg.flow, cfg.grid, opt);
    json j;
    j["viscous_integral"] = led.viscous_integral;
    j["v0_sq"] = led.v0_sq;
    j["vT_sq"] = led.vT_sq;
    j["y_total"] = led.y_total;
    j["martingale"] = led.martingale;
    j["martingale_qv"] = led.martingale_qv;
    j["qv_cap"] = led.qv_cap;
    j["slack"] = led.slack;
    j["tolerance"] = led.tolerance;
    j["pass"] = led.pass;
    j["qv_cap_pass"] = led.qv_cap_pass;
    std::cout << j.dump(2) << "\n";
    return (led.pass && led.qv_cap_pass) ? 0 : 1;
}

int cmd_verify_ensemble(const std::string& runs_dir, const std::string& config_path) {
    auto cfg = harness::ExperimentConfig::load(config_path);
    cfg.out_dir = runs_dir;
    const auto result = harness::collect_ensemble(cfg);

    bool jensen = result.stats.second_moment >=
                  result.stats.mean * result.stats.mean * (1.0 - 1e-12);
    bool qv_all = true, slack_all = true;
    double m_mean = 0.0, m_var = 0.0;
    for (const auto& led : result.ledgers) {
        qv_all = qv_all && led.qv_cap_pass;
        slack_all = slack_all && led.pass;
        m_mean += led.martingale;
    }
    const double n = static_cast<double>(result.ledgers.size());
    if (n > 0) m_mean /= n;
    for (const auto& led : result.ledgers) m_var += (led.martingale - m_mean) * (led.martingale - m_mean);
    const double m_se = n > 1 ? std::sqrt(m_var / (n - 1.0) / n) : 0.0;
    const bool martingale_ok = n < 2 || std::abs(m_mean) <= 4.0 * m_se + 1e-300;

    const bool mean_within = result.stats.mean + 3.0 * result.stats.se_mean <= result.bounds.mean_bound;
    const bool m2_within = result.stats.second_moment + 3.0 * result.stats.se_second_moment <=
                           result.bounds.second_moment_bound;

    json j;
    j["completed"] = result.completed;
    j["failed"] = result.failed;
    j["stats"] = {{"mean", result.stats.mean},
                  {"se_mean", result.stats.se_mean},
                  {"second_moment", result.stats.second_moment},
                  {"se_second_moment", result.stats.se_second_moment}};
    j["bounds"] = {{"mean_bound", result.bounds.mean_bound},
                   {"second_moment_bound", result.bounds.second_moment_bound}};
    j["checks"] = {{"jensen", jensen},
                   {"qv_cap_pathwise", qv_all},
                   {"energy_slack", slack_all},
                   {"martingale_mean_within_4se", martingale_ok},
                   {"mean_plus_3se_below_bound", mean_within},
                   {"second_moment_plus_3se_below_bound", m2_within}};
    j["martingale"] = {{"mean", m_mean}, {"se", m_se}};
    const bool hard_pass = jensen && qv_all && martingale_ok;
    j["pass"] = hard_pass;
    std::cout << j.dump(2) << "\n";
    return hard_pass ? 0 : 1;
}

int cmd_verify_gibbs(const std::string& potential, double u, double theta, double sigma,
                     double t_end, double dt, std::uint64_t seed, double threshold) {
    ou::GradientSystem g;
    if (potential == "ou") {
        g = ou::GradientSystem::quadratic(ou::OUParams{u, theta, sigma});
    } else if (potential == "double-well") {
        g = ou::GradientSystem::double_well(sigma);
    } else {
        throw std::invalid_argument("verify gibbs: unknown potential '" + potential + "'");
    }
    const auto result = ou::gibbs_longrun_check(g, t_end, dt, seed);
    json j;
    j["potential"] = potential;
    j["ks_distance"] = result.ks_distance;
    j["threshold"] = threshold;
    j["normalizing_constant"] = result.normalizing_constant;
    j["samples"] = result.occupation.total;
    j["out_of_window"] = result.occupation.out_of_range;
    j["pass"] = result.ks_distance < threshold;
    std::cout << j.dump(2) << "\n";
    return result.ks_distance < threshold ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic shear-flow laboratory"};
    app.require_subcommand(1);

    // ou-sample
    auto* ou_cmd = app.add_subcommand("ou-sample", "sample wall-speed paths to CSV");
    double u = 1.0, theta = 1.0, sigma = 0.5, t_end = 1.0, dt = 1e-3;
    int paths = 1;
    std::uint64_t seed = 1;
    std::string mode = "ou", out_csv = "paths.csv";
    ou_cmd->add_option("--u", u);
    ou_cmd->add_option("--theta", theta);
    ou_cmd->add_option("--sigma", sigma);
    ou_cmd->add_option("--t-end", t_end);
    ou_cmd->add_option("--dt", dt);
    ou_cmd->add_option("--paths", paths);
    ou_cmd->add_option("--seed", seed);
    ou_cmd->add_option("--mode", mode)->check(CLI::IsMember({"ou", "wiener"}));
    ou_cmd->add_option("--out", out_csv);

    // bounds
    auto* bounds_cmd = app.add_subcommand("bounds", "print the closed-form dissipation bounds");
    FlowArgs bound_args;
    bound_args.attach(bounds_cmd);
    bool bounds_json = false;
    bounds_cmd->add_flag("--json", bounds_json);

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "run one trajectory from a config file");
    std::string sim_config, sim_out;
    double sim_t_end = 0.0;
    std::int64_t sim_seed = -1;
    sim_cmd->add_option("--config", sim_config)->required();
    sim_cmd->add_option("--t-end", sim_t_end);
    sim_cmd->add_option("--seed", sim_seed);
    sim_cmd->add_option("--out", sim_out);

    // ensemble
    auto* ens_cmd = app.add_subcommand("ensemble", "run or resume an ensemble");
    std::string ens_config, ens_out;
    ens_cmd->add_option("--config", ens_config)->required();
    ens_cmd->add_option("--out", ens_out);

    // sweep
    auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep over sigma/theta/Re");
    std::string sweep_config, sweep_out;
    std::vector<double> sweep_sigma, sweep_theta, sweep_re;
    sweep_cmd->add_option("--config", sweep_config)->required();
    sweep_cmd->add_option("--sigma", sweep_sigma)->delimiter(',');
    sweep_cmd->add_option("--theta", sweep_theta)->delimiter(',');
    sweep_cmd->add_option("--re", sweep_re)->delimiter(',');
    sweep_cmd->add_option("--out", sweep_out);

    // verify
    auto* verify = app.add_subcommand("verify", "verification reports");
    verify->require_subcommand(1);

    auto* vb = verify->add_subcommand("background", "background-calculus inequality checks");
    FlowArgs vb_args;
    vb_args.attach(vb);
    int vb_samples = 10000;
    std::uint64_t vb_seed = 7;
    vb->add_option("--samples", vb_samples);
    vb->add_option("--seed", vb_seed);

    auto* ve = verify->add_subcommand("energy", "energy-inequality audit of one trajectory");
    std::string ve_traj, ve_config;
    ve->add_option("--traj", ve_traj)->required();
    ve->add_option("--config", ve_config)->required();

    auto* vn = verify->add_subcommand("ensemble", "ensemble-level invariant checks");
    std::string vn_runs, vn_config;
    vn->add_option("--runs", vn_runs)->required();
    vn->add_option("--config", vn_config)->required();

    auto* vg = verify->add_subcommand("gibbs", "long-run occupation vs Gibbs measure");
    std::string vg_potential = "ou";
    double vg_u = 1.0, vg_theta = 1.0, vg_sigma = 1.0, vg_t = 1e4, vg_dt = 1e-3, vg_threshold = 0.02;
    std::uint64_t vg_seed = 11;
    vg->add_option("--potential", vg_potential)->check(CLI::IsMember({"ou", "double-well"}));
    vg->add_option("--u", vg_u);
    vg->add_option("--theta", vg_theta);
    vg->add_option("--sigma", vg_sigma);
    vg->add_option("--t-end", vg_t);
    vg->add_option("--dt", vg_dt);
    vg->add_option("--seed", vg_seed);
    vg->add_option("--threshold", vg_threshold);

    CLI11_PARSE(app, argc, argv);

    try {
        if (ou_cmd->parsed())
            return cmd_ou_sample(u, theta, sigma, t_end, dt, paths, seed, mode, out_csv);
        if (bounds_cmd->parsed()) return cmd_bounds(bound_args, bounds_json);
        if (sim_cmd->parsed()) return cmd_simulate(sim_config, sim_t_end, sim_seed, sim_out);
        if (ens_cmd->parsed()) return cmd_ensemble(ens_config, ens_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_config, sweep_sigma, sweep_theta, sweep_re, sweep_out);
        if (verify->parsed()) {
            if (vb->parsed()) return cmd_verify_background(vb_args, vb_samples, vb_seed);
            if (ve->parsed()) return cmd_verify_energy(ve_traj, ve_config);
            if (vn->parsed()) return cmd_verify_ensemble(vn_runs, vn_config);
            if (vg->parsed())
                return cmd_verify_gibbs(vg_potential, vg_u, vg_theta, vg_sigma, vg_t, vg_dt, vg_seed,
                                        vg_threshold);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
