// Acceptance suite: one pass/fail line per criterion, nonzero exit if any
// executed criterion fails. Criteria can be run singly with --only N; the
// stochastic-ensemble run (criterion 7) persists under acceptance_runs/ and
// criterion 11 resumes the same directory instead of recomputing it.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "shearlab/diagnostics.hpp"
#include "shearlab/harness.hpp"
#include "shearlab/quadrature.hpp"
#include "shearlab/stats.hpp"

using namespace shearlab;

namespace {

struct Criterion {
    int number;
    const char* summary;
    std::function<bool(std::string&)> run;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

harness::ExperimentConfig desk_ensemble_config() {
    harness::ExperimentConfig cfg;
    cfg.flow = bounds::FlowConfig::standard(background::Geometry{1.0, 1.0}, 0.02,
                                            ou::OUParams{1.0, 1.0, 0.25});  // Re = 50, theta = U/h
    cfg.grid.n1 = cfg.grid.n2 = cfg.grid.n3 = 32;
    cfg.t_end = 20.0;  // 20 h/U
    cfg.trajectories = 64;
    cfg.master_seed = 20260808;
    cfg.out_dir = "acceptance_runs/desk_re50";
    cfg.audit_energy = true;
    cfg.audit_tolerance_constant = 1.0;
    return cfg;
}

// ---------------------------------------------------------------------------
// 1. OU stationary moment identities against Monte Carlo at 4 standard errors.
bool criterion_moments(std::string& detail) {
    const ou::OUParams p{1.0, 1.0, std::numbers::sqrt2};  // stationary variance 1
    const int n = 1000000;
    Rng rng(910);
    std::vector<double> x(n), centered(n);
    for (int i = 0; i < n; ++i) {
        x[i] = ou::stationary_sample(p, rng);
        centered[i] = p.mean_speed - x[i];
    }
    bool ok = true;
    double worst = 0.0;
    for (int k : {2, 4, 6, 8}) {
        const auto est = sample_power_moment(x, k);
        const double dev = std::abs(est.value - ou::stationary_moment(p, k)) / est.standard_error;
        worst = std::max(worst, dev);
        ok = ok && dev <= 4.0;
    }
    for (int k : {2, 4}) {
        const auto est = sample_power_moment(centered, k);
        const double dev =
            std::abs(est.value - ou::stationary_central_moment(p, k)) / est.standard_error;
        worst = std::max(worst, dev);
        ok = ok && dev <= 4.0;
    }
    detail = fmt("worst deviation %.2f of 4 allowed standard errors", worst);
    return ok;
}

// ---------------------------------------------------------------------------
// 2. Quadratic variation over 100 paths, dt = 1e-4, T = 1: within 2% of sigma^2.
bool criterion_quadratic_variation(std::string& detail) {
    const ou::OUParams p{1.0, 1.0, 1.0};
    double acc = 0.0;
    const int n_paths = 100;
    for (int i = 0; i < n_paths; ++i)
        acc += ou::quadratic_variation(ou::sample_path_uniform(
            p, 1.0, 1e-4, derive_stream_seed(911, i), ou::PathInitial::stationary()));
    const double estimate = acc / n_paths;
    detail = fmt("estimate %.5f vs sigma^2 T = 1 (%.2f%% off)", estimate,
                 100.0 * std::abs(estimate - 1.0));
    return std::abs(estimate - 1.0) <= 0.02;
}

// ---------------------------------------------------------------------------
// 3. Layer admissibility scan: margin in [1/4, 1/2], delta < h, no violations.
bool criterion_layer_scan(std::string& detail) {
    int violations = 0;
    double min_margin = 1e300, max_margin = -1e300;
    for (double re : {1.1, 2.0, 10.0, 100.0}) {
        const double u = 1.0, h = 1.0;
        const double nu = u * h / re;
        const auto bp = background::BackgroundParams::standard(nu, u, background::Geometry{1.0, h});
        Rng rng(912);
        const ou::OUParams p{u, 1.0, 0.5};
        for (int i = 0; i < 100000; ++i) {
            const double z = ou::stationary_sample(p, rng);
            const double m = background::delta_inequality_margin(z, bp, nu);
            min_margin = std::min(min_margin, m);
            max_margin = std::max(max_margin, m);
            if (m < 0.25 - 1e-12 || m > 0.5 + 1e-12) ++violations;
            if (background::delta(z, bp) >= h) ++violations;
        }
    }
    detail = fmt("margin range [%.6f, %.6f], %g violations", min_margin, max_margin,
                 static_cast<double>(violations));
    return violations == 0;
}

// ---------------------------------------------------------------------------
// 4. Background-calculus closed forms against adaptive quadrature.
bool criterion_background_oracles(std::string& detail) {
    const double nu = 0.1, u = 1.0;
    const auto bp = background::BackgroundParams::standard(nu, u, background::Geometry{1.0, 1.0});
    const ou::OUParams p{u, 1.0, 0.5};
    Rng rng(913);
    double worst_f = 0.0, worst_g = 0.0;
    int cap_violations = 0;
    const double cap = 3.0 * bp.a / bp.b;
    for (int i = 0; i < 10000; ++i) {
        const double z = ou::stationary_sample(p, rng);
        const double d = background::delta(z, bp);
        const double closed = background::int_fprime_sq(z, bp);
        if (closed > cap * (1.0 + 1e-12)) ++cap_violations;
        const double q = (3.0 * z * z + bp.b) / bp.a;
        const auto quad = integrate(
            [&](double x3) {
                const double fp = 1.0 - q * x3;
                return fp * fp;
            },
            0.0, d, 1e-13);
        worst_f = std::max(worst_f, std::abs(closed - quad.value) / std::abs(closed));

        const double gphi = background::grad_phi_norm_sq(z, bp);
        const double step = d * 1e-5;
        const auto gq = integrate(
            [&](double x3) {
                const double lo = std::max(0.0, x3 - step);
                const double hi = std::min(d * (1.0 - 1e-12), x3 + step);
                const double deriv = (background::phi(hi, z, bp) - background::phi(lo, z, bp)) / (hi - lo);
                return deriv * deriv;
            },
            0.0, d * (1.0 - 1e-10), 1e-12);
        worst_g = std::max(worst_g, std::abs(gphi - gq.value) / std::abs(gphi));
    }
    detail = fmt("int(f')^2 worst rel err %.2e (tol 1e-10); |grad Phi|^2 worst %.2e (tol 1e-8)",
                 worst_f, worst_g) + fmt("; %g cap violations", static_cast<double>(cap_violations));
    return worst_f <= 1e-10 && worst_g <= 1e-8 && cap_violations == 0;
}

// ---------------------------------------------------------------------------
// 5. Bound arithmetic: exact zero-noise constants, the worked point, dual routes.
bool criterion_bound_arithmetic(std::string& detail) {
    using bounds::FlowConfig;
    const background::Geometry geom{1.0, 1.0};
    const auto zero = FlowConfig::standard(geom, 0.5, ou::OUParams{1.0, 1.0, 0.0});
    const auto worked = FlowConfig::standard(geom, 0.5, ou::OUParams{1.0, 1.0, 1.0});
    const bool exact_zero = bounds::mean_bound(zero) == 32.0 &&
                            bounds::second_moment_bound(zero) == 24640.0;
    const bool worked_ok = bounds::mean_bound(worked) == 124.0;
    double worst_dual = 0.0;
    for (const auto& cfg :
         {worked, FlowConfig::standard(geom, 0.02, ou::OUParams{1.0, 1.0, 0.25}),
          FlowConfig::standard(background::Geometry{2.0, 1.7}, 0.9, ou::OUParams{2.3, 0.7, 0.4})}) {
        worst_dual = std::max(worst_dual,
                              std::abs(bounds::second_moment_bound_general(cfg) -
                                       bounds::second_moment_bound(cfg)) /
                                  bounds::second_moment_bound(cfg));
        worst_dual = std::max(worst_dual, std::abs(bounds::mean_bound_general(cfg) -
                                                   bounds::mean_bound(cfg)) /
                                              bounds::mean_bound(cfg));
    }
    detail = std::string("sigma=0 exact ") + (exact_zero ? "yes" : "NO") + ", worked point 124 " +
             (worked_ok ? "yes" : "NO") + fmt(", dual-route worst rel diff %.2e", worst_dual);
    return exact_zero && worked_ok && worst_dual <= 1e-12;
}

// ---------------------------------------------------------------------------
// 6. Laminar validation: grid convergence of <eps>_T at observed order >= 1.9
//    against the separated-variables reference, plus the long-time laminar limit.
bool criterion_laminar(std::string& detail) {
    const double nu = 0.1, u_wall = 1.0;  // Re = 10
    const double amp1 = 0.5, amp3 = 0.2;
    const background::Geometry geom{1.0, 1.0};
    const double t_end = 2.0;

    // Smooth compatible transient: u(z,0) = U(1 - z) + sum_k amp_k sin(k pi z).
    // The modes are orthogonal, so the exact time-averaged dissipation is
    //   nu U^2 + sum_k (amp_k^2 / (4T)) (1 - e^{-2 nu k^2 pi^2 T}).
    const double pi2 = std::numbers::pi * std::numbers::pi;
    const double exact =
        nu * u_wall * u_wall +
        amp1 * amp1 / (4.0 * t_end) * (1.0 - std::exp(-2.0 * nu * pi2 * t_end)) +
        amp3 * amp3 / (4.0 * t_end) * (1.0 - std::exp(-18.0 * nu * pi2 * t_end));

    auto run_error = [&](int n3) {
        solver::GridSpec grid;
        grid.n1 = grid.n2 = 1;
        grid.n3 = n3;
        auto f = solver::init_field(geom, grid, solver::InitialCondition::couette(u_wall));
        for (int k = 0; k < n3; ++k)
            f.u1(0, 0, k) += amp1 * std::sin(std::numbers::pi * f.z_center(k)) +
                             amp3 * std::sin(3.0 * std::numbers::pi * f.z_center(k));
        solver::ChannelStepper stepper(geom, grid, nu);
        const double dt_raw = solver::auto_time_step(geom, grid, nu, u_wall);
        const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt_raw));
        const double dt = t_end / static_cast<double>(steps);
        double integral = 0.0;
        double prev = solver::dissipation(f, nu);
        for (std::size_t s = 0; s < steps; ++s) {
            stepper.step(f, u_wall, dt);
            const double cur = solver::dissipation(f, nu);
            integral += 0.5 * (prev + cur) * dt;
            prev = cur;
        }
        return std::abs(integral / t_end - exact);
    };

    const double e16 = run_error(16);
    const double e32 = run_error(32);
    const double e64 = run_error(64);
    const double order_a = std::log2(e16 / e32);
    const double order_b = std::log2(e32 / e64);

    // Long-time limit from rest: the instantaneous dissipation settles at
    // the laminar nu U^2 / h^2.
    solver::GridSpec grid;
    grid.n1 = grid.n2 = 1;
    grid.n3 = 16;
    auto cfg = bounds::FlowConfig::standard(geom, nu, ou::OUParams{u_wall, 1.0, 0.0});
    solver::SimulateOptions opt;
    opt.wall_initial = ou::PathInitial::fixed(u_wall);
    opt.initial = solver::InitialCondition::rest();
    opt.couette_at_wall_speed = false;
    opt.record_audit = false;
    const auto rec = solver::simulate_trajectory(cfg, grid, 40.0, 1, opt);
    const double laminar_err = std::abs(rec.dissipation.back() - nu);

    detail = fmt("observed orders %.2f, %.2f (need >= 1.9); ", order_a, order_b) +
             fmt("errors %.3e/%.3e/", e16, e32) + fmt("%.3e; long-time |eps - nu U^2/h^2| = %.1e",
                                                      e64, laminar_err);
    return order_a >= 1.9 && order_b >= 1.9 && laminar_err < 1e-8;
}

// ---------------------------------------------------------------------------
// 7. Desk-scale stochastic ensemble: bound validity with 3-sigma headroom.
bool criterion_ensemble(std::string& detail) {
    const auto cfg = desk_ensemble_config();
    const auto result = harness::run_ensemble(cfg);
    if (result.completed != cfg.trajectories) {
        detail = fmt("only %g of %g trajectories completed", result.completed, cfg.trajectories);
        return false;
    }
    const auto& s = result.stats;
    const auto& b = result.bounds;
    const bool mean_ok = s.mean + 3.0 * s.se_mean <= b.mean_bound;
    const bool second_ok = s.second_moment + 3.0 * s.se_second_moment <= b.second_moment_bound;
    detail = fmt("mean %.4f + 3se %.4f vs bound %.2f; ", s.mean, 3.0 * s.se_mean, b.mean_bound) +
             fmt("second moment %.5f + 3se %.5f vs bound %.0f", s.second_moment,
                 3.0 * s.se_second_moment, b.second_moment_bound);
    return mean_ok && second_ok;
}

// ---------------------------------------------------------------------------
// 8. Martingale audit in the 1D-diffusion degenerate mode.
bool criterion_martingale(std::string& detail) {
    auto cfg = bounds::FlowConfig::standard(background::Geometry{1.0, 1.0}, 0.02,
                                            ou::OUParams{1.0, 1.0, 0.25});
    solver::GridSpec grid;
    grid.n1 = grid.n2 = 1;  // horizontal resolution of one cell
    grid.n3 = 32;
    const double t_end = 2.0;
    const int n_traj = 1000;

    diag::AuditOptions aopt;
    double m_sum = 0.0, m_sq = 0.0;
    int qv_failures = 0;
    for (int i = 0; i < n_traj; ++i) {
        const auto rec = solver::simulate_trajectory(cfg, grid, t_end,
                                                     derive_stream_seed(918, i), {});
        if (!rec.completed) {
            detail = "trajectory " + std::to_string(i) + " aborted: " + rec.abort_reason;
            return false;
        }
        const auto led = diag::energy_inequality_audit(rec, cfg, grid, aopt);
        if (!led.qv_cap_pass) ++qv_failures;
        m_sum += led.martingale;
        m_sq += led.martingale * led.martingale;
    }
    const double mean = m_sum / n_traj;
    const double se = std::sqrt((m_sq / n_traj - mean * mean) / (n_traj - 1.0));
    detail = fmt("E[M_T] = %.3e with se %.3e (|mean| = %.2f se)", mean, se,
                 std::abs(mean) / se) +
             fmt("; %g quadratic-variation cap failures", static_cast<double>(qv_failures));
    return std::abs(mean) <= 4.0 * se && qv_failures == 0;
}

// ---------------------------------------------------------------------------
// 9. Over-dissipation of the Wiener wall: (1/T) E int_0^T X^2 dt grows like T/2.
bool criterion_wiener_slope(std::string& detail) {
    const ou::OUParams p{0.0, 1.0, 1.0};  // sigma = 1: X = W
    const int n_paths = 1000;
    const double dt = 1e-3;
    const std::vector<double> horizons = {1.0, 2.0, 4.0, 8.0};
    std::vector<double> value(horizons.size(), 0.0);

    for (int i = 0; i < n_paths; ++i) {
        const auto path = ou::sample_path_uniform(p, horizons.back(), dt,
                                                  derive_stream_seed(919, i),
                                                  ou::PathInitial::fixed(0.0), ou::PathMode::wiener);
        double integral = 0.0;
        std::size_t h_index = 0;
        for (std::size_t n = 1; n < path.values.size(); ++n) {
            const double a = path.values[n - 1], b = path.values[n];
            integral += 0.5 * (a * a + b * b) * dt;
            const double t = path.times[n];
            while (h_index < horizons.size() && t >= horizons[h_index] - 0.5 * dt) {
                value[h_index] += integral / horizons[h_index];
                ++h_index;
            }
        }
    }
    for (auto& v : value) v /= n_paths;

    // Least-squares slope of value(T) against T through the origin; the
    // exact law E[(1/T) int X^2] = T/2 makes the slope 1/2.
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < horizons.size(); ++k) {
        num += horizons[k] * value[k];
        den += horizons[k] * horizons[k];
    }
    const double slope = num / den;
    detail = fmt("values at T=1,2,4,8: %.3f, %.3f, ", value[0], value[1]) +
             fmt("%.3f, %.3f; ", value[2], value[3]) +
             fmt("fitted slope %.4f vs 1/2 (%.2f%% off)", slope, 200.0 * std::abs(slope - 0.5));
    return std::abs(slope - 0.5) <= 0.05 * 0.5;
}

// ---------------------------------------------------------------------------
// 10. Gibbs occupation law for the OU potential and the double well.
bool criterion_gibbs(std::string& detail) {
    const auto quad = ou::GradientSystem::quadratic(ou::OUParams{1.0, 1.0, 1.0});
    const auto r_ou = ou::gibbs_longrun_check(quad, 1e4, 1e-3, 920);
    const auto dw = ou::GradientSystem::double_well(1.0);
    const auto r_dw = ou::gibbs_longrun_check(dw, 1e4, 1e-3, 1);
    detail = fmt("KS distances: OU potential %.4f, double well %.4f (threshold 0.02)",
                 r_ou.ks_distance, r_dw.ks_distance);
    return r_ou.ks_distance < 0.02 && r_dw.ks_distance < 0.02;
}

// ---------------------------------------------------------------------------
// 11. Energy-inequality audit across the criterion-7 ensemble.
bool criterion_energy_audit(std::string& detail) {
    const auto cfg = desk_ensemble_config();
    const auto result = harness::run_ensemble(cfg);  // resumes the finished run
    if (result.ledgers.empty()) {
        detail = "no audit ledgers found";
        return false;
    }
    int passes = 0;
    double min_slack = 1e300, min_norm_slack = 1e300;
    for (const auto& led : result.ledgers) {
        if (led.pass) ++passes;
        min_slack = std::min(min_slack, led.slack);
        min_norm_slack = std::min(min_norm_slack, led.slack / led.y_total);
    }
    const double rate = 100.0 * passes / static_cast<double>(result.ledgers.size());
    detail = fmt("pass rate %.1f%% over %g trajectories; ", rate,
                 static_cast<double>(result.ledgers.size())) +
             fmt("min slack %.3f (%.3f of Y_T)", min_slack, min_norm_slack);
    return passes == static_cast<int>(result.ledgers.size());
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<Criterion> criteria = {
        {1, "OU stationary moment identities (1e6 samples, 4 SE)", criterion_moments},
        {2, "quadratic variation within 2% of sigma^2 (100 paths, dt=1e-4)",
         criterion_quadratic_variation},
        {3, "layer margin in [1/4,1/2] and delta < h, zero violations", criterion_layer_scan},
        {4, "background calculus vs adaptive quadrature oracles", criterion_background_oracles},
        {5, "bound arithmetic: 32 U^3/h, 24640 U^6/h^2, 124, dual routes",
         criterion_bound_arithmetic},
        {6, "laminar solver convergence at observed order >= 1.9", criterion_laminar},
        {7, "stochastic ensemble bound check (Re=50, 32^3, N=64, T=20)", criterion_ensemble},
        {8, "martingale audit: E[M_T] within 4 SE of 0, QV cap pathwise", criterion_martingale},
        {9, "wiener-mode over-dissipation slope T/2 within 5%", criterion_wiener_slope},
        {10, "gibbs occupation KS < 0.02 for OU and double-well potentials", criterion_gibbs},
        {11, "energy-inequality slack >= -tolerance on every ensemble trajectory",
         criterion_energy_audit},
    };

    int only = 0;
    for (int a = 1; a < argc; ++a) {
        if (std::strcmp(argv[a], "--only") == 0 && a + 1 < argc) only = std::atoi(argv[++a]);
        else if (std::strcmp(argv[a], "--list") == 0) {
            for (const auto& c : criteria) std::printf("%2d  %s\n", c.number, c.summary);
            return 0;
        }
    }

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.number != only) continue;
        std::string detail;
        const auto t0 = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& ex) {
            detail = std::string("exception: ") + ex.what();
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s — %s (%.1fs)\n", ok ? "PASS" : "FAIL", c.number,
                    c.summary, detail.c_str(), secs);
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
