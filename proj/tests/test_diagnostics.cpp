#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "shearlab/diagnostics.hpp"

using namespace shearlab;
using namespace shearlab::diag;

namespace {

bounds::FlowConfig desk_config(double sigma, double nu = 0.1, double theta = 1.0) {
    return bounds::FlowConfig::standard(background::Geometry{1.0, 1.0}, nu,
                                        ou::OUParams{1.0, theta, sigma});
}

solver::GridSpec grid_1d(int n3) {
    solver::GridSpec g;
    g.n1 = 1;
    g.n2 = 1;
    g.n3 = n3;
    return g;
}

}  // namespace

TEST_CASE("fluctuation field basics") {
    const auto cfg = desk_config(0.25);
    solver::GridSpec grid;
    grid.n1 = grid.n2 = 4;
    grid.n3 = 16;

    SUBCASE("u = Phi gives v = 0") {
        auto f = solver::init_field(cfg.geometry, grid, solver::InitialCondition::rest());
        const double x = 1.0;
        for (int k = 0; k < grid.n3; ++k)
            for (int j = 0; j < grid.n2; ++j)
                for (int i = 0; i < grid.n1; ++i)
                    f.u1(i, j, k) = background::phi(f.z_center(k), x, cfg.background);
        f.wall_speed = x;
        const auto v = fluctuation(f, x, cfg.background);
        for (double val : v.v1) CHECK(val == 0.0);
        CHECK(norm_sq(v) == 0.0);
        const auto trace = trace_lemma_check(v, [](double) { return 1.0; }, cfg.background);
        CHECK(trace.lhs == 0.0);
        CHECK(trace.rhs >= 0.0);
    }
    SUBCASE("couette minus the layer profile, in closed form") {
        auto f = solver::init_field(cfg.geometry, grid, solver::InitialCondition::couette(1.0));
        const auto v = fluctuation(f, 1.0, cfg.background);
        for (int k = 0; k < grid.n3; ++k) {
            const double z = f.z_center(k);
            const double expected =
                (1.0 - z / cfg.geometry.height) - background::phi(z, 1.0, cfg.background);
            CHECK(v.v1[v.idx(2, 1, k)] == doctest::Approx(expected).epsilon(1e-14));
        }
    }
    SUBCASE("geometry mismatch rejected") {
        auto f = solver::init_field(cfg.geometry, grid, solver::InitialCondition::rest());
        auto other = cfg.background;
        other.geometry.height = 2.0;
        CHECK_THROWS_AS(fluctuation(f, 1.0, other), std::invalid_argument);
    }
}

TEST_CASE("gradient splitting inequality on snapshots") {
    // ||grad u||^2 <= 2 (||grad v||^2 + ||grad Phi||^2), from u = v + Phi.
    const auto cfg = desk_config(0.25);
    solver::GridSpec grid;
    grid.n1 = grid.n2 = 8;
    grid.n3 = 16;
    auto f = solver::init_field(cfg.geometry, grid,
                                solver::InitialCondition::perturbed(1.0, 0.2, 11));
    solver::ChannelStepper stepper(cfg.geometry, grid, cfg.nu);
    const double dt = solver::auto_time_step(cfg.geometry, grid, cfg.nu, 2.0);
    for (int s = 0; s < 10; ++s) stepper.step(f, 1.0, dt);

    const auto d = solver::step_diagnostics(f, cfg.nu, &cfg.background);
    const double grad_phi = background::grad_phi_norm_sq(f.wall_speed, cfg.background);
    CHECK(d.grad_u_sq <= 2.0 * (d.grad_v_sq + grad_phi) * (1.0 + 1e-12));
}

TEST_CASE("trace lemma") {
    const auto cfg = desk_config(0.25);
    solver::GridSpec grid;
    grid.n1 = grid.n2 = 4;
    grid.n3 = 32;

    SUBCASE("holds for the f' profile and specializes to the explicit cap") {
        auto f = solver::init_field(cfg.geometry, grid,
                                    solver::InitialCondition::perturbed(1.0, 0.3, 2));
        const double x = 1.1;
        f.wall_speed = x;
        const auto v = fluctuation(f, x, cfg.background);
        const double q = (3.0 * x * x + cfg.background.b) / cfg.background.a;
        const auto res = trace_lemma_check(v, [&](double z) { return 1.0 - q * z; }, cfg.background);
        CHECK(res.lhs <= res.rhs * (1.0 + 1e-12));
        // With G = f', int G^2 <= 3A/B and delta <= A/B give the cap
        // sqrt(3) ||grad v|| L (A/B)^{3/2}.
        const double ab = cfg.background.a / cfg.background.b;
        const double cap = std::sqrt(3.0) * std::sqrt(grad_norm_sq(v)) * cfg.geometry.length *
                           std::pow(ab, 1.5);
        CHECK(res.rhs <= cap * (1.0 + 1e-12));
    }
    SUBCASE("randomized profiles never violate it") {
        Rng rng(303);
        auto base = solver::init_field(cfg.geometry, grid, solver::InitialCondition::rest());
        for (int trial = 0; trial < 100; ++trial) {
            auto f = base;
            const double x = 0.6 + rng.uniform01();
            // Divergence-free in-plane field from a streamfunction profile
            // g(z) = z^2 (h - z)^2 with random horizontal phases.
            const double amp = 2.0 * rng.uniform01() - 1.0;
            const int mode = 1 + static_cast<int>(rng.uniform01() * 2.0);
            const double kx = 2.0 * std::numbers::pi * mode / cfg.geometry.length;
            for (int k = 0; k < grid.n3; ++k) {
                const double z = f.z_center(k);
                const double gprime = 2.0 * z * (1.0 - z) * (1.0 - 2.0 * z);
                for (int j = 0; j < grid.n2; ++j)
                    for (int i = 0; i < grid.n1; ++i)
                        f.u1(i, j, k) = -amp * gprime * std::sin(kx * i * f.dx1());
            }
            for (int k = 1; k < grid.n3; ++k) {
                const double z = f.z_face(k);
                const double g = z * z * (1.0 - z) * (1.0 - z);
                for (int j = 0; j < grid.n2; ++j)
                    for (int i = 0; i < grid.n1; ++i)
                        f.u3(i, j, k) = amp * g * kx * std::cos(kx * (i + 0.5) * f.dx1());
            }
            f.wall_speed = x;
            const auto v = fluctuation(f, x, cfg.background);
            const double c0 = 2.0 * rng.uniform01() - 1.0;
            const double c1 = 2.0 * rng.uniform01() - 1.0;
            const auto res = trace_lemma_check(
                v, [&](double z) { return c0 + c1 * std::cos(40.0 * z); }, cfg.background);
            CHECK(res.lhs <= res.rhs * (1.0 + 1e-10) + 1e-14);
        }
    }
}

TEST_CASE("pathwise Ito identity residual") {
    const auto cfg = desk_config(1.0, 0.1, 1.0);
    const auto& bp = cfg.background;

    SUBCASE("frozen path at the mean gives exactly zero") {
        const ou::OUParams frozen{1.0, 1.0, 0.0};
        const auto path = ou::sample_path_uniform(frozen, 1.0, 0.01, 5, ou::PathInitial::fixed(1.0));
        const auto res = ito_residual(path, bp, frozen, 0.2 * background::delta(1.0, bp));
        CHECK(res.residual == 0.0);
        CHECK(res.skipped_steps == 0);
    }
    SUBCASE("rms residual halves like sqrt(dt)") {
        const ou::OUParams p{1.0, 1.0, 1.0};
        const double x3 = 0.01;  // deep inside the layer for typical X
        auto rms_at = [&](double dt) {
            double acc = 0.0;
            const int n_paths = 400;
            int used = 0;
            for (int i = 0; i < n_paths; ++i) {
                const auto path = ou::sample_path_uniform(p, 1.0, dt, derive_stream_seed(71, i),
                                                          ou::PathInitial::stationary());
                const auto res = ito_residual(path, bp, p, x3);
                if (res.skipped_steps > 0) continue;  // rare large excursions
                acc += res.residual * res.residual;
                ++used;
            }
            REQUIRE(used > n_paths / 2);
            return std::sqrt(acc / used);
        };
        const double r1 = rms_at(4e-3);
        const double r2 = rms_at(1e-3);
        CHECK(r2 < r1);  // shrinks under refinement
        CHECK(r1 / r2 == doctest::Approx(2.0).epsilon(0.45));  // strong order 1/2
        CHECK(r2 < 0.1);  // small against the O(1) scale of f
    }
    SUBCASE("heights above the layer are skipped and counted") {
        const ou::OUParams p{1.0, 1.0, 1.0};
        const auto path = ou::sample_path_uniform(p, 1.0, 0.01, 9, ou::PathInitial::stationary());
        const double x3 = bp.a / bp.b * 0.9;  // above delta for most wall speeds
        const auto res = ito_residual(path, bp, p, x3);
        CHECK(res.skipped_steps > 0);
        CHECK(res.total_steps == path.values.size() - 1);
    }
    SUBCASE("missing increments rejected") {
        ou::OUPath path;
        path.times = {0.0, 0.1};
        path.values = {1.0, 1.1};
        CHECK_THROWS_AS(ito_residual(path, bp, ou::OUParams{1.0, 1.0, 1.0}, 0.01),
                        std::invalid_argument);
    }
}

TEST_CASE("ensemble statistics") {
    const auto cfg = desk_config(0.0);
    const auto grid = grid_1d(8);
    solver::SimulateOptions opt;
    opt.wall_initial = ou::PathInitial::fixed(1.0);

    SUBCASE("identical trajectories have zero spread") {
        const auto rec = solver::simulate_trajectory(cfg, grid, 0.5, 1, opt);
        std::vector<solver::TrajectoryRecord> recs{rec, rec, rec};
        const auto stats = ensemble_stats(recs, 0.5);
        CHECK(stats.se_mean == 0.0);
        CHECK(stats.second_moment == doctest::Approx(stats.mean * stats.mean).epsilon(1e-14));
    }
    SUBCASE("deterministic ensemble concentrates at the laminar value") {
        std::vector<solver::TrajectoryRecord> recs;
        for (int i = 0; i < 3; ++i)
            recs.push_back(solver::simulate_trajectory(cfg, grid, 20.0, 100 + i, opt));
        const auto stats = ensemble_stats(recs, 20.0);
        CHECK(stats.mean == doctest::Approx(cfg.nu).epsilon(0.05));  // nu U^2/h^2 = nu
        CHECK(stats.se_mean < 1e-12);
    }
    SUBCASE("mismatched horizons and tiny ensembles rejected") {
        const auto a = solver::simulate_trajectory(cfg, grid, 0.5, 1, opt);
        const auto b = solver::simulate_trajectory(cfg, grid, 0.6, 2, opt);
        std::vector<solver::TrajectoryRecord> recs{a, b};
        CHECK_THROWS_AS(ensemble_stats(recs, 0.5), std::invalid_argument);
        std::vector<solver::TrajectoryRecord> one{a};
        CHECK_THROWS_AS(ensemble_stats(one, 0.5), std::invalid_argument);
    }
}

TEST_CASE("energy inequality audit") {
    const auto grid = grid_1d(16);

    SUBCASE("deterministic wall: martingale vanishes, slack is positive") {
        const auto cfg = desk_config(0.0);
        solver::SimulateOptions opt;
        opt.wall_initial = ou::PathInitial::fixed(1.0);
        const auto rec = solver::simulate_trajectory(cfg, grid, 5.0, 3, opt);
        const auto led = energy_inequality_audit(rec, cfg, grid);
        CHECK(led.martingale == 0.0);
        CHECK(led.martingale_qv == 0.0);
        CHECK(led.qv_cap_pass);
        CHECK(led.slack >= -led.tolerance);
        CHECK(led.pass);
    }
    SUBCASE("stochastic ensemble: pathwise caps, slack, centered martingale") {
        const auto cfg = desk_config(0.25);
        solver::SimulateOptions opt;
        double m_sum = 0.0, m_sq = 0.0;
        const int n_traj = 40;
        for (int i = 0; i < n_traj; ++i) {
            const auto rec =
                solver::simulate_trajectory(cfg, grid, 2.0, derive_stream_seed(50, i), opt);
            REQUIRE(rec.completed);
            const auto led = energy_inequality_audit(rec, cfg, grid);
            CHECK(led.qv_cap_pass);
            CHECK(led.slack >= -led.tolerance);
            CHECK(led.martingale_qv <= led.qv_cap * (1.0 + 1e-9));
            m_sum += led.martingale;
            m_sq += led.martingale * led.martingale;
        }
        const double mean = m_sum / n_traj;
        const double se = std::sqrt((m_sq / n_traj - mean * mean) / (n_traj - 1.0));
        CHECK(std::abs(mean) <= 4.0 * se);
    }
    SUBCASE("audit tolerance shrinks under refinement") {
        const auto cfg = desk_config(0.25);
        solver::SimulateOptions opt;
        const auto coarse = solver::simulate_trajectory(cfg, grid_1d(8), 1.0, 7, opt);
        const auto fine = solver::simulate_trajectory(cfg, grid_1d(32), 1.0, 7, opt);
        const auto led_c = energy_inequality_audit(coarse, cfg, grid_1d(8));
        const auto led_f = energy_inequality_audit(fine, cfg, grid_1d(32));
        CHECK(led_f.tolerance < led_c.tolerance);
    }
    SUBCASE("records without audit series are rejected") {
        const auto cfg = desk_config(0.25);
        solver::SimulateOptions opt;
        opt.record_audit = false;
        const auto rec = solver::simulate_trajectory(cfg, grid, 0.5, 3, opt);
        CHECK_THROWS_AS(energy_inequality_audit(rec, cfg, grid), std::invalid_argument);
    }
}
