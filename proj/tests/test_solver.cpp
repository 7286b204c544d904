#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "shearlab/trajectory.hpp"

using namespace shearlab;
using namespace shearlab::solver;

namespace {

GridSpec grid_1d(int n3, double cfl = 0.9) {
    GridSpec g;
    g.n1 = 1;
    g.n2 = 1;
    g.n3 = n3;
    g.cfl_safety = cfl;
    return g;
}

// Method-of-lines reference for the 1D diffusion problem
//   u_t = nu u_zz,  u(0, t) = wall(t),  u(h, t) = 0,
// on a node-centered grid much finer than the solver's, integrated with
// RK4. Independent of the production discretization.
std::vector<double> heat_reference(double nu, double h, int nodes,
                                   const std::function<double(double)>& wall, double t_end) {
    const double dz = h / nodes;
    std::vector<double> u(nodes + 1, 0.0);
    u[0] = wall(0.0);
    const double dt = 0.2 * dz * dz / nu;
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt));
    const double dt_eff = t_end / static_cast<double>(steps);

    auto rhs = [&](const std::vector<double>& y, double t, std::vector<double>& out) {
        out.assign(y.size(), 0.0);
        std::vector<double> w = y;
        w[0] = wall(t);
        w[nodes] = 0.0;
        for (int m = 1; m < nodes; ++m)
            out[m] = nu * (w[m + 1] - 2.0 * w[m] + w[m - 1]) / (dz * dz);
    };

    std::vector<double> k1, k2, k3, k4, tmp(u.size());
    for (std::size_t s = 0; s < steps; ++s) {
        const double t = static_cast<double>(s) * dt_eff;
        rhs(u, t, k1);
        for (std::size_t m = 0; m < u.size(); ++m) tmp[m] = u[m] + 0.5 * dt_eff * k1[m];
        rhs(tmp, t + 0.5 * dt_eff, k2);
        for (std::size_t m = 0; m < u.size(); ++m) tmp[m] = u[m] + 0.5 * dt_eff * k2[m];
        rhs(tmp, t + 0.5 * dt_eff, k3);
        for (std::size_t m = 0; m < u.size(); ++m) tmp[m] = u[m] + dt_eff * k3[m];
        rhs(tmp, t + dt_eff, k4);
        for (std::size_t m = 0; m < u.size(); ++m)
            u[m] += dt_eff / 6.0 * (k1[m] + 2.0 * k2[m] + 2.0 * k3[m] + k4[m]);
        u[0] = wall(t + dt_eff);
        u[nodes] = 0.0;
    }
    return u;
}

double max_wall_error_vs_reference(int n3, double nu, double t_end,
                                   const std::function<double(double)>& wall) {
    const Geometry geom{1.0, 1.0};
    const GridSpec grid = grid_1d(n3);
    VelocityField f = init_field(geom, grid, InitialCondition::rest());
    ChannelStepper stepper(geom, grid, nu);
    const double dt_raw = auto_time_step(geom, grid, nu, 1.0);
    const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt_raw));
    const double dt = t_end / static_cast<double>(steps);
    for (std::size_t s = 0; s < steps; ++s)
        stepper.step(f, wall(static_cast<double>(s) * dt), dt);

    const int ref_nodes = 16 * n3;
    const auto ref = heat_reference(nu, geom.height, ref_nodes, wall, t_end);
    double worst = 0.0;
    for (int k = 0; k < n3; ++k) {
        const double z = f.z_center(k);
        const double pos = z / geom.height * ref_nodes;
        const int m = static_cast<int>(pos);
        const double frac = pos - m;
        const double exact = ref[m] * (1.0 - frac) + ref[m + 1] * frac;
        worst = std::max(worst, std::abs(f.u1(0, 0, k) - exact));
    }
    return worst;
}

}  // namespace

TEST_CASE("grid validation") {
    GridSpec g;
    g.n1 = 12;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = GridSpec{};
    g.n3 = 4;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g = GridSpec{};
    g.cfl_safety = 1.5;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    CHECK_NOTHROW(grid_1d(8).validate());
}

TEST_CASE("initial fields") {
    const Geometry geom{1.0, 1.0};
    GridSpec grid;
    grid.n1 = grid.n2 = grid.n3 = 8;
    ChannelStepper stepper(geom, grid, 0.1);

    SUBCASE("rest is the zero field") {
        const auto f = init_field(geom, grid, InitialCondition::rest());
        for (double v : f.u1_data()) CHECK(v == 0.0);
        for (double v : f.u3_data()) CHECK(v == 0.0);
        CHECK(stepper.max_divergence(f) == 0.0);
    }
    SUBCASE("couette is exactly divergence-free with the exact dissipation") {
        const auto f = init_field(geom, grid, InitialCondition::couette(1.0));
        CHECK(stepper.max_divergence(f) == 0.0);
        CHECK(f.u1(3, 4, 0) == doctest::Approx(1.0 - f.z_center(0)).epsilon(1e-15));
        // One-sided stencils are exact on the linear profile: eps = nu U^2/h^2.
        CHECK(dissipation(f, 0.1) == doctest::Approx(0.1).epsilon(1e-13));
    }
    SUBCASE("perturbed projects below the divergence tolerance") {
        const auto f = init_field(geom, grid, InitialCondition::perturbed(1.0, 0.2, 99));
        CHECK(stepper.max_divergence(f) < 1e-10);
        CHECK(f.u3(0, 0, 0) == 0.0);
        CHECK(f.u3(0, 0, grid.n3) == 0.0);
    }
}

TEST_CASE("rest with a stationary wall is a fixed point") {
    const Geometry geom{1.0, 1.0};
    GridSpec grid;
    grid.n1 = grid.n2 = grid.n3 = 8;
    auto f = init_field(geom, grid, InitialCondition::rest());
    ChannelStepper stepper(geom, grid, 0.1);
    for (int s = 0; s < 5; ++s) stepper.step(f, 0.0, 1e-3);
    for (double v : f.u1_data()) CHECK(v == 0.0);
    for (double v : f.u2_data()) CHECK(v == 0.0);
    for (double v : f.u3_data()) CHECK(v == 0.0);
}

TEST_CASE("constant wall relaxes to the discrete Couette profile") {
    const Geometry geom{1.0, 1.0};
    const GridSpec grid = grid_1d(16);
    const double nu = 0.1;  // Re = 10
    auto f = init_field(geom, grid, InitialCondition::rest());
    ChannelStepper stepper(geom, grid, nu);
    const double dt = auto_time_step(geom, grid, nu, 1.0);
    const double t_end = 30.0;
    const auto steps = static_cast<std::size_t>(t_end / dt);
    for (std::size_t s = 0; s < steps; ++s) stepper.step(f, 1.0, dt);

    double worst = 0.0;
    for (int k = 0; k < grid.n3; ++k)
        worst = std::max(worst, std::abs(f.u1(0, 0, k) - (1.0 - f.z_center(k))));
    CHECK(worst < 1e-8);
    CHECK(dissipation(f, nu) == doctest::Approx(nu).epsilon(1e-8));
}

TEST_CASE("oscillating wall matches the method-of-lines reference") {
    const double nu = 0.1;
    auto wall = [](double t) { return std::sin(t); };
    const double e16 = max_wall_error_vs_reference(16, nu, 2.0, wall);
    const double e32 = max_wall_error_vs_reference(32, nu, 2.0, wall);
    CHECK(e16 < 5e-3);
    CHECK(e32 < e16 / 2.5);  // second order in dx with dt ~ dx^2
}

TEST_CASE("divergence stays at solver tolerance along a 3D run") {
    const Geometry geom{1.0, 1.0};
    GridSpec grid;
    grid.n1 = grid.n2 = grid.n3 = 8;
    auto f = init_field(geom, grid, InitialCondition::perturbed(1.0, 0.3, 5));
    ChannelStepper stepper(geom, grid, 0.05);
    const double dt = auto_time_step(geom, grid, 0.05, 2.0);
    for (int s = 0; s < 25; ++s) {
        stepper.step(f, 1.0, dt);
        CHECK(stepper.max_divergence(f) < 1e-10);
    }
    CHECK(std::isfinite(step_diagnostics(f, 0.05).kinetic_energy));
}

TEST_CASE("mirror symmetry in the streamwise direction") {
    const Geometry geom{1.0, 1.0};
    GridSpec grid;
    grid.n1 = grid.n2 = grid.n3 = 8;
    const int n1 = grid.n1, m1 = n1 - 1;

    auto mirror = [&](const VelocityField& src) {
        VelocityField dst = src;
        for (int k = 0; k <= grid.n3; ++k)
            for (int j = 0; j < grid.n2; ++j)
                for (int i = 0; i < n1; ++i) {
                    if (k < grid.n3) {
                        dst.u1(i, j, k) = -src.u1((n1 - i) & m1, j, k);
                        dst.u2(i, j, k) = src.u2(n1 - 1 - i, j, k);
                        dst.p(i, j, k) = src.p(n1 - 1 - i, j, k);
                    }
                    dst.u3(i, j, k) = src.u3(n1 - 1 - i, j, k);
                }
        dst.wall_speed = -src.wall_speed;
        return dst;
    };

    auto fa = init_field(geom, grid, InitialCondition::perturbed(1.0, 0.2, 31));
    auto fb = mirror(fa);
    ChannelStepper sa(geom, grid, 0.05), sb(geom, grid, 0.05);
    const double dt = auto_time_step(geom, grid, 0.05, 2.0);
    for (int s = 0; s < 10; ++s) {
        sa.step(fa, 1.0, dt);
        sb.step(fb, -1.0, dt);
    }
    const auto expect = mirror(fa);
    double worst = 0.0;
    for (std::size_t c = 0; c < fb.u1_data().size(); ++c)
        worst = std::max(worst, std::abs(fb.u1_data()[c] - expect.u1_data()[c]));
    for (std::size_t c = 0; c < fb.u3_data().size(); ++c)
        worst = std::max(worst, std::abs(fb.u3_data()[c] - expect.u3_data()[c]));
    CHECK(worst < 1e-11);
}

TEST_CASE("energy budget closes to discretization accuracy") {
    const Geometry geom{1.0, 1.0};
    const double nu = 0.1;

    auto run_residual = [&](int n3) {
        const GridSpec g = grid_1d(n3);
        auto f = init_field(geom, g, InitialCondition::couette(1.0));
        // Smooth compatible transient on top of Couette.
        for (int k = 0; k < g.n3; ++k)
            f.u1(0, 0, k) += 0.3 * std::sin(std::numbers::pi * f.z_center(k));
        ChannelStepper stepper(geom, g, nu);
        const double dt = auto_time_step(geom, g, nu, 1.0);  // dt ~ dx^2
        double worst = 0.0;
        auto prev = step_diagnostics(f, nu);
        const int steps = static_cast<int>(0.5 / dt);
        for (int s = 0; s < steps; ++s) {
            stepper.step(f, 1.0, dt);
            const auto cur = step_diagnostics(f, nu);
            const double residual = (cur.kinetic_energy - prev.kinetic_energy) / dt +
                                    nu * 0.5 * (cur.grad_u_sq + prev.grad_u_sq) -
                                    0.5 * (cur.boundary_power + prev.boundary_power);
            worst = std::max(worst, std::abs(residual));
            prev = cur;
        }
        return worst;
    };

    const double scale = nu * 1.0;  // nu U^2/h^2 * |D| sets the power scale
    const double r_coarse = run_residual(32);
    const double r_fine = run_residual(64);
    CHECK(r_coarse < 0.05 * scale);
    // O(dx^2 + dt) with dt ~ dx^2: joint refinement shrinks by ~4x.
    CHECK(r_fine < r_coarse / 2.5);
}

TEST_CASE("projection solves the discrete Poisson problem on anisotropic grids") {
    // Manufactured check: project(grad phi) must recover a gradient field
    // exactly, leaving zero velocity behind.
    const Geometry geom{2.0, 1.0};
    GridSpec grid;
    grid.n1 = 4;
    grid.n2 = 8;
    grid.n3 = 16;
    VelocityField f(geom, grid);
    Rng rng(404);
    std::vector<double> phi(static_cast<std::size_t>(grid.n1) * grid.n2 * grid.n3);
    for (auto& v : phi) v = rng.uniform01() - 0.5;

    const int m1 = grid.n1 - 1, m2 = grid.n2 - 1;
    for (int k = 0; k < grid.n3; ++k)
        for (int j = 0; j < grid.n2; ++j)
            for (int i = 0; i < grid.n1; ++i) {
                const int im = (i - 1) & m1, jm = (j - 1) & m2;
                f.u1(i, j, k) = (phi[f.idx(i, j, k)] - phi[f.idx(im, j, k)]) / f.dx1();
                f.u2(i, j, k) = (phi[f.idx(i, j, k)] - phi[f.idx(i, jm, k)]) / f.dx2();
                if (k >= 1) f.u3(i, j, k) = (phi[f.idx(i, j, k)] - phi[f.idx(i, j, k - 1)]) / f.dx3();
            }

    ChannelStepper stepper(geom, grid, 1.0);
    stepper.project(f);
    double worst = 0.0;
    for (double v : f.u1_data()) worst = std::max(worst, std::abs(v));
    for (double v : f.u2_data()) worst = std::max(worst, std::abs(v));
    for (double v : f.u3_data()) worst = std::max(worst, std::abs(v));
    CHECK(worst < 1e-11);
    CHECK(stepper.max_divergence(f) < 1e-11);
}

TEST_CASE("laminar transient decays at the diffusive rate") {
    // From rest with a steadily moving wall, eps(t) - nu U^2/h^2 decays like
    // the slowest gradient mode, e^{-2 nu pi^2 t / h^2}.
    const Geometry geom{1.0, 1.0};
    const GridSpec grid = grid_1d(32);
    const double nu = 0.1;
    auto f = init_field(geom, grid, InitialCondition::rest());
    ChannelStepper stepper(geom, grid, nu);
    const double dt = auto_time_step(geom, grid, nu, 1.0);

    double t = 0.0;
    std::vector<double> ts, logs;
    const int steps = static_cast<int>(8.0 / dt);
    for (int s = 0; s < steps; ++s) {
        stepper.step(f, 1.0, dt);
        t += dt;
        if (t > 3.0 && t < 6.0) {
            const double excess = dissipation(f, nu) - nu;
            REQUIRE(excess > 0.0);
            ts.push_back(t);
            logs.push_back(std::log(excess));
        }
    }
    // Least-squares slope of log(excess) against t.
    double st = 0.0, sl = 0.0, stt = 0.0, stl = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        st += ts[i];
        sl += logs[i];
        stt += ts[i] * ts[i];
        stl += ts[i] * logs[i];
    }
    const double n = static_cast<double>(ts.size());
    const double slope = (n * stl - st * sl) / (n * stt - st * st);
    const double expected = -2.0 * nu * std::numbers::pi * std::numbers::pi;
    CHECK(slope == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("simulate_trajectory contracts") {
    background::Geometry geom{1.0, 1.0};
    ou::OUParams p{1.0, 1.0, 0.25};
    auto cfg = bounds::FlowConfig::standard(geom, 0.1, p);

    SUBCASE("same seed reproduces the record bit for bit") {
        const GridSpec grid = grid_1d(16);
        SimulateOptions opt;
        const auto a = simulate_trajectory(cfg, grid, 0.5, 2024, opt);
        const auto b = simulate_trajectory(cfg, grid, 0.5, 2024, opt);
        CHECK(a.completed);
        CHECK(a.times == b.times);
        CHECK(a.wall_speed == b.wall_speed);
        CHECK(a.dissipation == b.dissipation);
        CHECK(a.energy == b.energy);
        CHECK(a.brownian_increments == b.brownian_increments);
        CHECK(a.grad_v_sq == b.grad_v_sq);
        const auto c = simulate_trajectory(cfg, grid, 0.5, 2025, opt);
        CHECK(a.wall_speed != c.wall_speed);
    }
    SUBCASE("sigma = 0 long run settles at the laminar dissipation") {
        auto det = cfg;
        det.ou.noise_amplitude = 0.0;
        const GridSpec grid = grid_1d(16);
        SimulateOptions opt;
        opt.wall_initial = ou::PathInitial::fixed(1.0);
        opt.initial = InitialCondition::rest();
        opt.couette_at_wall_speed = false;
        const auto rec = simulate_trajectory(det, grid, 40.0, 1, opt);
        CHECK(rec.completed);
        CHECK(rec.dissipation.back() == doctest::Approx(0.1).epsilon(1e-7));
        // The laminar value sits below the mean bound with room to spare.
        CHECK(rec.mean_dissipation() <= bounds::mean_bound(det));
    }
    SUBCASE("stability rule violations are rejected up front") {
        GridSpec grid = grid_1d(16);
        grid.dt = 10.0;
        CHECK_THROWS_AS(simulate_trajectory(cfg, grid, 0.5, 1, SimulateOptions{}),
                        std::invalid_argument);
    }
    SUBCASE("diffusive instability is reported as a blow-up") {
        GridSpec grid;
        grid.n1 = grid.n2 = grid.n3 = 8;
        grid.cfl_safety = 1.0;
        const double nu = 0.2;
        const double dx = 1.0 / 8.0;
        grid.dt = 0.23 * dx * dx / nu;  // inside the coarse rule, outside RK2 stability
        auto unstable = bounds::FlowConfig::standard(geom, nu, ou::OUParams{1.0, 1.0, 0.0});
        SimulateOptions opt;
        opt.wall_initial = ou::PathInitial::fixed(1.0);
        opt.initial = InitialCondition::perturbed(1.0, 0.05, 7);
        const auto rec = simulate_trajectory(unstable, grid, 40.0, 3, opt);
        CHECK_FALSE(rec.completed);
        CHECK(rec.abort_reason.find("blow-up") != std::string::npos);
    }
}
