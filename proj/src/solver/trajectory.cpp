#include "shearlab/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace shearlab::solver {

double TrajectoryRecord::mean_dissipation() const {
    if (times.size() < 2) throw std::invalid_argument("mean_dissipation: record too short");
    double acc = 0.0;
    for (std::size_t n = 1; n < times.size(); ++n)
        acc += 0.5 * (dissipation[n - 1] + dissipation[n]) * (times[n] - times[n - 1]);
    return acc / (times.back() - times.front());
}

TrajectoryRecord simulate_trajectory(const bounds::FlowConfig& cfg, const GridSpec& grid,
                                     double t_end, std::uint64_t seed,
                                     const SimulateOptions& options) {
    cfg.validate();
    grid.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("simulate_trajectory: t_end must be positive");

    // Velocity scale for the up-front stability check: mean wall speed plus
    // five stationary standard deviations (wiener mode grows like sqrt(T)).
    double u_ref = std::abs(cfg.ou.mean_speed) + 5.0 * std::sqrt(cfg.ou.stationary_variance());
    if (options.wall_mode == ou::PathMode::wiener)
        u_ref = std::abs(options.wall_initial.value) +
                5.0 * cfg.ou.noise_amplitude * std::sqrt(t_end) + 1e-12;

    double dt = grid.dt;
    if (dt == 0.0) dt = auto_time_step(cfg.geometry, grid, cfg.nu, u_ref);
    const double limit = stability_limit(cfg.geometry, grid, cfg.nu, u_ref);
    if (dt > limit * (1.0 + 1e-12))
        throw std::invalid_argument("simulate_trajectory: dt violates the stability rule");

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
    dt = t_end / static_cast<double>(n_steps);

    Rng rng(seed);
    double x = 0.0;
    switch (options.wall_initial.kind) {
        case ou::PathInitial::Kind::stationary:
            if (options.wall_mode == ou::PathMode::wiener)
                throw std::invalid_argument("simulate_trajectory: wiener mode needs a fixed initial");
            x = ou::stationary_sample(cfg.ou, rng);
            break;
        case ou::PathInitial::Kind::fixed:
            x = options.wall_initial.value;
            break;
    }

    InitialCondition init = options.initial;
    if (options.couette_at_wall_speed &&
        (init.kind == InitialCondition::Kind::couette ||
         init.kind == InitialCondition::Kind::perturbed))
        init.couette_speed = x;

    VelocityField field = init_field(cfg.geometry, grid, init);
    field.wall_speed = x;

    ChannelStepper stepper(cfg.geometry, grid, cfg.nu);
    const ou::ExactStepper wall_stepper(cfg.ou, dt, options.wall_mode);
    const BackgroundParams* bp = options.record_audit ? &cfg.background : nullptr;

    TrajectoryRecord rec;
    rec.seed = seed;
    rec.dt = dt;
    rec.t_end = t_end;
    rec.times.reserve(n_steps + 1);
    rec.wall_speed.reserve(n_steps + 1);
    rec.dissipation.reserve(n_steps + 1);
    rec.energy.reserve(n_steps + 1);
    if (options.record_audit) {
        rec.brownian_increments.reserve(n_steps);
        rec.grad_v_sq.reserve(n_steps + 1);
        rec.m_integrand.reserve(n_steps + 1);
        rec.v_norm_sq.reserve(n_steps + 1);
        rec.boundary_power.reserve(n_steps + 1);
    }

    const double volume = cfg.geometry.volume();
    auto record_state = [&](double t) {
        const StepDiagnostics d = step_diagnostics(field, cfg.nu, bp);
        rec.times.push_back(t);
        rec.wall_speed.push_back(field.wall_speed);
        rec.dissipation.push_back(cfg.nu * d.grad_u_sq / volume);
        rec.energy.push_back(d.kinetic_energy);
        if (options.record_audit) {
            rec.grad_v_sq.push_back(d.grad_v_sq);
            rec.m_integrand.push_back(d.m_integrand);
            rec.v_norm_sq.push_back(d.v_norm_sq);
            rec.boundary_power.push_back(d.boundary_power);
        }
        return d.kinetic_energy;
    };

    record_state(0.0);
    if (options.snapshot_cadence > 0 && options.snapshot_sink) options.snapshot_sink(field, 0);

    for (std::size_t n = 0; n < n_steps; ++n) {
        stepper.step(field, x, dt);
        const ou::StepSample s = wall_stepper.step(x, rng);
        x = s.x_next;
        field.wall_speed = x;
        if (options.record_audit) rec.brownian_increments.push_back(s.dw);

        const double e = record_state(static_cast<double>(n + 1) * dt);
        if (!std::isfinite(e)) {
            rec.completed = false;
            rec.abort_reason = "blow-up: non-finite energy at t = " +
                               std::to_string(static_cast<double>(n + 1) * dt);
            return rec;
        }
        if (options.snapshot_cadence > 0 && options.snapshot_sink &&
            (n + 1) % static_cast<std::size_t>(options.snapshot_cadence) == 0)
            options.snapshot_sink(field, n + 1);
    }

    rec.completed = true;
    return rec;
}

}  // namespace shearlab::solver
