// Coupled wall-process + channel-flow trajectories. The wall speed is
// advanced by the exact OU transition once per solver step and held
// constant within the step; the Brownian increment driving each transition
// is recorded so the energy-inequality and Ito audits act on the same
// noise that produced the trajectory.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "shearlab/bounds.hpp"
#include "shearlab/solver.hpp"

namespace shearlab::solver {

struct TrajectoryRecord {
    std::vector<double> times;        // n_steps + 1 entries
    std::vector<double> wall_speed;   // X at the record times
    std::vector<double> dissipation;  // instantaneous nu |grad u|^2 / |D|
    std::vector<double> energy;       // kinetic energy 1/2 ||u||^2

    // Audit series; empty unless audits were enabled.
    std::vector<double> brownian_increments;  // n_steps entries, dW over [t_n, t_{n+1}]
    std::vector<double> grad_v_sq;            // |grad(u - Phi)|^2 at record times
    std::vector<double> m_integrand;          // int_{D_delta} v1 f'(X) dx at record times
    std::vector<double> v_norm_sq;            // ||u - Phi||^2 at record times
    std::vector<double> boundary_power;       // wall work rate at record times

    std::uint64_t seed = 0;
    double dt = 0.0;
    double t_end = 0.0;
    bool completed = false;
    std::string abort_reason;

    std::size_t steps() const { return times.empty() ? 0 : times.size() - 1; }

    /// Time average of the dissipation series over [0, T], trapezoidal.
    double mean_dissipation() const;
};

struct SimulateOptions {
    InitialCondition initial = InitialCondition::couette(0.0);
    bool couette_at_wall_speed = true;  // start from the profile matching X_0
    bool record_audit = true;
    ou::PathMode wall_mode = ou::PathMode::ou;
    ou::PathInitial wall_initial = ou::PathInitial::stationary();
    int snapshot_cadence = 0;  // 0 disables snapshots
    std::function<void(const VelocityField&, std::size_t step)> snapshot_sink;
};

/// Simulate one trajectory over [0, t_end]. grid.dt == 0 selects the
/// automatic stable step; an explicit dt violating the stability rule is
/// rejected up front. Blow-up aborts the trajectory and reports the last
/// stable time in abort_reason.
TrajectoryRecord simulate_trajectory(const bounds::FlowConfig& cfg, const GridSpec& grid,
                                     double t_end, std::uint64_t seed,
                                     const SimulateOptions& options = {});

}  // namespace shearlab::solver
