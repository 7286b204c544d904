// Pathwise and ensemble verification of the energy-inequality machinery on
// simulated data: the fluctuation field v = u - Phi, the almost-sure energy
// inequality, the martingale term and its quadratic-variation cap, the
// layer trace inequality, the pathwise Ito identity, and ensemble
// dissipation statistics.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "shearlab/bounds.hpp"
#include "shearlab/trajectory.hpp"

namespace shearlab::diag {

using background::BackgroundParams;
using background::Geometry;

/// v = u - Phi on the staggered grid; vanishes on both walls.
struct FluctuationField {
    int n1 = 0, n2 = 0, n3 = 0;
    double dx1 = 0.0, dx2 = 0.0, dx3 = 0.0;
    Geometry geometry;
    std::vector<double> v1, v2, v3;  // staggering matches VelocityField
    double wall_speed = 0.0;
    double layer_height = 0.0;  // delta(x_wall)

    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n2 + j) * n1 + i;
    }
    double z_center(int k) const { return (k + 0.5) * dx3; }
};

FluctuationField fluctuation(const solver::VelocityField& field, double x_wall,
                             const BackgroundParams& bp);

/// ||grad v||^2 with the piecewise-linear wall reconstruction for the
/// x3-derivatives of the tangential components (zero wall values).
double grad_norm_sq(const FluctuationField& v);

/// ||v||^2 with the same reconstruction for v1 and v2.
double norm_sq(const FluctuationField& v);

/// Both sides of the layer trace inequality
///   |int_{D_delta} v1 G dx| <= ||grad v|| delta L (int_0^delta G^2 dx3)^{1/2}.
struct TraceLemmaResult {
    double lhs = 0.0;
    double rhs = 0.0;
};
TraceLemmaResult trace_lemma_check(const FluctuationField& v,
                                   const std::function<double(double)>& g_profile,
                                   const BackgroundParams& bp);

struct AuditOptions {
    double tolerance_constant = 1.0;  // C in C (sqrt(dt) + dx^2) scale(Y_T)
};

/// Per-trajectory ledger of the almost-sure energy inequality
///   int_0^T nu ||grad v||^2 dt + 4 M_T <= 2||v(0)||^2 - 2||v(T)||^2 + Y_T
/// discretized with left-endpoint (Ito) sums against the recorded
/// Brownian increments.
struct InequalityLedger {
    double viscous_integral = 0.0;  // int nu ||grad v||^2 dt
    double v0_sq = 0.0;             // ||v(0)||^2
    double vT_sq = 0.0;             // ||v(T)||^2
    double y_total = 0.0;           // Y_T
    double martingale = 0.0;        // M_T
    double martingale_qv = 0.0;     // sum sigma^2 S_n^2 dt
    double qv_cap = 0.0;            // 3 sigma^2 L^2 (A/B)^3 int ||grad v||^2 dt
    double slack = 0.0;             // RHS - LHS
    double tolerance = 0.0;
    bool pass = false;
    bool qv_cap_pass = false;
    std::size_t steps = 0;
};

InequalityLedger energy_inequality_audit(const solver::TrajectoryRecord& rec,
                                         const bounds::FlowConfig& cfg,
                                         const solver::GridSpec& grid,
                                         const AuditOptions& options = {});

/// Residual of the pathwise Ito identity for f(X_t) at height x3:
///   f(X_T) - f(X_0) - sum Lf(X_n) dt - sigma sum f'(X_n) dW_n,
/// summed per step so steps where x3 leaves the layer can be skipped.
struct ItoResidualResult {
    double residual = 0.0;
    std::size_t skipped_steps = 0;
    std::size_t total_steps = 0;
};
ItoResidualResult ito_residual(const ou::OUPath& path, const BackgroundParams& bp,
                               const ou::OUParams& p, double x3);

/// Ensemble statistics of the time-averaged dissipation <eps>_T.
struct DissipationStats {
    std::size_t trajectory_count = 0;
    double t_end = 0.0;
    double mean = 0.0;
    double se_mean = 0.0;
    double second_moment = 0.0;
    double se_second_moment = 0.0;
    std::vector<double> per_trajectory;  // <eps>_T per trajectory
};

DissipationStats ensemble_stats(std::span<const solver::TrajectoryRecord> records, double t_end);

}  // namespace shearlab::diag
