#include "shearlab/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shearlab/quadrature.hpp"
#include "shearlab/stats.hpp"

namespace shearlab::diag {

FluctuationField fluctuation(const solver::VelocityField& field, double x_wall,
                             const BackgroundParams& bp) {
    bp.validate();
    if (std::abs(bp.geometry.height - field.geometry().height) > 1e-12 ||
        std::abs(bp.geometry.length - field.geometry().length) > 1e-12)
        throw std::invalid_argument("fluctuation: background and field geometry differ");

    FluctuationField v;
    v.n1 = field.n1();
    v.n2 = field.n2();
    v.n3 = field.n3();
    v.dx1 = field.dx1();
    v.dx2 = field.dx2();
    v.dx3 = field.dx3();
    v.geometry = field.geometry();
    v.wall_speed = x_wall;
    v.layer_height = background::delta(x_wall, bp);
    v.v1.resize(field.u1_data().size());
    v.v2 = field.u2_data();
    v.v3 = field.u3_data();
    for (int k = 0; k < v.n3; ++k) {
        const double phi_k = background::phi(field.z_center(k), x_wall, bp);
        for (int j = 0; j < v.n2; ++j)
            for (int i = 0; i < v.n1; ++i)
                v.v1[v.idx(i, j, k)] = field.u1(i, j, k) - phi_k;
    }
    return v;
}

namespace {

// Column walk over the piecewise-linear reconstruction in x3 with zero
// wall values; fn(za, zb, va, vb) visits every segment.
template <typename F>
void walk_profile(const FluctuationField& v, const std::vector<double>& data, int i, int j, F&& fn) {
    double za = 0.0, va = 0.0;
    for (int seg = 0; seg <= v.n3; ++seg) {
        const double zb = (seg < v.n3) ? v.z_center(seg) : v.geometry.height;
        const double vb = (seg < v.n3) ? data[v.idx(i, j, seg)] : 0.0;
        fn(za, zb, va, vb);
        za = zb;
        va = vb;
    }
}

}  // namespace

double grad_norm_sq(const FluctuationField& v) {
    const int n1 = v.n1, n2 = v.n2, n3 = v.n3;
    const int m1 = n1 - 1, m2 = n2 - 1;
    const double dv = v.dx1 * v.dx2 * v.dx3;
    const double da = v.dx1 * v.dx2;
    double total = 0.0;

    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j) {
            const int jp = (j + 1) & m2, jm = (j - 1) & m2;
            for (int i = 0; i < n1; ++i) {
                const int ip = (i + 1) & m1, im = (i - 1) & m1;
                const double a1 = v.v1[v.idx(i, j, k)];
                const double a2 = v.v2[v.idx(i, j, k)];
                const double d11 = (v.v1[v.idx(ip, j, k)] - a1) / v.dx1;
                const double d12 = (a1 - v.v1[v.idx(i, jm, k)]) / v.dx2;
                const double d21 = (a2 - v.v2[v.idx(im, j, k)]) / v.dx1;
                const double d22 = (v.v2[v.idx(i, jp, k)] - a2) / v.dx2;
                const double d33 = (v.v3[v.idx(i, j, k + 1)] - v.v3[v.idx(i, j, k)]) / v.dx3;
                total += (d11 * d11 + d12 * d12 + d21 * d21 + d22 * d22 + d33 * d33) * dv;
                if (k >= 1) {
                    const double d31 = (v.v3[v.idx(i, j, k)] - v.v3[v.idx(im, j, k)]) / v.dx1;
                    const double d32 = (v.v3[v.idx(i, j, k)] - v.v3[v.idx(i, jm, k)]) / v.dx2;
                    total += (d31 * d31 + d32 * d32) * dv;
                }
            }
        }

    for (int j = 0; j < n2; ++j)
        for (int i = 0; i < n1; ++i) {
            auto add = [&](double za, double zb, double va, double vb) {
                const double s = (vb - va) / (zb - za);
                total += s * s * (zb - za) * da;
            };
            walk_profile(v, v.v1, i, j, add);
            walk_profile(v, v.v2, i, j, add);
        }
    return total;
}

double norm_sq(const FluctuationField& v) {
    const double dv = v.dx1 * v.dx2 * v.dx3;
    const double da = v.dx1 * v.dx2;
    double total = 0.0;
    for (int j = 0; j < v.n2; ++j)
        for (int i = 0; i < v.n1; ++i) {
            auto add = [&](double za, double zb, double va, double vb) {
                total += (va * va + va * vb + vb * vb) / 3.0 * (zb - za) * da;
            };
            walk_profile(v, v.v1, i, j, add);
            walk_profile(v, v.v2, i, j, add);
        }
    for (int k = 1; k < v.n3; ++k)
        for (int j = 0; j < v.n2; ++j)
            for (int i = 0; i < v.n1; ++i) {
                const double a = v.v3[v.idx(i, j, k)];
                total += a * a * dv;
            }
    return total;
}

TraceLemmaResult trace_lemma_check(const FluctuationField& v,
                                   const std::function<double(double)>& g_profile,
                                   const BackgroundParams& bp) {
    bp.validate();
    const double delta_t = v.layer_height;
    const double da = v.dx1 * v.dx2;

    // 4-point Gauss-Legendre nodes on [0, 1].
    static constexpr double kNodes[4] = {0.069431844202973712, 0.330009478207571868,
                                         0.669990521792428132, 0.930568155797026288};
    static constexpr double kWeights[4] = {0.173927422568726929, 0.326072577431273071,
                                           0.326072577431273071, 0.173927422568726929};

    double lhs = 0.0;
    for (int j = 0; j < v.n2; ++j)
        for (int i = 0; i < v.n1; ++i) {
            walk_profile(v, v.v1, i, j, [&](double za, double zb, double va, double vb) {
                const double hi = std::min(zb, delta_t);
                if (hi <= za) return;
                const double len = hi - za;
                const double slope = (vb - va) / (zb - za);
                double acc = 0.0;
                for (int q = 0; q < 4; ++q) {
                    const double z = za + kNodes[q] * len;
                    acc += kWeights[q] * (va + slope * (z - za)) * g_profile(z);
                }
                lhs += acc * len * da;
            });
        }
    lhs = std::abs(lhs);

    const auto g2 = integrate([&](double z) { const double g = g_profile(z); return g * g; }, 0.0,
                              delta_t, 1e-12, 0.0);
    const double rhs =
        std::sqrt(grad_norm_sq(v)) * delta_t * v.geometry.length * std::sqrt(std::max(g2.value, 0.0));
    return {lhs, rhs};
}

InequalityLedger energy_inequality_audit(const solver::TrajectoryRecord& rec,
                                         const bounds::FlowConfig& cfg,
                                         const solver::GridSpec& grid,
                                         const AuditOptions& options) {
    if (rec.times.size() < 2) throw std::invalid_argument("energy_inequality_audit: short record");
    const std::size_t n = rec.times.size() - 1;
    if (rec.brownian_increments.size() != n || rec.grad_v_sq.size() != n + 1 ||
        rec.m_integrand.size() != n + 1 || rec.v_norm_sq.size() != n + 1)
        throw std::invalid_argument(
            "energy_inequality_audit: trajectory lacks per-step Brownian increments / audit series");

    const double sigma = cfg.ou.noise_amplitude;
    const double l = cfg.geometry.length;
    const double ab = cfg.background.a / cfg.background.b;
    const double cap_coeff = 3.0 * sigma * sigma * l * l * ab * ab * ab;

    InequalityLedger led;
    led.steps = n;
    led.v0_sq = rec.v_norm_sq.front();
    led.vT_sq = rec.v_norm_sq.back();

    double grad_v_time_integral = 0.0;
    bool qv_ok = true;
    double y_time = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
        const double dt = rec.times[m + 1] - rec.times[m];
        grad_v_time_integral += rec.grad_v_sq[m] * dt;
        const double s = rec.m_integrand[m];
        led.martingale += s * rec.brownian_increments[m];
        led.martingale_qv += sigma * sigma * s * s * dt;
        // Pathwise cap: sigma^2 S^2 <= cap_coeff ||grad v||^2 up to rounding.
        if (sigma * sigma * s * s >
            cap_coeff * rec.grad_v_sq[m] * (1.0 + 1e-9) + 1e-14 * (1.0 + cap_coeff))
            qv_ok = false;
        y_time += bounds::y_integrand(rec.wall_speed[m], cfg) * dt;
    }
    led.martingale *= sigma;
    led.viscous_integral = cfg.nu * grad_v_time_integral;
    led.qv_cap = cap_coeff * grad_v_time_integral;
    led.qv_cap_pass = qv_ok && (led.martingale_qv <= led.qv_cap * (1.0 + 1e-9) + 1e-12);

    const double t_total = rec.times.back() - rec.times.front();
    led.y_total = bounds::y_constant_rate(cfg) * t_total + y_time;

    const double lhs = led.viscous_integral + 4.0 * led.martingale;
    const double rhs = 2.0 * led.v0_sq - 2.0 * led.vT_sq + led.y_total;
    led.slack = rhs - lhs;

    const double dx_max = std::max({cfg.geometry.length / grid.n1, cfg.geometry.length / grid.n2,
                                    cfg.geometry.height / grid.n3});
    const double dt = rec.dt;
    led.tolerance =
        options.tolerance_constant * (std::sqrt(dt) + dx_max * dx_max) * std::abs(led.y_total);
    led.pass = led.slack >= -led.tolerance;
    return led;
}

ItoResidualResult ito_residual(const ou::OUPath& path, const BackgroundParams& bp,
                               const ou::OUParams& p, double x3) {
    if (path.values.size() < 2) throw std::invalid_argument("ito_residual: path too short");
    if (path.brownian_increments.size() != path.values.size() - 1)
        throw std::invalid_argument("ito_residual: path lacks Brownian increments");
    if (!(x3 >= 0.0)) throw std::invalid_argument("ito_residual: x3 must be nonnegative");

    ItoResidualResult out;
    out.total_steps = path.values.size() - 1;
    const double sigma = p.noise_amplitude;
    for (std::size_t m = 0; m + 1 < path.values.size(); ++m) {
        const double xa = path.values[m];
        const double xb = path.values[m + 1];
        if (x3 > background::delta(xa, bp) || x3 > background::delta(xb, bp)) {
            ++out.skipped_steps;
            continue;
        }
        const double dt = path.times[m + 1] - path.times[m];
        const auto fa = background::f_derivatives(xa, x3, bp);
        const auto fb = background::f_derivatives(xb, x3, bp);
        const double lf = background::generator_Lf(xa, x3, bp, p);
        out.residual += (fb.f - fa.f) - lf * dt - sigma * fa.f_prime * path.brownian_increments[m];
    }
    return out;
}

DissipationStats ensemble_stats(std::span<const solver::TrajectoryRecord> records, double t_end) {
    if (records.size() < 2)
        throw std::invalid_argument("ensemble_stats: need at least 2 independent trajectories");
    DissipationStats stats;
    stats.t_end = t_end;
    for (const auto& rec : records) {
        if (!rec.completed) continue;
        if (std::abs(rec.t_end - t_end) > 1e-9 * std::max(1.0, t_end))
            throw std::invalid_argument("ensemble_stats: mismatched horizons");
        stats.per_trajectory.push_back(rec.mean_dissipation());
    }
    if (stats.per_trajectory.size() < 2)
        throw std::invalid_argument("ensemble_stats: fewer than 2 completed trajectories");
    stats.trajectory_count = stats.per_trajectory.size();

    const SampleMoments m = sample_moments(stats.per_trajectory);
    stats.mean = m.mean;
    stats.se_mean = m.se_mean;
    stats.second_moment = m.second_moment;
    stats.se_second_moment = m.se_second_moment;

    // Jensen: the sample second moment can fall below mean^2 only through
    // floating rounding.
    if (stats.second_moment < stats.mean * stats.mean * (1.0 - 1e-12))
        throw std::logic_error("ensemble_stats: Jensen violation (second moment < mean^2)");
    return stats;
}

}  // namespace shearlab::diag
