#include "shearlab/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace shearlab::bounds {

void FlowConfig::validate() const {
    geometry.validate();
    ou.validate();
    background.validate();
    if (!(nu > 0.0) || !std::isfinite(nu))
        throw std::invalid_argument("FlowConfig: nu must be positive and finite");
    if (!(ou.mean_speed > 0.0))
        throw std::invalid_argument("FlowConfig: mean wall speed U must be positive");
    if (!(reynolds() > 1.0))
        throw std::invalid_argument("FlowConfig: Re = U h / nu must exceed 1");
    background.require_admissible(nu);
}

FlowConfig FlowConfig::standard(const Geometry& geom, double nu, const ou::OUParams& p) {
    FlowConfig cfg;
    cfg.geometry = geom;
    cfg.nu = nu;
    cfg.ou = p;
    cfg.background = BackgroundParams::standard(nu, p.mean_speed, geom);
    return cfg;
}

bool FlowConfig::has_standard_background() const {
    const double u = ou.mean_speed;
    const double rel_a = std::abs(background.a - nu * u) / (nu * u);
    const double rel_b = std::abs(background.b - u * u) / (u * u);
    return rel_a <= 1e-12 && rel_b <= 1e-12;
}

double mean_bound(const FlowConfig& cfg) {
    cfg.validate();
    if (!cfg.has_standard_background()) return mean_bound_general(cfg);
    const double u = cfg.ou.mean_speed;
    const double h = cfg.geometry.height;
    const double theta = cfg.ou.reversion_rate;
    const double s2 = cfg.ou.noise_amplitude * cfg.ou.noise_amplitude;
    const double re = cfg.reynolds();
    return 32.0 * u * u * u / h +
           2.0 *
               (6.0 / re + 28.0 * u / (h * theta) + 12.0 * h * theta / (re * re * u) +
                24.0 * h * s2 / (re * re * u * u * u) + 6.0 * s2 / (h * u * theta * theta)) *
               s2;
}

double mean_bound_general(const FlowConfig& cfg) {
    cfg.validate();
    const double u = cfg.ou.mean_speed;
    const double h = cfg.geometry.height;
    const double theta = cfg.ou.reversion_rate;
    const double s2 = cfg.ou.noise_amplitude * cfg.ou.noise_amplitude;
    const double s = cfg.ou.stationary_variance();  // sigma^2 / (2 theta)
    const double nu = cfg.nu;
    const double a = cfg.background.a;
    const double b = cfg.background.b;
    const double ab = a / b;

    const double m2 = u * u + s;
    const double m4 = u * u * u * u + 6.0 * u * u * s + 3.0 * s * s;

    const double noise_part = (8.0 / h) * (1.5 * ab + (6.0 / nu) * (s2 / b) * ab * ab * ab) * s2;
    const double moment_part = (8.0 / h) * ((2.0 * nu / a) * (m4 + b * m2) +
                                            (6.0 / nu) * ab * ab * ab * s2 * theta / 2.0);
    return noise_part + moment_part;
}

double second_moment_bound(const FlowConfig& cfg) {
    cfg.validate();
    if (!cfg.has_standard_background()) return second_moment_bound_general(cfg);
    const double u = cfg.ou.mean_speed;
    const double h = cfg.geometry.height;
    const double theta = cfg.ou.reversion_rate;
    const double nu = cfg.nu;
    const double s2 = cfg.ou.noise_amplitude * cfg.ou.noise_amplitude;
    const double s = cfg.ou.stationary_variance();

    const double u2 = u * u;
    const double u4 = u2 * u2;
    const double u6 = u4 * u2;
    const double h2 = h * h;

    const double bracket = 1.5 * nu / u + 6.0 * s2 * nu * nu / (u4 * u);
    const double martingale_part =
        (3072.0 / h2) *
        (bracket * bracket * s2 * s2 + 216.0 * (nu * nu * nu * nu / u6) * theta * theta * theta * theta * s * s);

    const double base = 24640.0 * u6 / h2;
    const double noise_moments =
        (12320.0 / (h2 * u2)) * s * (34.0 * u6 + s * (213.0 * u4 + s * (420.0 * u2 + 105.0 * s)));
    return martingale_part + base + noise_moments;
}

double second_moment_bound_general(const FlowConfig& cfg) {
    cfg.validate();
    const double u = cfg.ou.mean_speed;
    const double h = cfg.geometry.height;
    const double theta = cfg.ou.reversion_rate;
    const double nu = cfg.nu;
    const double s2 = cfg.ou.noise_amplitude * cfg.ou.noise_amplitude;
    const double s = cfg.ou.stationary_variance();
    const double a = cfg.background.a;
    const double b = cfg.background.b;
    const double ab = a / b;
    const double h2 = h * h;

    const double u2 = u * u;
    const double m4 = u2 * u2 + 6.0 * u2 * s + 3.0 * s * s;
    const double m8 = u2 * u2 * u2 * u2 + 28.0 * u2 * u2 * u2 * s + 210.0 * u2 * u2 * s * s +
                      420.0 * u2 * s * s * s + 105.0 * s * s * s * s;
    const double m4_centered = 3.0 * s * s;

    const double ab3 = ab * ab * ab;
    const double bracket = 1.5 * ab + (6.0 / nu) * ab3 * s2 / b;
    const double first = (3072.0 / h2) * (bracket * bracket * s2 * s2 +
                                          (72.0 / (nu * nu)) * ab3 * ab3 * theta * theta * theta *
                                              theta * m4_centered);
    const double second = (12320.0 * nu * nu / (h2 * a * a)) * (m8 + b * b * m4);
    return first + second;
}

double large_noise_bound(const FlowConfig& cfg) {
    cfg.ou.validate();
    cfg.geometry.validate();
    if (!(cfg.ou.mean_speed > 0.0))
        throw std::invalid_argument("large_noise_bound: U must be positive");
    const double u = cfg.ou.mean_speed;
    const double h = cfg.geometry.height;
    const double ut2 = cfg.ou.noise_amplitude * cfg.ou.noise_amplitude / cfg.ou.reversion_rate;
    return (u * u * u + u * ut2 + ut2 * ut2 / u) / h;
}

double y_constant_rate(const FlowConfig& cfg) {
    const double l = cfg.geometry.length;
    const double s2 = cfg.ou.noise_amplitude * cfg.ou.noise_amplitude;
    const double ab = cfg.background.a / cfg.background.b;
    return 4.0 * l * l * (1.5 * ab + (6.0 / cfg.nu) * ab * ab * ab * s2 / cfg.background.b) * s2;
}

double y_integrand(double x, const FlowConfig& cfg) {
    const double l = cfg.geometry.length;
    const double ab = cfg.background.a / cfg.background.b;
    const double theta = cfg.ou.reversion_rate;
    const double du = cfg.ou.mean_speed - x;
    const double x2 = x * x;
    // nu x^2 / delta(x) = nu (x^4 + B x^2) / A
    const double grad_phi_term = cfg.nu * (x2 * x2 + cfg.background.b * x2) / cfg.background.a;
    return 4.0 * l * l *
           (grad_phi_term + (6.0 / cfg.nu) * ab * ab * ab * theta * theta * du * du);
}

double expected_Y_rate(const FlowConfig& cfg) {
    cfg.validate();
    const double l = cfg.geometry.length;
    const double s = cfg.ou.stationary_variance();
    const double theta = cfg.ou.reversion_rate;
    const double a = cfg.background.a;
    const double b = cfg.background.b;
    const double ab = a / b;
    const double m2 = ou::stationary_moment(cfg.ou, 2);
    const double m4 = ou::stationary_moment(cfg.ou, 4);
    return y_constant_rate(cfg) +
           4.0 * l * l *
               ((cfg.nu / a) * (m4 + b * m2) + (6.0 / cfg.nu) * ab * ab * ab * theta * theta * s);
}

BoundsReport make_report(const FlowConfig& cfg) {
    cfg.validate();
    BoundsReport r;
    r.reynolds = cfg.reynolds();
    r.mean_bound = mean_bound(cfg);
    r.second_moment_bound = second_moment_bound(cfg);
    r.large_noise_bound = large_noise_bound(cfg);
    const double u = cfg.ou.mean_speed;
    r.kolmogorov_scale_u3_over_h = u * u * u / cfg.geometry.height;
    return r;
}

}  // namespace shearlab::bounds
