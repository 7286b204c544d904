#include "shearlab/background.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace shearlab::background {

void Geometry::validate() const {
    if (!(length > 0.0) || !(height > 0.0) || !std::isfinite(length) || !std::isfinite(height))
        throw std::invalid_argument("Geometry: L and h must be positive and finite");
}

void BackgroundParams::validate() const {
    geometry.validate();
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw std::invalid_argument("BackgroundParams: A and B must be positive and finite");
}

bool BackgroundParams::admissible(double nu) const {
    validate();
    if (!(nu > 0.0)) return false;
    return (a / b < geometry.height) && (a <= nu * std::sqrt(b));
}

void BackgroundParams::require_admissible(double nu) const {
    if (!admissible(nu))
        throw std::invalid_argument(
            "BackgroundParams: need A/B < h and A <= nu sqrt(B) (layer admissibility)");
}

BackgroundParams BackgroundParams::standard(double nu, double mean_speed, const Geometry& geom) {
    if (!(nu > 0.0)) throw std::invalid_argument("BackgroundParams: nu must be positive");
    if (!(mean_speed > 0.0))
        throw std::invalid_argument("BackgroundParams: mean wall speed must be positive");
    BackgroundParams bp;
    bp.a = nu * mean_speed;
    bp.b = mean_speed * mean_speed;
    bp.geometry = geom;
    return bp;
}

double delta(double z, const BackgroundParams& bp) {
    bp.validate();
    return bp.a / (z * z + bp.b);
}

double delta_prime(double z, const BackgroundParams& bp) {
    bp.validate();
    const double q = z * z + bp.b;
    return -2.0 * bp.a * z / (q * q);
}

double delta_double_prime(double z, const BackgroundParams& bp) {
    bp.validate();
    const double q = z * z + bp.b;
    return 2.0 * bp.a * (3.0 * z * z - bp.b) / (q * q * q);
}

double phi(double x3, double z, const BackgroundParams& bp) {
    bp.validate();
    if (x3 < 0.0 || x3 > bp.geometry.height || !std::isfinite(x3))
        throw std::invalid_argument("phi: x3 outside [0, h]");
    const double d = delta(z, bp);
    if (x3 >= d) return 0.0;
    return (1.0 - x3 / d) * z;
}

ProfileDerivatives f_derivatives(double z, double x3, const BackgroundParams& bp) {
    bp.validate();
    const double d = delta(z, bp);
    if (!(x3 >= 0.0) || x3 > d)
        throw std::invalid_argument("f_derivatives: x3 must lie in [0, delta(z)]");
    ProfileDerivatives out;
    out.f = (1.0 - x3 / d) * z;
    out.f_prime = 1.0 - x3 * (3.0 * z * z + bp.b) / bp.a;
    out.f_double_prime = -6.0 * x3 * z / bp.a;
    return out;
}

double generator_Lf(double z, double x3, const BackgroundParams& bp, const ou::OUParams& p) {
    p.validate();
    const ProfileDerivatives d = f_derivatives(z, x3, bp);
    const double sigma2 = p.noise_amplitude * p.noise_amplitude;
    return d.f_prime * p.reversion_rate * (p.mean_speed - z) + 0.5 * sigma2 * d.f_double_prime;
}

double int_fprime_sq(double z, const BackgroundParams& bp) {
    bp.validate();
    const double d = delta(z, bp);
    const double q = (3.0 * z * z + bp.b) / bp.a;
    return d - d * d * q + d * d * d * q * q / 3.0;
}

double grad_phi_norm_sq(double z, const BackgroundParams& bp) {
    bp.validate();
    const double l = bp.geometry.length;
    return l * l * (z * z * z * z + bp.b * z * z) / bp.a;
}

double delta_inequality_margin(double z, const BackgroundParams& bp, double nu) {
    bp.validate();
    if (!(nu > 0.0)) throw std::invalid_argument("delta_inequality_margin: nu must be positive");
    return 0.5 - delta(z, bp) * std::abs(z) / (2.0 * nu);
}

double int_Lf_sq_cap(double z, const BackgroundParams& bp, const ou::OUParams& p) {
    bp.validate();
    p.validate();
    const double ab = bp.a / bp.b;
    const double theta = p.reversion_rate;
    const double du = p.mean_speed - z;
    const double sigma2 = p.noise_amplitude * p.noise_amplitude;
    return 6.0 * ab * theta * theta * du * du + 6.0 * sigma2 * sigma2 * bp.a / (bp.b * bp.b);
}

}  // namespace shearlab::background
