// Stochastic background-flow calculus for the randomly sheared channel.
//
// The background profile carries the moving-wall boundary data inside a
// layer of speed-dependent thickness delta(z) = A/(z^2 + B). Everything
// here is closed form; adaptive quadrature oracles check each expression
// in the tests and in `verify background`.

#pragma once

#include "shearlab/ou.hpp"

namespace shearlab::background {

struct Geometry {
    double length = 1.0;  // horizontal period L
    double height = 1.0;  // wall gap h
    void validate() const;
    double volume() const { return length * length * height; }
};

struct BackgroundParams {
    double a = 1.0;  // numerator of delta, velocity^2 * length
    double b = 1.0;  // shift in delta, velocity^2
    Geometry geometry;

    void validate() const;

    /// Admissible when A/B < h and A <= nu sqrt(B): keeps the layer inside
    /// the channel and the gradient margin in [1/4, 1/2].
    bool admissible(double nu) const;
    void require_admissible(double nu) const;

    /// Default choice A = nu U, B = U^2.
    static BackgroundParams standard(double nu, double mean_speed, const Geometry& geom);

    double max_thickness() const { return a / b; }  // delta(0) = A/B
};

/// Layer thickness delta(z) = A / (z^2 + B).
double delta(double z, const BackgroundParams& bp);

/// d delta / dz and d^2 delta / dz^2.
double delta_prime(double z, const BackgroundParams& bp);
double delta_double_prime(double z, const BackgroundParams& bp);

/// Profile phi(x3, z) = (1 - x3/delta(z)) z inside the layer, 0 above.
/// Requires 0 <= x3 <= h.
double phi(double x3, double z, const BackgroundParams& bp);

/// f(z) = (1 - x3/delta(z)) z and its z-derivatives at fixed height x3.
/// Only defined inside the layer: throws if x3 > delta(z).
struct ProfileDerivatives {
    double f;
    double f_prime;        // 1 - x3 (3 z^2 + B)/A
    double f_double_prime; // -6 x3 z / A
};
ProfileDerivatives f_derivatives(double z, double x3, const BackgroundParams& bp);

/// Generator of the wall process applied to f:
/// Lf = f'(z) theta (U - z) + (sigma^2/2) f''(z).
double generator_Lf(double z, double x3, const BackgroundParams& bp, const ou::OUParams& p);

/// Closed form of int_0^delta (f'(z))^2 dx3; always <= 3 A/B.
double int_fprime_sq(double z, const BackgroundParams& bp);

/// || grad Phi ||^2 over the channel: L^2 z^2 / delta(z) = L^2 (z^4 + B z^2)/A.
double grad_phi_norm_sq(double z, const BackgroundParams& bp);

/// Gradient-absorption margin 1/2 - delta(z)|z|/(2 nu); lies in [1/4, 1/2]
/// for every real z whenever A <= nu sqrt(B).
double delta_inequality_margin(double z, const BackgroundParams& bp, double nu);

/// Pointwise cap of int_0^delta |Lf|^2 dx3:
/// 6 (A/B) theta^2 (U-z)^2 + 6 sigma^4 A / B^2.
double int_Lf_sq_cap(double z, const BackgroundParams& bp, const ou::OUParams& p);

}  // namespace shearlab::background
