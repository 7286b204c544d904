// Adaptive numerical quadrature used as the independent oracle for every
// closed-form integral in the background-flow calculus, and at runtime for
// Gibbs-measure normalization.

#pragma once

#include <functional>

namespace shearlab {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Adaptive Gauss-Kronrod (G7,K15) integration of f over [a, b].
///
/// Bisects intervals until the Kronrod error estimate meets
/// max(abs_tol, rel_tol * |integral|) or max_intervals is exhausted.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-12, double abs_tol = 0.0,
                           int max_intervals = 2000);

}  // namespace shearlab
