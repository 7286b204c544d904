// Closed-form dissipation bounds for the noisy shear flow: the mean
// bound, the explicit second-moment bound (implemented twice over
// independent algebraic routes and cross-checked), the large-noise
// reformulation, and the expected growth rate of the Y_T budget term.

#pragma once

#include "shearlab/background.hpp"
#include "shearlab/ou.hpp"

namespace shearlab::bounds {

using background::BackgroundParams;
using background::Geometry;

struct FlowConfig {
    Geometry geometry;
    double nu = 1.0;  // kinematic viscosity
    ou::OUParams ou;
    BackgroundParams background;

    void validate() const;
    double reynolds() const { return ou.mean_speed * geometry.height / nu; }

    /// Config with the standard background A = nu U, B = U^2.
    static FlowConfig standard(const Geometry& geom, double nu, const ou::OUParams& p);
    bool has_standard_background() const;
};

struct BoundsReport {
    double reynolds = 0.0;
    double mean_bound = 0.0;              // units of U^3/h
    double second_moment_bound = 0.0;     // units of (U^3/h)^2
    double large_noise_bound = 0.0;       // units of U^3/h
    double kolmogorov_scale_u3_over_h = 0.0;
};

/// Mean dissipation bound. For the standard background this is
///   32 U^3/h + 2 (6/Re + 28 U/(h theta) + 12 (h theta)/(Re^2 U)
///              + 24 h sigma^2/(Re^2 U^3) + 6 sigma^2/(h U theta^2)) sigma^2,
/// exact at sigma = 0 (returns 32 U^3/h); other admissible (A, B) go
/// through the pre-substitution chain. Requires Re > 1.
double mean_bound(const FlowConfig& cfg);

/// The pre-substitution route for any admissible (A, B); agrees with
/// mean_bound at the standard background.
double mean_bound_general(const FlowConfig& cfg);

/// Second-moment bound, post-substitution explicit polynomial in sigma
/// with A = nu U, B = U^2; exactly 24640 U^6/h^2 at sigma = 0.
double second_moment_bound(const FlowConfig& cfg);

/// Independent coding of the same bound from the pre-substitution line
/// (general (A, B)); used to cross-check the algebra.
double second_moment_bound_general(const FlowConfig& cfg);

/// Large-noise simplification (U^3 + U Ut^2 + Ut^4/U)/h with Ut = sigma/sqrt(theta).
double large_noise_bound(const FlowConfig& cfg);

/// T-normalized expectation of the budget term Y_T.
double expected_Y_rate(const FlowConfig& cfg);

/// Per-step integrand of the time-dependent part of Y_T at wall speed x:
/// 4 L^2 (nu x^2/delta(x) + (6/nu)(A/B)^3 theta^2 (U - x)^2).
double y_integrand(double x, const FlowConfig& cfg);

/// Constant (rate) part of Y_T: 4 L^2 [(3/2)(A/B) + (6/nu)(A/B)^3 sigma^2/B] sigma^2.
double y_constant_rate(const FlowConfig& cfg);

BoundsReport make_report(const FlowConfig& cfg);

}  // namespace shearlab::bounds
