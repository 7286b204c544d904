// Ornstein-Uhlenbeck wall-speed process: exact transition sampling,
// closed-form stationary moments, quadratic variation, and the 1D
// gradient-SDE / Gibbs-measure long-run check.
//
// Paths are advanced with the exact Gaussian transition (no time
// discretization bias). Each step also records the Brownian increment that
// drove it, sampled jointly with the exact conditional law, so pathwise
// Ito-sum audits downstream act on the true driving noise.

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "shearlab/rng.hpp"

namespace shearlab::ou {

struct OUParams {
    double mean_speed = 0.0;      // U
    double reversion_rate = 1.0;  // theta > 0
    double noise_amplitude = 0.0; // sigma >= 0

    void validate() const;
    /// Stationary variance sigma^2 / (2 theta).
    double stationary_variance() const {
        return noise_amplitude * noise_amplitude / (2.0 * reversion_rate);
    }
};

enum class PathMode {
    ou,      // mean-reverting process at exact transition law
    wiener   // dX = sigma dW; theta and U play no role
};

struct PathInitial {
    enum class Kind { stationary, fixed };
    Kind kind = Kind::stationary;
    double value = 0.0;

    static PathInitial stationary() { return {Kind::stationary, 0.0}; }
    static PathInitial fixed(double x0) { return {Kind::fixed, x0}; }
};

struct OUPath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> brownian_increments;  // size values.size() - 1
    std::uint64_t seed = 0;
};

/// Exact conditional draw of X_{t+dt} given X_t = x, using one standard
/// normal: x' = U + (x-U) e^{-theta dt} + sigma sqrt((1-e^{-2 theta dt})/(2 theta)) xi.
double exact_step(double x, double dt, const OUParams& p, double xi);

/// One exact transition together with the Brownian increment over the step.
struct StepSample {
    double x_next;
    double dw;
};

/// Precomputed coefficients of the exact transition over a fixed step.
/// step() draws (dW, X_next) from their exact joint law.
class ExactStepper {
public:
    ExactStepper(const OUParams& p, double dt, PathMode mode = PathMode::ou);
    StepSample step(double x, Rng& rng) const;
    double dt() const { return dt_; }

private:
    double dt_;
    PathMode mode_;
    double sigma_;
    double mean_speed_;
    double decay_;      // e^{-theta dt}
    double dw_coeff_;   // E[I | dW] = dw_coeff * dW
    double cond_std_;   // std of I given dW
    double sqrt_dt_;
};

/// Draw from the stationary law N(U, sigma^2/(2 theta)).
double stationary_sample(const OUParams& p, Rng& rng);

OUPath sample_path(const OUParams& p, std::span<const double> times, std::uint64_t seed,
                   const PathInitial& initial, PathMode mode = PathMode::ou);

/// Uniform grid convenience: times 0, dt, ..., n*dt with n = round(t_end/dt).
OUPath sample_path_uniform(const OUParams& p, double t_end, double dt, std::uint64_t seed,
                           const PathInitial& initial, PathMode mode = PathMode::ou);

/// Raw stationary moment E[X^k], exact Gaussian moment algebra with
/// integer binomial/double-factorial coefficients.
double stationary_moment(const OUParams& p, int k);

/// Centered stationary moment E[(U - X)^k]: zero for odd k,
/// (k-1)!! (sigma^2/(2 theta))^{k/2} for even k.
double stationary_central_moment(const OUParams& p, int k);

/// Sum of squared increments along a sampled path.
double quadratic_variation(const OUPath& path);

/// 1D gradient SDE dX = -h'(X) dt + sigma dW with its Gibbs invariant
/// density exp(-2 h(x)/sigma^2)/Z on a configured window.
struct GradientSystem {
    std::function<double(double)> potential;  // h
    std::function<double(double)> gradient;   // h'
    double noise_amplitude = 1.0;
    double window_lo = -10.0;   // quadrature + histogram support
    double window_hi = 10.0;

    static GradientSystem quadratic(const OUParams& p, double half_widths = 8.0);
    static GradientSystem double_well(double sigma, double window = 3.0);
};

struct Histogram {
    double lo = 0.0;
    double hi = 0.0;
    std::vector<std::uint64_t> counts;
    std::uint64_t total = 0;
    std::uint64_t out_of_range = 0;
};

struct GibbsCheckResult {
    double ks_distance = 0.0;
    double normalizing_constant = 0.0;
    Histogram occupation;
};

/// Euler-Maruyama integration over [0, T]; returns the KS distance between
/// the time-occupation law and the Gibbs CDF (numeric quadrature).
/// Throws std::runtime_error if the quadrature for Z fails to converge.
GibbsCheckResult gibbs_longrun_check(const GradientSystem& g, double t_end, double dt,
                                     std::uint64_t seed, int bins = 4096);

/// Variance of the Gibbs measure itself, by quadrature over the window.
double gibbs_variance(const GradientSystem& g);

}  // namespace shearlab::ou
