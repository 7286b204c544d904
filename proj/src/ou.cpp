#include "shearlab/ou.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "shearlab/quadrature.hpp"

namespace shearlab::ou {

void OUParams::validate() const {
    if (!std::isfinite(mean_speed) || !std::isfinite(reversion_rate) || !std::isfinite(noise_amplitude))
        throw std::invalid_argument("OUParams: parameters must be finite");
    if (reversion_rate <= 0.0)
        throw std::invalid_argument("OUParams: reversion_rate must be positive");
    if (noise_amplitude < 0.0)
        throw std::invalid_argument("OUParams: noise_amplitude must be nonnegative");
}

namespace {

// Conditional variance of the transition noise I = int e^{-theta(dt-s)} dW
// given the plain increment dW, divided by sigma^2:
//   Var(I) - Cov(I,dW)^2/dt = dt (1-E) g(a) / (2 a^2),  a = theta dt, E = e^{-a},
// with g(a) = 2a + (a+2) expm1(-a) = a^3/6 - a^4/12 + ... The direct form
// cancels catastrophically for small a, so a series takes over there.
double conditional_variance_factor(double theta, double dt) {
    const double a = theta * dt;
    if (a == 0.0) return 0.0;
    const double one_minus_e = -std::expm1(-a);
    double g;
    if (a < 0.05) {
        // g = (a^3/6)(1 - a/2 + 3a^2/20 - a^3/30 + a^4/168 - a^5/1120)
        const double bracket =
            1.0 + a * (-0.5 + a * (0.15 + a * (-1.0 / 30.0 + a * (1.0 / 168.0 - a / 1120.0))));
        g = (a * a * a / 6.0) * bracket;
    } else {
        g = 2.0 * a + (a + 2.0) * std::expm1(-a);
    }
    return dt * one_minus_e * g / (2.0 * a * a);
}

double marginal_variance_factor(double theta, double dt) {
    // (1 - e^{-2 theta dt}) / (2 theta)
    return -std::expm1(-2.0 * theta * dt) / (2.0 * theta);
}

}  // namespace

double exact_step(double x, double dt, const OUParams& p, double xi) {
    p.validate();
    if (!std::isfinite(x) || !std::isfinite(dt) || !std::isfinite(xi))
        throw std::invalid_argument("exact_step: non-finite input");
    if (dt < 0.0) throw std::invalid_argument("exact_step: dt must be nonnegative");
    if (dt == 0.0) return x;
    const double decay = std::exp(-p.reversion_rate * dt);
    const double noise_std = p.noise_amplitude * std::sqrt(marginal_variance_factor(p.reversion_rate, dt));
    return p.mean_speed + (x - p.mean_speed) * decay + noise_std * xi;
}

ExactStepper::ExactStepper(const OUParams& p, double dt, PathMode mode)
    : dt_(dt), mode_(mode), sigma_(p.noise_amplitude), mean_speed_(p.mean_speed) {
    if (mode_ == PathMode::ou) p.validate();
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("ExactStepper: dt must be positive");
    sqrt_dt_ = std::sqrt(dt);
    if (mode_ == PathMode::ou) {
        const double theta = p.reversion_rate;
        decay_ = std::exp(-theta * dt);
        const double cov = -std::expm1(-theta * dt) / theta;  // Cov(I, dW)
        dw_coeff_ = cov / dt;
        cond_std_ = std::sqrt(conditional_variance_factor(theta, dt));
    } else {
        decay_ = 1.0;
        dw_coeff_ = 1.0;
        cond_std_ = 0.0;
    }
}

StepSample ExactStepper::step(double x, Rng& rng) const {
    const auto [xi1, xi2] = rng.normal_pair();
    const double dw = sqrt_dt_ * xi1;
    if (mode_ == PathMode::wiener) {
        return {x + sigma_ * dw, dw};
    }
    const double transition_noise = dw_coeff_ * dw + cond_std_ * xi2;
    return {mean_speed_ + (x - mean_speed_) * decay_ + sigma_ * transition_noise, dw};
}

double stationary_sample(const OUParams& p, Rng& rng) {
    p.validate();
    if (p.noise_amplitude == 0.0) return p.mean_speed;
    return p.mean_speed + std::sqrt(p.stationary_variance()) * rng.normal();
}

OUPath sample_path(const OUParams& p, std::span<const double> times, std::uint64_t seed,
                   const PathInitial& initial, PathMode mode) {
    if (times.empty()) throw std::invalid_argument("sample_path: empty time grid");
    if (times.front() != 0.0) throw std::invalid_argument("sample_path: time grid must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("sample_path: times must be strictly increasing");
    if (mode == PathMode::wiener && initial.kind == PathInitial::Kind::stationary)
        throw std::invalid_argument("sample_path: wiener mode has no stationary initial law");

    Rng rng(seed);
    OUPath path;
    path.seed = seed;
    path.times.assign(times.begin(), times.end());
    path.values.reserve(times.size());
    path.brownian_increments.reserve(times.size() - 1);

    double x = (initial.kind == PathInitial::Kind::stationary) ? stationary_sample(p, rng)
                                                               : initial.value;
    if (!std::isfinite(x)) throw std::invalid_argument("sample_path: non-finite initial value");
    path.values.push_back(x);

    double last_dt = -1.0;
    ExactStepper stepper(p, times.size() > 1 ? times[1] - times[0] : 1.0, mode);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double dt = times[i] - times[i - 1];
        if (dt != last_dt) {
            stepper = ExactStepper(p, dt, mode);
            last_dt = dt;
        }
        const StepSample s = stepper.step(x, rng);
        x = s.x_next;
        path.values.push_back(x);
        path.brownian_increments.push_back(s.dw);
    }
    return path;
}

OUPath sample_path_uniform(const OUParams& p, double t_end, double dt, std::uint64_t seed,
                           const PathInitial& initial, PathMode mode) {
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("sample_path_uniform: t_end and dt must be positive");
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    if (n == 0) throw std::invalid_argument("sample_path_uniform: t_end shorter than dt");
    std::vector<double> times(n + 1);
    for (std::size_t i = 0; i <= n; ++i) times[i] = static_cast<double>(i) * dt;
    return sample_path(p, times, seed, initial, mode);
}

namespace {

double double_factorial_odd(int j) {
    // (j-1)!! for even j; exact in double for the ranges used here
    double r = 1.0;
    for (int m = j - 1; m > 1; m -= 2) r *= static_cast<double>(m);
    return r;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return std::round(r);
}

}  // namespace

double stationary_moment(const OUParams& p, int k) {
    p.validate();
    if (k < 1) throw std::invalid_argument("stationary_moment: k must be >= 1");
    const double s = p.stationary_variance();
    const double u = p.mean_speed;
    double total = 0.0;
    for (int j = 0; j <= k; j += 2) {
        const double coeff = binomial(k, j) * double_factorial_odd(j);
        total += coeff * std::pow(u, k - j) * std::pow(s, j / 2);
    }
    return total;
}

double stationary_central_moment(const OUParams& p, int k) {
    p.validate();
    if (k < 1) throw std::invalid_argument("stationary_central_moment: k must be >= 1");
    if (k % 2 == 1) return 0.0;
    return double_factorial_odd(k) * std::pow(p.stationary_variance(), k / 2);
}

double quadratic_variation(const OUPath& path) {
    if (path.values.size() < 2)
        throw std::invalid_argument("quadratic_variation: path needs at least 2 points");
    double sum = 0.0;
    for (std::size_t i = 1; i < path.values.size(); ++i) {
        const double d = path.values[i] - path.values[i - 1];
        sum += d * d;
    }
    return sum;
}

GradientSystem GradientSystem::quadratic(const OUParams& p, double half_widths) {
    p.validate();
    const double std_dev = std::sqrt(std::max(p.stationary_variance(), 1e-30));
    GradientSystem g;
    const double theta = p.reversion_rate;
    const double u = p.mean_speed;
    g.potential = [theta, u](double x) { return 0.5 * theta * (x - u) * (x - u); };
    g.gradient = [theta, u](double x) { return theta * (x - u); };
    g.noise_amplitude = p.noise_amplitude;
    g.window_lo = u - half_widths * std_dev;
    g.window_hi = u + half_widths * std_dev;
    return g;
}

GradientSystem GradientSystem::double_well(double sigma, double window) {
    GradientSystem g;
    g.potential = [](double x) {
        const double q = x * x - 1.0;
        return q * q;
    };
    g.gradient = [](double x) { return 4.0 * x * (x * x - 1.0); };
    g.noise_amplitude = sigma;
    g.window_lo = -window;
    g.window_hi = window;
    return g;
}

namespace {

// Gibbs density exp(-2 h / sigma^2), unnormalized.
std::function<double(double)> gibbs_weight(const GradientSystem& g) {
    const double inv = 2.0 / (g.noise_amplitude * g.noise_amplitude);
    auto h = g.potential;
    return [h, inv](double x) { return std::exp(-inv * h(x)); };
}

}  // namespace

double gibbs_variance(const GradientSystem& g) {
    auto w = gibbs_weight(g);
    const auto z = integrate(w, g.window_lo, g.window_hi, 1e-10);
    if (!z.converged || z.value <= 0.0)
        throw std::runtime_error("gibbs_variance: normalizing constant quadrature failed");
    const auto m1 = integrate([&](double x) { return x * w(x); }, g.window_lo, g.window_hi, 1e-10);
    const double mean = m1.value / z.value;
    const auto m2 = integrate([&](double x) { return (x - mean) * (x - mean) * w(x); },
                              g.window_lo, g.window_hi, 1e-10);
    return m2.value / z.value;
}

GibbsCheckResult gibbs_longrun_check(const GradientSystem& g, double t_end, double dt,
                                     std::uint64_t seed, int bins) {
    if (!(t_end > 0.0) || !(dt > 0.0) || bins < 8)
        throw std::invalid_argument("gibbs_longrun_check: bad t_end/dt/bins");
    if (!(g.noise_amplitude > 0.0))
        throw std::invalid_argument("gibbs_longrun_check: noise amplitude must be positive");
    if (!(g.window_hi > g.window_lo))
        throw std::invalid_argument("gibbs_longrun_check: empty window");

    auto w = gibbs_weight(g);
    const auto z = integrate(w, g.window_lo, g.window_hi, 1e-10);
    if (!z.converged || !(z.value > 0.0) || !std::isfinite(z.value))
        throw std::runtime_error("gibbs_longrun_check: quadrature for Z did not converge");

    GibbsCheckResult result;
    result.normalizing_constant = z.value;
    result.occupation.lo = g.window_lo;
    result.occupation.hi = g.window_hi;
    result.occupation.counts.assign(static_cast<std::size_t>(bins), 0);

    // Gibbs CDF at every bin edge, one panel per bin (density is smooth).
    std::vector<double> cdf(static_cast<std::size_t>(bins) + 1, 0.0);
    const double width = (g.window_hi - g.window_lo) / bins;
    double acc = 0.0;
    for (int b = 0; b < bins; ++b) {
        const double a = g.window_lo + b * width;
        acc += integrate(w, a, a + width, 1e-12, 0.0, 4).value;
        cdf[static_cast<std::size_t>(b) + 1] = acc / z.value;
    }

    const auto n_steps = static_cast<std::uint64_t>(std::llround(t_end / dt));
    Rng rng(seed);
    double x = 0.5 * (g.window_lo + g.window_hi);
    const double noise = g.noise_amplitude * std::sqrt(dt);
    auto grad = g.gradient;
    for (std::uint64_t i = 0; i < n_steps; ++i) {
        x += -grad(x) * dt + noise * rng.normal();
        if (!std::isfinite(x))
            throw std::runtime_error("gibbs_longrun_check: Euler-Maruyama diverged (reduce dt)");
        if (x < g.window_lo || x >= g.window_hi) {
            ++result.occupation.out_of_range;
        } else {
            const auto b = static_cast<std::size_t>((x - g.window_lo) / width);
            ++result.occupation.counts[std::min(b, static_cast<std::size_t>(bins - 1))];
        }
        ++result.occupation.total;
    }

    // KS distance evaluated at bin edges of the occupation histogram.
    double d = 0.0;
    std::uint64_t cum = 0;
    const double n = static_cast<double>(result.occupation.total);
    for (int b = 0; b < bins; ++b) {
        cum += result.occupation.counts[static_cast<std::size_t>(b)];
        const double emp = static_cast<double>(cum) / n;
        d = std::max(d, std::abs(emp - cdf[static_cast<std::size_t>(b) + 1]));
    }
    result.ks_distance = d;
    return result;
}

}  // namespace shearlab::ou
