// Small statistics toolbox: sample moments with standard errors and
// Kolmogorov-Smirnov distances for distributional checks.

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace shearlab {

struct SampleMoments {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;     // unbiased
    double se_mean = 0.0;      // sqrt(variance / count)
    double second_moment = 0.0;
    double se_second_moment = 0.0;
};

SampleMoments sample_moments(std::span<const double> data);

/// Mean of x^k over the sample together with its standard error.
struct MomentEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};
MomentEstimate sample_power_moment(std::span<const double> data, int k);

/// One-sample KS distance between the empirical law of `data` and the
/// given CDF. Sorts a copy of the data.
double ks_distance(std::span<const double> data, const std::function<double(double)>& cdf);

/// Two-sample KS distance. Sorts copies.
double ks_two_sample_distance(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov p-value Q(sqrt(n_eff) * d).
double ks_pvalue(double d, double n_eff);

}  // namespace shearlab
