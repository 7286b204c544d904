#include "shearlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shearlab {

SampleMoments sample_moments(std::span<const double> data) {
    if (data.size() < 2) throw std::invalid_argument("sample_moments: need at least 2 samples");
    SampleMoments m;
    m.count = data.size();
    const double n = static_cast<double>(data.size());

    double sum = 0.0;
    for (double x : data) sum += x;
    m.mean = sum / n;

    double ss = 0.0;      // centered sum of squares
    double sq_sum = 0.0;  // raw sum of squares
    for (double x : data) {
        const double d = x - m.mean;
        ss += d * d;
        sq_sum += x * x;
    }
    m.variance = ss / (n - 1.0);
    m.se_mean = std::sqrt(m.variance / n);
    m.second_moment = sq_sum / n;

    double ss2 = 0.0;
    for (double x : data) {
        const double d = x * x - m.second_moment;
        ss2 += d * d;
    }
    m.se_second_moment = std::sqrt(ss2 / (n - 1.0) / n);
    return m;
}

MomentEstimate sample_power_moment(std::span<const double> data, int k) {
    if (data.empty()) throw std::invalid_argument("sample_power_moment: empty sample");
    const double n = static_cast<double>(data.size());
    double sum = 0.0;
    for (double x : data) sum += std::pow(x, k);
    const double mean = sum / n;
    double ss = 0.0;
    for (double x : data) {
        const double d = std::pow(x, k) - mean;
        ss += d * d;
    }
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

double ks_distance(std::span<const double> data, const std::function<double(double)>& cdf) {
    if (data.empty()) throw std::invalid_argument("ks_distance: empty sample");
    std::vector<double> sorted(data.begin(), data.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(f - lo), std::abs(hi - f)));
    }
    return d;
}

double ks_two_sample_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample_distance: empty sample");
    std::vector<double> sa(a.begin(), a.end());
    std::vector<double> sb(b.begin(), b.end());
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    const double na = static_cast<double>(sa.size());
    const double nb = static_cast<double>(sb.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < sa.size() && j < sb.size()) {
        if (sa[i] <= sb[j]) ++i; else ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_pvalue(double d, double n_eff) {
    const double lambda = (std::sqrt(n_eff) + 0.12 + 0.11 / std::sqrt(n_eff)) * d;
    // Kolmogorov tail series; converges fast for lambda > 0.3.
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = 2.0 * ((k % 2 == 1) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
        sum += term;
        if (std::abs(term) < 1e-16) break;
    }
    return std::clamp(sum, 0.0, 1.0);
}

}  // namespace shearlab
