#include "fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace shearlab::solver::detail {

Fft::Fft(int n) : n_(n) {
    if (n < 1 || (n & (n - 1)) != 0) throw std::invalid_argument("Fft: size must be a power of two");
    log2n_ = 0;
    while ((1 << log2n_) < n) ++log2n_;

    bit_reverse_.resize(n);
    for (int i = 0; i < n; ++i) {
        int r = 0;
        for (int b = 0; b < log2n_; ++b)
            if (i & (1 << b)) r |= 1 << (log2n_ - 1 - b);
        bit_reverse_[i] = r;
    }

    roots_.resize(n / 2 > 0 ? n / 2 : 1);
    for (int k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * std::numbers::pi * k / n;
        roots_[k] = {std::cos(ang), std::sin(ang)};
    }
}

void Fft::run(std::complex<double>* a, bool inverse) const {
    const int n = n_;
    if (n == 1) return;
    for (int i = 0; i < n; ++i) {
        const int r = bit_reverse_[i];
        if (i < r) std::swap(a[i], a[r]);
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int half = len >> 1;
        const int stride = n / len;
        for (int start = 0; start < n; start += len) {
            for (int k = 0; k < half; ++k) {
                std::complex<double> w = roots_[k * stride];
                if (inverse) w = std::conj(w);
                const std::complex<double> u = a[start + k];
                const std::complex<double> v = a[start + k + half] * w;
                a[start + k] = u + v;
                a[start + k + half] = u - v;
            }
        }
    }
}

}  // namespace shearlab::solver::detail
