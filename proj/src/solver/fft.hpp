// Iterative radix-2 complex FFT, sized at construction. Power-of-two only.

#pragma once

#include <complex>
#include <vector>

namespace shearlab::solver::detail {

class Fft {
public:
    explicit Fft(int n);

    // In-place transform; inverse is unnormalized (scale by 1/n yourself).
    void forward(std::complex<double>* a) const { run(a, false); }
    void inverse(std::complex<double>* a) const { run(a, true); }

    int size() const { return n_; }

private:
    void run(std::complex<double>* a, bool inverse) const;

    int n_;
    int log2n_;
    std::vector<int> bit_reverse_;
    std::vector<std::complex<double>> roots_;  // e^{-2 pi i k / n}, k < n/2
};

}  // namespace shearlab::solver::detail
