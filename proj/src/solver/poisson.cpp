#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"
#include "shearlab/solver.hpp"

namespace shearlab::solver {

PoissonSolver::PoissonSolver(int n1, int n2, int n3, double dx1, double dx2, double dx3)
    : n1_(n1), n2_(n2), n3_(n3), dx1_(dx1), dx2_(dx2), dx3_(dx3) {
    if (n1 < 1 || n2 < 1 || n3 < 2) throw std::invalid_argument("PoissonSolver: bad grid");
    if ((n1 & (n1 - 1)) != 0 || (n2 & (n2 - 1)) != 0)
        throw std::invalid_argument("PoissonSolver: n1, n2 must be powers of two");

    lambda1_.resize(n1);
    for (int k = 0; k < n1; ++k)
        lambda1_[k] = (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n1)) / (dx1 * dx1);
    lambda2_.resize(n2);
    for (int k = 0; k < n2; ++k)
        lambda2_[k] = (2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * k / n2)) / (dx2 * dx2);

    fft1_ = std::make_unique<detail::Fft>(n1);
    fft2_ = std::make_unique<detail::Fft>(n2);

    spec_.resize(static_cast<std::size_t>(n1) * n2 * n3);
    plane_.resize(static_cast<std::size_t>(n1) * n2);
    column_.resize(std::max(n1, n2));
    tri_rhs_.resize(n3);
    tri_work_.resize(n3);
    tri_diag_.resize(n3);
    tri_scratch_.resize(n3);
}

PoissonSolver::~PoissonSolver() = default;
PoissonSolver::PoissonSolver(PoissonSolver&&) noexcept = default;
PoissonSolver& PoissonSolver::operator=(PoissonSolver&&) noexcept = default;

void PoissonSolver::solve(const std::vector<double>& rhs, std::vector<double>& phi) const {
    const std::size_t plane_size = static_cast<std::size_t>(n1_) * n2_;
    if (rhs.size() != plane_size * n3_) throw std::invalid_argument("PoissonSolver: rhs size");
    phi.resize(rhs.size());

    // Forward 2D transform of every z-plane.
    for (int k = 0; k < n3_; ++k) {
        const double* src = rhs.data() + plane_size * k;
        for (std::size_t m = 0; m < plane_size; ++m) plane_[m] = src[m];
        for (int j = 0; j < n2_; ++j) fft1_->forward(plane_.data() + static_cast<std::size_t>(j) * n1_);
        if (n2_ > 1) {
            for (int i = 0; i < n1_; ++i) {
                for (int j = 0; j < n2_; ++j) column_[j] = plane_[static_cast<std::size_t>(j) * n1_ + i];
                fft2_->forward(column_.data());
                for (int j = 0; j < n2_; ++j) plane_[static_cast<std::size_t>(j) * n1_ + i] = column_[j];
            }
        }
        std::complex<double>* dst = spec_.data() + plane_size * k;
        for (std::size_t m = 0; m < plane_size; ++m) dst[m] = plane_[m];
    }

    // Tridiagonal solve in x3 per horizontal mode:
    //   (phi_{k-1} - 2 phi_k + phi_{k+1})/dx3^2 - lam phi_k = rhs_k
    // with Neumann ends; the zero mode is made compatible and pinned.
    const double inv_dz2 = 1.0 / (dx3_ * dx3_);
    for (int j = 0; j < n2_; ++j) {
        for (int i = 0; i < n1_; ++i) {
            const double lam = lambda1_[i] + lambda2_[j];
            const std::size_t offset = static_cast<std::size_t>(j) * n1_ + i;
            for (int k = 0; k < n3_; ++k) tri_rhs_[k] = spec_[plane_size * k + offset];

            const bool zero_mode = (i == 0 && j == 0);
            if (zero_mode) {
                std::complex<double> mean{0.0, 0.0};
                for (int k = 0; k < n3_; ++k) mean += tri_rhs_[k];
                mean /= static_cast<double>(n3_);
                for (int k = 0; k < n3_; ++k) tri_rhs_[k] -= mean;
            }

            for (int k = 0; k < n3_; ++k) {
                const bool end = (k == 0 || k == n3_ - 1);
                tri_diag_[k] = (end ? -inv_dz2 : -2.0 * inv_dz2) - lam;
            }
            double last_lower = inv_dz2;
            if (zero_mode) {
                tri_diag_[n3_ - 1] = 1.0;
                last_lower = 0.0;
                tri_rhs_[n3_ - 1] = 0.0;
            }

            tri_scratch_[0] = tri_diag_[0];
            tri_work_[0] = tri_rhs_[0];
            for (int k = 1; k < n3_; ++k) {
                const double lower = (k == n3_ - 1) ? last_lower : inv_dz2;
                const double m = lower / tri_scratch_[k - 1];
                tri_scratch_[k] = tri_diag_[k] - m * inv_dz2;
                tri_work_[k] = tri_rhs_[k] - m * tri_work_[k - 1];
            }
            tri_rhs_[n3_ - 1] = tri_work_[n3_ - 1] / tri_scratch_[n3_ - 1];
            for (int k = n3_ - 2; k >= 0; --k)
                tri_rhs_[k] = (tri_work_[k] - inv_dz2 * tri_rhs_[k + 1]) / tri_scratch_[k];

            for (int k = 0; k < n3_; ++k) spec_[plane_size * k + offset] = tri_rhs_[k];
        }
    }

    // Inverse transform per plane.
    const double norm = 1.0 / (static_cast<double>(n1_) * n2_);
    for (int k = 0; k < n3_; ++k) {
        std::complex<double>* src = spec_.data() + plane_size * k;
        for (std::size_t m = 0; m < plane_size; ++m) plane_[m] = src[m];
        if (n2_ > 1) {
            for (int i = 0; i < n1_; ++i) {
                for (int j = 0; j < n2_; ++j) column_[j] = plane_[static_cast<std::size_t>(j) * n1_ + i];
                fft2_->inverse(column_.data());
                for (int j = 0; j < n2_; ++j) plane_[static_cast<std::size_t>(j) * n1_ + i] = column_[j];
            }
        }
        for (int j = 0; j < n2_; ++j) fft1_->inverse(plane_.data() + static_cast<std::size_t>(j) * n1_);
        double* dst = phi.data() + plane_size * k;
        for (std::size_t m = 0; m < plane_size; ++m) dst[m] = plane_[m].real() * norm;
    }
}

}  // namespace shearlab::solver
