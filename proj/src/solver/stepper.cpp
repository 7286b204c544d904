#include <cmath>
#include <stdexcept>

#include "shearlab/solver.hpp"

namespace shearlab::solver {

ChannelStepper::ChannelStepper(const Geometry& geom, const GridSpec& grid, double nu)
    : geom_(geom),
      grid_(grid),
      nu_(nu),
      poisson_(grid.n1, grid.n2, grid.n3, geom.length / grid.n1, geom.length / grid.n2,
               geom.height / grid.n3) {
    geom.validate();
    grid.validate();
    if (!(nu > 0.0)) throw std::invalid_argument("ChannelStepper: nu must be positive");
    const std::size_t cells = static_cast<std::size_t>(grid.n1) * grid.n2 * grid.n3;
    mid_ = std::make_unique<VelocityField>(geom, grid);
    r1_.assign(cells, 0.0);
    r2_.assign(cells, 0.0);
    r3_.assign(static_cast<std::size_t>(grid.n1) * grid.n2 * (grid.n3 + 1), 0.0);
    rhs_.assign(cells, 0.0);
    phi_.assign(cells, 0.0);
}

namespace {

// Explicit right-hand side -u.grad(u) + nu lap(u) on the staggered grid.
// Divergence-form advective fluxes from two-point averages; tangential
// wall values enter through ghost cells (2*wall - first interior).
void eval_rhs(const VelocityField& f, double wall_speed, double nu, std::vector<double>& r1,
              std::vector<double>& r2, std::vector<double>& r3) {
    const int n1 = f.n1(), n2 = f.n2(), n3 = f.n3();
    const int m1 = n1 - 1, m2 = n2 - 1;
    const double dx1 = f.dx1(), dx2 = f.dx2(), dx3 = f.dx3();
    const double i1 = 1.0 / dx1, i2 = 1.0 / dx2, i3 = 1.0 / dx3;
    const double v1 = nu / (dx1 * dx1), v2 = nu / (dx2 * dx2), v3 = nu / (dx3 * dx3);

    for (int k = 0; k < n3; ++k) {
        const bool bottom = (k == 0), top = (k == n3 - 1);
        for (int j = 0; j < n2; ++j) {
            const int jp = (j + 1) & m2, jm = (j - 1) & m2;
            for (int i = 0; i < n1; ++i) {
                const int ip = (i + 1) & m1, im = (i - 1) & m1;
                const std::size_t c = f.idx(i, j, k);

                // --- u1 momentum ---
                {
                    const double uc = f.u1(i, j, k);
                    const double uxp = f.u1(ip, j, k), uxm = f.u1(im, j, k);
                    const double uyp = f.u1(i, jp, k), uym = f.u1(i, jm, k);
                    const double uzp = top ? -uc : f.u1(i, j, k + 1);
                    const double uzm = bottom ? 2.0 * wall_speed - uc : f.u1(i, j, k - 1);

                    const double fxr = 0.25 * (uc + uxp) * (uc + uxp);
                    const double fxl = 0.25 * (uxm + uc) * (uxm + uc);
                    const double fyh = 0.25 * (f.u2(i, jp, k) + f.u2(im, jp, k)) * (uyp + uc);
                    const double fyl = 0.25 * (f.u2(i, j, k) + f.u2(im, j, k)) * (uc + uym);
                    const double fzh =
                        top ? 0.0
                            : 0.25 * (f.u3(i, j, k + 1) + f.u3(im, j, k + 1)) * (f.u1(i, j, k + 1) + uc);
                    const double fzl =
                        bottom ? 0.0
                               : 0.25 * (f.u3(i, j, k) + f.u3(im, j, k)) * (uc + f.u1(i, j, k - 1));

                    const double adv = (fxr - fxl) * i1 + (fyh - fyl) * i2 + (fzh - fzl) * i3;
                    const double lap = (uxp + uxm - 2.0 * uc) * v1 + (uyp + uym - 2.0 * uc) * v2 +
                                       (uzp + uzm - 2.0 * uc) * v3;
                    r1[c] = -adv + lap;
                }

                // --- u2 momentum ---
                {
                    const double uc = f.u2(i, j, k);
                    const double uxp = f.u2(ip, j, k), uxm = f.u2(im, j, k);
                    const double uyp = f.u2(i, jp, k), uym = f.u2(i, jm, k);
                    const double uzp = top ? -uc : f.u2(i, j, k + 1);
                    const double uzm = bottom ? -uc : f.u2(i, j, k - 1);

                    const double fxh = 0.25 * (f.u1(ip, j, k) + f.u1(ip, jm, k)) * (uxp + uc);
                    const double fxl = 0.25 * (f.u1(i, j, k) + f.u1(i, jm, k)) * (uc + uxm);
                    const double fyr = 0.25 * (uc + uyp) * (uc + uyp);
                    const double fyl = 0.25 * (uym + uc) * (uym + uc);
                    const double fzh =
                        top ? 0.0
                            : 0.25 * (f.u3(i, j, k + 1) + f.u3(i, jm, k + 1)) * (f.u2(i, j, k + 1) + uc);
                    const double fzl =
                        bottom ? 0.0
                               : 0.25 * (f.u3(i, j, k) + f.u3(i, jm, k)) * (uc + f.u2(i, j, k - 1));

                    const double adv = (fxh - fxl) * i1 + (fyr - fyl) * i2 + (fzh - fzl) * i3;
                    const double lap = (uxp + uxm - 2.0 * uc) * v1 + (uyp + uym - 2.0 * uc) * v2 +
                                       (uzp + uzm - 2.0 * uc) * v3;
                    r2[c] = -adv + lap;
                }

                // --- u3 momentum (interior z-faces only) ---
                if (k >= 1) {
                    const double uc = f.u3(i, j, k);
                    const double uxp = f.u3(ip, j, k), uxm = f.u3(im, j, k);
                    const double uyp = f.u3(i, jp, k), uym = f.u3(i, jm, k);
                    const double uzp = f.u3(i, j, k + 1), uzm = f.u3(i, j, k - 1);

                    const double fxh = 0.25 * (f.u1(ip, j, k) + f.u1(ip, j, k - 1)) * (uxp + uc);
                    const double fxl = 0.25 * (f.u1(i, j, k) + f.u1(i, j, k - 1)) * (uc + uxm);
                    const double fyh = 0.25 * (f.u2(i, jp, k) + f.u2(i, jp, k - 1)) * (uyp + uc);
                    const double fyl = 0.25 * (f.u2(i, j, k) + f.u2(i, j, k - 1)) * (uc + uym);
                    const double fzr = 0.25 * (uc + uzp) * (uc + uzp);
                    const double fzl = 0.25 * (uzm + uc) * (uzm + uc);

                    const double adv = (fxh - fxl) * i1 + (fyh - fyl) * i2 + (fzr - fzl) * i3;
                    const double lap = (uxp + uxm - 2.0 * uc) * v1 + (uyp + uym - 2.0 * uc) * v2 +
                                       (uzp + uzm - 2.0 * uc) * v3;
                    r3[c] = -adv + lap;
                }
            }
        }
    }
}

}  // namespace

void ChannelStepper::project(VelocityField& f) const {
    const int n1 = f.n1(), n2 = f.n2(), n3 = f.n3();
    const int m1 = n1 - 1, m2 = n2 - 1;
    const double i1 = 1.0 / f.dx1(), i2 = 1.0 / f.dx2(), i3 = 1.0 / f.dx3();

    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                const int ip = (i + 1) & m1, jp = (j + 1) & m2;
                rhs_[f.idx(i, j, k)] = (f.u1(ip, j, k) - f.u1(i, j, k)) * i1 +
                                       (f.u2(i, jp, k) - f.u2(i, j, k)) * i2 +
                                       (f.u3(i, j, k + 1) - f.u3(i, j, k)) * i3;
            }

    poisson_.solve(rhs_, phi_);

    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                const int im = (i - 1) & m1, jm = (j - 1) & m2;
                f.u1(i, j, k) -= (phi_[f.idx(i, j, k)] - phi_[f.idx(im, j, k)]) * i1;
                f.u2(i, j, k) -= (phi_[f.idx(i, j, k)] - phi_[f.idx(i, jm, k)]) * i2;
                if (k >= 1) f.u3(i, j, k) -= (phi_[f.idx(i, j, k)] - phi_[f.idx(i, j, k - 1)]) * i3;
            }
}

double ChannelStepper::max_divergence(const VelocityField& f) const {
    const int n1 = f.n1(), n2 = f.n2(), n3 = f.n3();
    const int m1 = n1 - 1, m2 = n2 - 1;
    const double i1 = 1.0 / f.dx1(), i2 = 1.0 / f.dx2(), i3 = 1.0 / f.dx3();
    double worst = 0.0;
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                const int ip = (i + 1) & m1, jp = (j + 1) & m2;
                const double div = (f.u1(ip, j, k) - f.u1(i, j, k)) * i1 +
                                   (f.u2(i, jp, k) - f.u2(i, j, k)) * i2 +
                                   (f.u3(i, j, k + 1) - f.u3(i, j, k)) * i3;
                worst = std::max(worst, std::abs(div));
            }
    return worst;
}

void ChannelStepper::step(VelocityField& f, double wall_speed, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("step: dt must be positive");
    if (!std::isfinite(wall_speed)) throw std::invalid_argument("step: wall speed must be finite");

    const std::size_t cells = r1_.size();
    const std::size_t faces3 = r3_.size();

    // Midpoint stage.
    eval_rhs(f, wall_speed, nu_, r1_, r2_, r3_);
    VelocityField& mid = *mid_;
    const double half = 0.5 * dt;
    for (std::size_t c = 0; c < cells; ++c) {
        mid.u1_data()[c] = f.u1_data()[c] + half * r1_[c];
        mid.u2_data()[c] = f.u2_data()[c] + half * r2_[c];
    }
    for (std::size_t c = 0; c < faces3; ++c) mid.u3_data()[c] = f.u3_data()[c] + half * r3_[c];
    mid.wall_speed = wall_speed;

    eval_rhs(mid, wall_speed, nu_, r1_, r2_, r3_);
    for (std::size_t c = 0; c < cells; ++c) {
        f.u1_data()[c] += dt * r1_[c];
        f.u2_data()[c] += dt * r2_[c];
    }
    for (std::size_t c = 0; c < faces3; ++c) f.u3_data()[c] += dt * r3_[c];

    project(f);
    for (std::size_t c = 0; c < cells; ++c) f.p_data()[c] = phi_[c] / dt;

    f.time += dt;
    f.wall_speed = wall_speed;
}

}  // namespace shearlab::solver
