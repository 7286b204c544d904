#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shearlab/rng.hpp"
#include "shearlab/solver.hpp"

namespace shearlab::solver {

void GridSpec::validate() const {
    auto pow2 = [](int n) { return n >= 1 && (n & (n - 1)) == 0; };
    if (!pow2(n1) || !pow2(n2))
        throw std::invalid_argument("GridSpec: n1 and n2 must be powers of two");
    if (n3 < 8) throw std::invalid_argument("GridSpec: n3 must be at least 8");
    if (!(cfl_safety > 0.0) || cfl_safety > 1.0)
        throw std::invalid_argument("GridSpec: cfl_safety must be in (0, 1]");
    if (dt < 0.0 || !std::isfinite(dt)) throw std::invalid_argument("GridSpec: bad dt");
}

namespace {

double min_spacing(const Geometry& geom, const GridSpec& grid) {
    const double dx1 = geom.length / grid.n1;
    const double dx2 = geom.length / grid.n2;
    const double dx3 = geom.height / grid.n3;
    return std::min({dx1, dx2, dx3});
}

}  // namespace

double stability_limit(const Geometry& geom, const GridSpec& grid, double nu, double u_max) {
    const double dx = min_spacing(geom, grid);
    const double diffusive = 0.25 * dx * dx / nu;
    const double advective = (u_max > 0.0) ? dx / u_max : diffusive;
    return grid.cfl_safety * std::min(advective, diffusive);
}

double auto_time_step(const Geometry& geom, const GridSpec& grid, double nu, double u_ref) {
    const double dx = min_spacing(geom, grid);
    const double diffusive = dx * dx / (6.0 * nu);
    const double advective = (u_ref > 0.0) ? dx / u_ref : diffusive;
    return grid.cfl_safety * std::min(advective, diffusive);
}

VelocityField::VelocityField(const Geometry& geom, const GridSpec& grid) : geom_(geom) {
    geom.validate();
    grid.validate();
    n1_ = grid.n1;
    n2_ = grid.n2;
    n3_ = grid.n3;
    dx1_ = geom.length / n1_;
    dx2_ = geom.length / n2_;
    dx3_ = geom.height / n3_;
    const std::size_t cells = static_cast<std::size_t>(n1_) * n2_ * n3_;
    u1_.assign(cells, 0.0);
    u2_.assign(cells, 0.0);
    u3_.assign(static_cast<std::size_t>(n1_) * n2_ * (n3_ + 1), 0.0);
    p_.assign(cells, 0.0);
}

VelocityField init_field(const Geometry& geom, const GridSpec& grid, const InitialCondition& init) {
    VelocityField f(geom, grid);
    switch (init.kind) {
        case InitialCondition::Kind::rest:
            f.wall_speed = 0.0;
            break;
        case InitialCondition::Kind::couette: {
            f.wall_speed = init.couette_speed;
            for (int k = 0; k < f.n3(); ++k) {
                const double u = init.couette_speed * (1.0 - f.z_center(k) / geom.height);
                for (int j = 0; j < f.n2(); ++j)
                    for (int i = 0; i < f.n1(); ++i) f.u1(i, j, k) = u;
            }
            break;
        }
        case InitialCondition::Kind::perturbed: {
            f.wall_speed = init.couette_speed;
            Rng rng(init.seed);
            for (int k = 0; k < f.n3(); ++k) {
                const double base = init.couette_speed * (1.0 - f.z_center(k) / geom.height);
                const double envelope = std::sin(std::numbers::pi * f.z_center(k) / geom.height);
                for (int j = 0; j < f.n2(); ++j)
                    for (int i = 0; i < f.n1(); ++i) {
                        f.u1(i, j, k) = base + init.amplitude * envelope * (2.0 * rng.uniform01() - 1.0);
                        f.u2(i, j, k) = init.amplitude * envelope * (2.0 * rng.uniform01() - 1.0);
                    }
            }
            for (int k = 1; k < f.n3(); ++k) {
                const double envelope = std::sin(std::numbers::pi * f.z_face(k) / geom.height);
                for (int j = 0; j < f.n2(); ++j)
                    for (int i = 0; i < f.n1(); ++i)
                        f.u3(i, j, k) = init.amplitude * envelope * (2.0 * rng.uniform01() - 1.0);
            }
            ChannelStepper stepper(geom, grid, 1.0);
            stepper.project(f);
            break;
        }
    }
    return f;
}

namespace {

// Quadrature of int v^2 over a segment where v is linear with endpoint
// values va, vb: exact (va^2 + va vb + vb^2)/3 * len.
inline double linear_sq_integral(double va, double vb, double len) {
    return (va * va + va * vb + vb * vb) / 3.0 * len;
}

}  // namespace

StepDiagnostics step_diagnostics(const VelocityField& f, double nu, const BackgroundParams* bp) {
    const int n1 = f.n1(), n2 = f.n2(), n3 = f.n3();
    const int m1 = n1 - 1, m2 = n2 - 1;
    const double dx1 = f.dx1(), dx2 = f.dx2(), dx3 = f.dx3();
    const double dv = dx1 * dx2 * dx3;
    const double da = dx1 * dx2;
    const double h = f.geometry().height;
    const double wall = f.wall_speed;

    StepDiagnostics out;
    double grad_shared = 0.0;  // all gradient entries except d(u1)/dx3, d(u2)/dx3
    double energy = 0.0;
    double wall_deriv_sum = 0.0;

    for (int k = 0; k < n3; ++k) {
        for (int j = 0; j < n2; ++j) {
            const int jp = (j + 1) & m2, jm = (j - 1) & m2;
            for (int i = 0; i < n1; ++i) {
                const int ip = (i + 1) & m1, im = (i - 1) & m1;
                const double a1 = f.u1(i, j, k);
                const double a2 = f.u2(i, j, k);
                const double d11 = (f.u1(ip, j, k) - a1) / dx1;
                const double d12 = (a1 - f.u1(i, jm, k)) / dx2;
                const double d21 = (a2 - f.u2(im, j, k)) / dx1;
                const double d22 = (f.u2(i, jp, k) - a2) / dx2;
                const double d33 = (f.u3(i, j, k + 1) - f.u3(i, j, k)) / dx3;
                grad_shared += (d11 * d11 + d12 * d12 + d21 * d21 + d22 * d22 + d33 * d33) * dv;
                energy += (a1 * a1 + a2 * a2) * dv;
                if (k >= 1) {
                    const double d31 = (f.u3(i, j, k) - f.u3(im, j, k)) / dx1;
                    const double d32 = (f.u3(i, j, k) - f.u3(i, jm, k)) / dx2;
                    grad_shared += (d31 * d31 + d32 * d32) * dv;
                    energy += f.u3(i, j, k) * f.u3(i, j, k) * dv;
                }
            }
        }
    }

    // Wall-normal profiles of the tangential components: interior central
    // differences at the z-faces, one-sided second-order stencils at the
    // walls (weight dx3/2 there).
    double grad_z_u1 = 0.0, grad_z_u2 = 0.0;
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            const double b1 = (-8.0 * wall + 9.0 * f.u1(i, j, 0) - f.u1(i, j, 1)) / (3.0 * dx3);
            const double t1 = (-9.0 * f.u1(i, j, n3 - 1) + f.u1(i, j, n3 - 2)) / (3.0 * dx3);
            const double b2 = (9.0 * f.u2(i, j, 0) - f.u2(i, j, 1)) / (3.0 * dx3);
            const double t2 = (-9.0 * f.u2(i, j, n3 - 1) + f.u2(i, j, n3 - 2)) / (3.0 * dx3);
            grad_z_u1 += 0.5 * (b1 * b1 + t1 * t1) * dv;
            grad_z_u2 += 0.5 * (b2 * b2 + t2 * t2) * dv;
            wall_deriv_sum += b1 * da;
            for (int k = 1; k < n3; ++k) {
                const double g1 = (f.u1(i, j, k) - f.u1(i, j, k - 1)) / dx3;
                const double g2 = (f.u2(i, j, k) - f.u2(i, j, k - 1)) / dx3;
                grad_z_u1 += g1 * g1 * dv;
                grad_z_u2 += g2 * g2 * dv;
            }
        }
    }

    out.grad_u_sq = grad_shared + grad_z_u1 + grad_z_u2;
    out.kinetic_energy = 0.5 * energy;
    out.boundary_power = -nu * wall * wall_deriv_sum;

    if (bp == nullptr) return out;

    // Fluctuation v = u - Phi. Only the first velocity component and its
    // x3-derivative see the background; everything else is shared with u.
    // The x3-profile of u1 is reconstructed piecewise-linearly from the
    // wall values and the cell samples, and all layer integrals split
    // their quadrature cells at the layer height delta.
    const double delta_t = background::delta(wall, *bp);
    const double q = (3.0 * wall * wall + bp->b) / bp->a;  // f' = 1 - q x3
    const double phi_slope = wall / delta_t;               // -phi' inside the layer
    auto phi_at = [&](double z) { return z < delta_t ? (1.0 - z / delta_t) * wall : 0.0; };

    double gz_v = 0.0, v1_sq = 0.0, m_int = 0.0;
    for (int j = 0; j < n2; ++j) {
        for (int i = 0; i < n1; ++i) {
            // Reconstruction nodes: z=0 (wall), cell centers, z=h (top).
            double za = 0.0;
            double ua = wall;
            for (int seg = 0; seg <= n3; ++seg) {
                double zb, ub;
                if (seg < n3) {
                    zb = f.z_center(seg);
                    ub = f.u1(i, j, seg);
                } else {
                    zb = h;
                    ub = 0.0;
                }
                const double len = zb - za;
                const double slope = (ub - ua) / len;
                const double len_in = std::clamp(delta_t - za, 0.0, len);

                const double sv = slope + phi_slope;  // d(v1)/dz inside the layer
                gz_v += (sv * sv * len_in + slope * slope * (len - len_in)) * da;

                if (len_in > 0.0) {
                    const double zmid = za + 0.5 * len_in;
                    const double u_mid = ua + slope * (zmid - za);
                    const double u_end = ua + slope * len_in;
                    const double va = ua - phi_at(za);
                    const double vm = u_mid - phi_at(zmid);
                    const double ve = u_end - phi_at(std::min(za + len_in, delta_t));
                    v1_sq += (va * va + va * ve + ve * ve) / 3.0 * len_in * da;
                    // v1 * f' is quadratic on the piece: Simpson is exact.
                    const double fa = 1.0 - q * za;
                    const double fm = 1.0 - q * zmid;
                    const double fe = 1.0 - q * (za + len_in);
                    m_int += len_in / 6.0 * (va * fa + 4.0 * vm * fm + ve * fe) * da;
                }
                if (len - len_in > 0.0) {
                    const double v0 = ua + slope * len_in;  // phi vanishes above delta
                    v1_sq += linear_sq_integral(v0, ub, len - len_in) * da;
                }
                za = zb;
                ua = ub;
            }
        }
    }

    out.grad_v_sq = grad_shared + grad_z_u2 + gz_v;
    out.m_integrand = m_int;

    double v23_sq = 0.0;
    for (int k = 0; k < n3; ++k)
        for (int j = 0; j < n2; ++j)
            for (int i = 0; i < n1; ++i) {
                v23_sq += f.u2(i, j, k) * f.u2(i, j, k) * dv;
                if (k >= 1) v23_sq += f.u3(i, j, k) * f.u3(i, j, k) * dv;
            }
    out.v_norm_sq = v1_sq + v23_sq;
    return out;
}

double dissipation(const VelocityField& f, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("dissipation: nu must be positive");
    const StepDiagnostics d = step_diagnostics(f, nu, nullptr);
    return nu * d.grad_u_sq / f.geometry().volume();
}

}  // namespace shearlab::solver
