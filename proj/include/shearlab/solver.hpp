// Desk-scale incompressible channel-flow solver.
//
// Staggered (MAC) finite-difference grid, periodic in x1/x2, no-slip walls
// in x3: the bottom wall slides at a prescribed speed, the top wall is
// fixed. Time stepping is explicit midpoint (RK2) for advection and
// diffusion with a Chorin projection enforcing the discrete divergence to
// solver tolerance each step; the pressure Poisson solve is FFT in the
// periodic directions and tridiagonal in x3 with Neumann wall conditions.
//
// Tangential wall data enter through ghost values (linear extrapolation
// through the wall), the wall-normal velocity is pinned to zero on the
// wall faces.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "shearlab/background.hpp"

namespace shearlab::solver {

namespace detail {
class Fft;
}

using background::BackgroundParams;
using background::Geometry;

struct GridSpec {
    int n1 = 32;
    int n2 = 32;
    int n3 = 32;
    double dt = 0.0;          // 0 requests the automatic stable step
    double cfl_safety = 0.9;  // in (0, 1]

    void validate() const;
};

/// Stability rule for explicit stepping; dt must not exceed
/// cfl_safety * min(dx_min / u_max, 0.25 dx_min^2 / nu).
double stability_limit(const Geometry& geom, const GridSpec& grid, double nu, double u_max);

/// Automatic step: cfl_safety * min(dx_min / u_ref, dx_min^2 / (6 nu)),
/// inside the stable region of the RK2 scheme with margin.
double auto_time_step(const Geometry& geom, const GridSpec& grid, double nu, double u_ref);

class VelocityField {
public:
    VelocityField(const Geometry& geom, const GridSpec& grid);

    int n1() const { return n1_; }
    int n2() const { return n2_; }
    int n3() const { return n3_; }
    double dx1() const { return dx1_; }
    double dx2() const { return dx2_; }
    double dx3() const { return dx3_; }
    const Geometry& geometry() const { return geom_; }

    // u1, u2 and p are indexed by cell (i, j, k); u3 by z-face k in [0, n3].
    double& u1(int i, int j, int k) { return u1_[idx(i, j, k)]; }
    double& u2(int i, int j, int k) { return u2_[idx(i, j, k)]; }
    double& u3(int i, int j, int k) { return u3_[idx(i, j, k)]; }
    double& p(int i, int j, int k) { return p_[idx(i, j, k)]; }
    double u1(int i, int j, int k) const { return u1_[idx(i, j, k)]; }
    double u2(int i, int j, int k) const { return u2_[idx(i, j, k)]; }
    double u3(int i, int j, int k) const { return u3_[idx(i, j, k)]; }
    double p(int i, int j, int k) const { return p_[idx(i, j, k)]; }

    std::vector<double>& u1_data() { return u1_; }
    std::vector<double>& u2_data() { return u2_; }
    std::vector<double>& u3_data() { return u3_; }
    std::vector<double>& p_data() { return p_; }
    const std::vector<double>& u1_data() const { return u1_; }
    const std::vector<double>& u2_data() const { return u2_; }
    const std::vector<double>& u3_data() const { return u3_; }
    const std::vector<double>& p_data() const { return p_; }

    double time = 0.0;
    double wall_speed = 0.0;  // bottom wall; top wall is at rest

    /// Height of the center of z-cell k.
    double z_center(int k) const { return (k + 0.5) * dx3_; }
    double z_face(int k) const { return k * dx3_; }

    std::size_t idx(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * n2_ + j) * n1_ + i;
    }

private:
    Geometry geom_;
    int n1_, n2_, n3_;
    double dx1_, dx2_, dx3_;
    std::vector<double> u1_, u2_, u3_, p_;
};

struct InitialCondition {
    enum class Kind { rest, couette, perturbed };
    Kind kind = Kind::couette;
    double couette_speed = 0.0;  // wall speed of the linear profile
    double amplitude = 0.0;      // perturbation amplitude (perturbed only)
    std::uint64_t seed = 0;      // perturbation seed

    static InitialCondition rest() { return {Kind::rest, 0.0, 0.0, 0}; }
    static InitialCondition couette(double u0) { return {Kind::couette, u0, 0.0, 0}; }
    static InitialCondition perturbed(double u0, double amp, std::uint64_t seed) {
        return {Kind::perturbed, u0, amp, seed};
    }
};

/// Build a divergence-free field satisfying the boundary conditions.
VelocityField init_field(const Geometry& geom, const GridSpec& grid, const InitialCondition& init);

/// Pressure Poisson solve: discrete Laplacian phi = rhs on cell centers,
/// periodic in x1/x2 (sizes must be powers of two), homogeneous Neumann at
/// the walls. The constant mode is pinned.
class PoissonSolver {
public:
    PoissonSolver(int n1, int n2, int n3, double dx1, double dx2, double dx3);
    ~PoissonSolver();
    PoissonSolver(PoissonSolver&&) noexcept;
    PoissonSolver& operator=(PoissonSolver&&) noexcept;

    void solve(const std::vector<double>& rhs, std::vector<double>& phi) const;

private:
    int n1_, n2_, n3_;
    double dx1_, dx2_, dx3_;
    std::vector<double> lambda1_, lambda2_;  // transform eigenvalues
    std::unique_ptr<detail::Fft> fft1_, fft2_;
    mutable std::vector<std::complex<double>> spec_;     // n1*n2*n3 spectral data
    mutable std::vector<std::complex<double>> plane_;    // n1*n2 scratch
    mutable std::vector<std::complex<double>> column_;   // length max(n1,n2) scratch
    mutable std::vector<std::complex<double>> tri_rhs_;  // length n3
    mutable std::vector<std::complex<double>> tri_work_;
    mutable std::vector<double> tri_diag_;
    mutable std::vector<double> tri_scratch_;
};

/// One-trajectory time stepper; owns the scratch fields and the Poisson
/// solver. Not safe for concurrent use on the same instance.
class ChannelStepper {
public:
    ChannelStepper(const Geometry& geom, const GridSpec& grid, double nu);

    /// Advance one step of size dt with the bottom wall moving at
    /// wall_speed (held constant across the step).
    void step(VelocityField& f, double wall_speed, double dt);

    /// Project the field onto the discrete divergence-free space.
    void project(VelocityField& f) const;

    double max_divergence(const VelocityField& f) const;
    double nu() const { return nu_; }

private:
    void add_rhs(const VelocityField& f, double wall_speed, double scale,
                 const std::vector<double>& su1, const std::vector<double>& su2,
                 const std::vector<double>& su3, std::vector<double>& d1,
                 std::vector<double>& d2, std::vector<double>& d3) const;

    Geometry geom_;
    GridSpec grid_;
    double nu_;
    PoissonSolver poisson_;
    std::unique_ptr<VelocityField> mid_;   // midpoint stage state
    std::vector<double> r1_, r2_, r3_;     // stage right-hand sides
    mutable std::vector<double> rhs_;      // divergence / poisson rhs
    mutable std::vector<double> phi_;
};

/// Integral diagnostics of a snapshot. The fluctuation entries are filled
/// only when a background is supplied; they use a piecewise-linear wall
/// reconstruction in x3 with quadrature cells split at the layer height,
/// so the layer inequalities hold for the discrete quadrature itself.
struct StepDiagnostics {
    double grad_u_sq = 0.0;         // integral |grad u|^2
    double kinetic_energy = 0.0;    // 1/2 ||u||^2
    double boundary_power = 0.0;    // rate of work done by the moving wall
    double grad_v_sq = 0.0;         // integral |grad (u - Phi)|^2
    double m_integrand = 0.0;       // int_{D_delta} v1 f'(x_wall) dx
    double v_norm_sq = 0.0;         // ||u - Phi||^2
};

StepDiagnostics step_diagnostics(const VelocityField& f, double nu,
                                 const BackgroundParams* bp = nullptr);

/// Instantaneous dissipation nu ||grad u||^2 / |D|, second-order
/// differences with one-sided stencils at the walls.
double dissipation(const VelocityField& f, double nu);

}  // namespace shearlab::solver
