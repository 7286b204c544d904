// Python bindings for the main operations: OU sampling and moments, the
// background-layer calculus, the closed-form dissipation bounds, and
// single-trajectory simulation with its energy audit.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "shearlab/diagnostics.hpp"
#include "shearlab/harness.hpp"

namespace py = pybind11;
using namespace shearlab;

PYBIND11_MODULE(_shearlab, m) {
    m.doc() = "stochastic shear-flow laboratory: OU wall forcing, layer calculus, "
              "dissipation bounds, channel solver";

    py::class_<ou::OUParams>(m, "OUParams")
        .def(py::init([](double u, double theta, double sigma) {
                 ou::OUParams p{u, theta, sigma};
                 p.validate();
                 return p;
             }),
             py::arg("u"), py::arg("theta"), py::arg("sigma"))
        .def_readonly("u", &ou::OUParams::mean_speed)
        .def_readonly("theta", &ou::OUParams::reversion_rate)
        .def_readonly("sigma", &ou::OUParams::noise_amplitude)
        .def("stationary_variance", &ou::OUParams::stationary_variance);

    m.def(
        "exact_step",
        [](double x, double dt, const ou::OUParams& p, double xi) {
            return ou::exact_step(x, dt, p, xi);
        },
        py::arg("x"), py::arg("dt"), py::arg("params"), py::arg("xi"));

    m.def(
        "sample_path",
        [](const ou::OUParams& p, double t_end, double dt, std::uint64_t seed,
           const std::string& mode, py::object x0) {
            const auto path_mode = mode == "wiener" ? ou::PathMode::wiener : ou::PathMode::ou;
            ou::PathInitial init = x0.is_none()
                                       ? (path_mode == ou::PathMode::wiener
                                              ? ou::PathInitial::fixed(0.0)
                                              : ou::PathInitial::stationary())
                                       : ou::PathInitial::fixed(x0.cast<double>());
            const auto path = ou::sample_path_uniform(p, t_end, dt, seed, init, path_mode);
            return py::make_tuple(path.times, path.values, path.brownian_increments);
        },
        py::arg("params"), py::arg("t_end"), py::arg("dt"), py::arg("seed"),
        py::arg("mode") = "ou", py::arg("x0") = py::none(),
        "Sample one wall-speed path; returns (times, values, brownian_increments).");

    m.def(
        "stationary_moment",
        [](const ou::OUParams& p, int k) { return ou::stationary_moment(p, k); },
        py::arg("params"), py::arg("k"));
    m.def(
        "stationary_central_moment",
        [](const ou::OUParams& p, int k) { return ou::stationary_central_moment(p, k); },
        py::arg("params"), py::arg("k"));
    m.def(
        "quadratic_variation",
        [](const std::vector<double>& values) {
            ou::OUPath path;
            path.values = values;
            path.times.resize(values.size());
            for (std::size_t i = 0; i < values.size(); ++i)
                path.times[i] = static_cast<double>(i);
            return ou::quadratic_variation(path);
        },
        py::arg("values"), "Sum of squared increments of a sampled path.");

    // Background-layer calculus at the standard A = nu U, B = U^2 unless
    // (a, b) are supplied.
    auto bp_from = [](double nu, double u, double h, double l, py::object a, py::object b) {
        background::Geometry geom{l, h};
        if (a.is_none()) return background::BackgroundParams::standard(nu, u, geom);
        background::BackgroundParams bp;
        bp.a = a.cast<double>();
        bp.b = b.cast<double>();
        bp.geometry = geom;
        bp.validate();
        return bp;
    };
    m.def(
        "delta",
        [bp_from](double z, double nu, double u, double h, double l, py::object a, py::object b) {
            return background::delta(z, bp_from(nu, u, h, l, a, b));
        },
        py::arg("z"), py::arg("nu"), py::arg("u"), py::arg("h") = 1.0, py::arg("l") = 1.0,
        py::arg("a") = py::none(), py::arg("b") = py::none(),
        "Layer thickness A/(z^2 + B).");
    m.def(
        "phi",
        [bp_from](double x3, double z, double nu, double u, double h, double l, py::object a,
                  py::object b) { return background::phi(x3, z, bp_from(nu, u, h, l, a, b)); },
        py::arg("x3"), py::arg("z"), py::arg("nu"), py::arg("u"), py::arg("h") = 1.0,
        py::arg("l") = 1.0, py::arg("a") = py::none(), py::arg("b") = py::none());
    m.def(
        "f_derivatives",
        [bp_from](double z, double x3, double nu, double u, double h, double l, py::object a,
                  py::object b) {
            const auto d = background::f_derivatives(z, x3, bp_from(nu, u, h, l, a, b));
            return py::make_tuple(d.f, d.f_prime, d.f_double_prime);
        },
        py::arg("z"), py::arg("x3"), py::arg("nu"), py::arg("u"), py::arg("h") = 1.0,
        py::arg("l") = 1.0, py::arg("a") = py::none(), py::arg("b") = py::none());
    m.def(
        "int_fprime_sq",
        [bp_from](double z, double nu, double u, double h, double l, py::object a, py::object b) {
            return background::int_fprime_sq(z, bp_from(nu, u, h, l, a, b));
        },
        py::arg("z"), py::arg("nu"), py::arg("u"), py::arg("h") = 1.0, py::arg("l") = 1.0,
        py::arg("a") = py::none(), py::arg("b") = py::none());
    m.def(
        "grad_phi_norm_sq",
        [bp_from](double z, double nu, double u, double h, double l, py::object a, py::object b) {
            return background::grad_phi_norm_sq(z, bp_from(nu, u, h, l, a, b));
        },
        py::arg("z"), py::arg("nu"), py::arg("u"), py::arg("h") = 1.0, py::arg("l") = 1.0,
        py::arg("a") = py::none(), py::arg("b") = py::none());
    m.def(
        "delta_inequality_margin",
        [bp_from](double z, double nu, double u, double h, double l, py::object a, py::object b) {
            return background::delta_inequality_margin(z, bp_from(nu, u, h, l, a, b), nu);
        },
        py::arg("z"), py::arg("nu"), py::arg("u"), py::arg("h") = 1.0, py::arg("l") = 1.0,
        py::arg("a") = py::none(), py::arg("b") = py::none());

    // Closed-form bounds.
    auto flow_from = [](double u, double theta, double sigma, double nu, double h, double l) {
        return bounds::FlowConfig::standard(background::Geometry{l, h}, nu,
                                            ou::OUParams{u, theta, sigma});
    };
    m.def(
        "mean_bound",
        [flow_from](double u, double theta, double sigma, double nu, double h, double l) {
            return bounds::mean_bound(flow_from(u, theta, sigma, nu, h, l));
        },
        py::arg("u"), py::arg("theta"), py::arg("sigma"), py::arg("nu"), py::arg("h") = 1.0,
        py::arg("l") = 1.0);
    m.def(
        "second_moment_bound",
        [flow_from](double u, double theta, double sigma, double nu, double h, double l) {
            return bounds::second_moment_bound(flow_from(u, theta, sigma, nu, h, l));
        },
        py::arg("u"), py::arg("theta"), py::arg("sigma"), py::arg("nu"), py::arg("h") = 1.0,
        py::arg("l") = 1.0);
    m.def(
        "large_noise_bound",
        [flow_from](double u, double theta, double sigma, double nu, double h, double l) {
            return bounds::large_noise_bound(flow_from(u, theta, sigma, nu, h, l));
        },
        py::arg("u"), py::arg("theta"), py::arg("sigma"), py::arg("nu"), py::arg("h") = 1.0,
        py::arg("l") = 1.0);
    m.def(
        "expected_y_rate",
        [flow_from](double u, double theta, double sigma, double nu, double h, double l) {
            return bounds::expected_Y_rate(flow_from(u, theta, sigma, nu, h, l));
        },
        py::arg("u"), py::arg("theta"), py::arg("sigma"), py::arg("nu"), py::arg("h") = 1.0,
        py::arg("l") = 1.0);

    m.def(
        "gibbs_check",
        [](const std::function<double(double)>& potential,
           const std::function<double(double)>& gradient, double sigma, double lo, double hi,
           double t_end, double dt, std::uint64_t seed) {
            ou::GradientSystem g;
            g.potential = potential;
            g.gradient = gradient;
            g.noise_amplitude = sigma;
            g.window_lo = lo;
            g.window_hi = hi;
            const auto r = ou::gibbs_longrun_check(g, t_end, dt, seed);
            py::dict out;
            out["ks_distance"] = r.ks_distance;
            out["normalizing_constant"] = r.normalizing_constant;
            out["samples"] = r.occupation.total;
            return out;
        },
        py::arg("potential"), py::arg("gradient"), py::arg("sigma"), py::arg("window_lo"),
        py::arg("window_hi"), py::arg("t_end"), py::arg("dt"), py::arg("seed"));

    m.def(
        "simulate_trajectory",
        [flow_from](double u, double theta, double sigma, double nu, double h, double l, int n1,
                    int n2, int n3, double t_end, std::uint64_t seed, bool audit) {
            const auto cfg = flow_from(u, theta, sigma, nu, h, l);
            solver::GridSpec grid;
            grid.n1 = n1;
            grid.n2 = n2;
            grid.n3 = n3;
            solver::SimulateOptions opt;
            opt.record_audit = audit;
            const auto rec = solver::simulate_trajectory(cfg, grid, t_end, seed, opt);
            py::dict out;
            out["times"] = rec.times;
            out["wall_speed"] = rec.wall_speed;
            out["dissipation"] = rec.dissipation;
            out["energy"] = rec.energy;
            out["completed"] = rec.completed;
            out["dt"] = rec.dt;
            out["mean_dissipation"] = rec.completed ? rec.mean_dissipation() : 0.0;
            if (audit && rec.completed) {
                solver::GridSpec g2 = grid;
                const auto led = diag::energy_inequality_audit(rec, cfg, g2);
                py::dict audit_out;
                audit_out["slack"] = led.slack;
                audit_out["tolerance"] = led.tolerance;
                audit_out["martingale"] = led.martingale;
                audit_out["martingale_qv"] = led.martingale_qv;
                audit_out["qv_cap"] = led.qv_cap;
                audit_out["pass"] = led.pass;
                audit_out["qv_cap_pass"] = led.qv_cap_pass;
                out["audit"] = audit_out;
            }
            return out;
        },
        py::arg("u"), py::arg("theta"), py::arg("sigma"), py::arg("nu"), py::arg("h") = 1.0,
        py::arg("l") = 1.0, py::arg("n1") = 1, py::arg("n2") = 1, py::arg("n3") = 32,
        py::arg("t_end") = 1.0, py::arg("seed") = 0, py::arg("audit") = true,
        "Run one coupled wall+flow trajectory; returns the record as a dict.");

    m.attr("__version__") = harness::kCodeVersion;
}
