#include "shearlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace shearlab {
namespace {

// 15-point Kronrod abscissae on [-1, 1] (positive half) and weights,
// with the embedded 7-point Gauss weights. Standard QUADPACK values.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(c);
    double kronrod = kWgk[7] * fc;
    double gauss = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(c - dx) + f(c + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol, double abs_tol, int max_intervals) {
    QuadratureResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }

    std::priority_queue<Panel> panels;
    panels.push(gk15(f, a, b));
    result.evaluations = 15;
    double total = panels.top().value;
    double total_err = panels.top().error;

    int n_panels = 1;
    while (n_panels < max_intervals) {
        const double tol = std::max(abs_tol, rel_tol * std::abs(total));
        if (total_err <= tol) break;

        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        result.evaluations += 30;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++n_panels;
    }

    result.value = total;
    result.error_estimate = total_err;
    result.converged = total_err <= std::max(abs_tol, rel_tol * std::abs(total));
    return result;
}

}  // namespace shearlab
