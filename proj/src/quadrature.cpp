// quadrature.cpp: adaptive Gauss-Kronrod integration.

#include "topobatt/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace topobatt {

namespace {

// Kronrod abscissae (positive half, descending) and weights; the odd-indexed
// abscissae are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    std::complex<double> value;
    double error;
};

Panel gk15(const std::function<std::complex<double>(double)>& f, double a, double b)
{
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const std::complex<double> fc = f(c);
    std::complex<double> kronrod = fc * kWgk[7];
    std::complex<double> gauss = fc * kWg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kXgk[i];
        const std::complex<double> sum = f(c - dx) + f(c + dx);
        kronrod += kWgk[i] * sum;
        if (i % 2 == 1) {
            gauss += kWg[i / 2] * sum;
        }
    }
    return {a, b, kronrod * h, std::abs((kronrod - gauss) * h)};
}

struct ByError {
    bool operator()(const Panel& l, const Panel& r) const { return l.error < r.error; }
};

} // namespace

QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                    double a, double b, const QuadratureOptions& options)
{
    std::priority_queue<Panel, std::vector<Panel>, ByError> heap;
    double total_error = 0.0;
    const int n0 = std::max(1, options.initial_panels);
    for (int i = 0; i < n0; ++i) {
        const double lo = a + (b - a) * i / n0;
        const double hi = (i + 1 == n0) ? b : a + (b - a) * (i + 1) / n0;
        Panel p = gk15(f, lo, hi);
        total_error += p.error;
        heap.push(p);
    }
    int evaluations = 15 * n0;

    while (total_error > options.abs_tol && static_cast<int>(heap.size()) < options.max_panels) {
        Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Panel left = gk15(f, worst.a, mid);
        Panel right = gk15(f, mid, worst.b);
        evaluations += 30;
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.a < r.a; });

    QuadratureResult result;
    double error = 0.0;
    for (const auto& p : panels) {
        result.value += p.value;
        error += p.error;
    }
    result.error_estimate = error;
    result.evaluations = evaluations;
    result.converged = error <= options.abs_tol;
    return result;
}

} // namespace topobatt
