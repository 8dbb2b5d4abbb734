// quadrature.hpp: globally adaptive Gauss-Kronrod (7/15) for complex integrands.

#pragma once

#include <complex>
#include <functional>

namespace topobatt {

struct QuadratureResult {
    std::complex<double> value;
    double error_estimate{0.0};
    int evaluations{0};
    bool converged{false};
};

struct QuadratureOptions {
    double abs_tol{1e-10};
    int initial_panels{8};
    int max_panels{4096};
};

/// Repeatedly bisects the panel with the largest |K15 - G7| until the summed
/// estimate drops below abs_tol. Panels are summed in left-to-right order, so
/// the result is bitwise reproducible.
QuadratureResult integrate_adaptive(const std::function<std::complex<double>(double)>& f,
                                    double a, double b,
                                    const QuadratureOptions& options = {});

} // namespace topobatt
