// phases.hpp: analytic phase boundaries, the closed-form maximum ergotropy,
// (delta, g) sweeps of long-time indicators and kink detection.

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topobatt/resolvent.hpp"
#include "topobatt/thermo.hpp"

namespace topobatt {

struct BoundaryValue {
    std::optional<double> g; // |g| on the curve, when present
    bool degenerate{false};  // radicand exactly zero (curve pinned to g = 0)
    bool divergent{false};   // zero denominator
};

struct PhaseBoundaries {
    BoundaryValue l1;
    BoundaryValue l2;
};

/// l1: |g| = 2J sqrt(delta (1 - delta^2) / (delta - 1 - 2|d| delta)),
/// l2: |g| = 2J sqrt((1 - delta^2) / (delta - 1 + 2|d|)).
/// A curve is present only for a finite, strictly positive radicand.
PhaseBoundaries phase_boundaries(double delta, int d, double J = 1.0);

/// (omega_e/2)(8 J^4 delta^2 - g^4) / (2 J^2 |delta| + g^2)^2 for
/// |g| < 2^{3/4} J sqrt|delta|, and 0 otherwise.
double max_ergotropy_formula(double delta, double g, double J = 1.0, double omega_e = 1.0);

/// g on the zero-ergotropy curve, 2^{3/4} J sqrt|delta|.
double ergotropy_zero_curve(double delta, double J = 1.0);

struct GridAxis {
    double lo{0.0};
    double hi{0.0};
    int count{1};
    std::vector<double> values() const;
};

struct GridSpec {
    GridAxis delta{-0.99, 0.99, 100};
    GridAxis g{0.02, 2.0, 100};
};

struct OverlayPoint {
    std::string curve; // "l0", "l1", "l2" or "zero"
    double delta{0.0};
    double g{0.0};
};

struct PhaseGrid {
    std::vector<double> delta_axis;
    std::vector<double> g_axis;
    std::vector<double> values;      // delta-major: values[i * g_axis.size() + j]; NaN when missing
    std::vector<int> n_bound;        // coherent poles found, -1 when missing
    std::vector<std::string> flags;  // "" or ';'-joined notes (commensurate, error text)
    std::vector<OverlayPoint> overlays;

    std::size_t at(std::size_t i, std::size_t j) const { return i * g_axis.size() + j; }
};

struct SweepOptions {
    int jobs{1};
    double kappa{0.0}; // loss along the template's (kappa_a, kappa_b) direction, or kappa_a if lossless
    ResolventOptions resolvent;
    AsymptoticOptions asymptotic;
};

/// Maximum stored energy over the grid; the template supplies everything but
/// delta and g.
PhaseGrid mse_sweep(const GridSpec& grid, const ModelConfig& config_template, const SweepOptions& options = {});

/// Maximum ergotropy over the grid for same-cavity emitters. For kappa > 0
/// the real (coherent) subset of the continued poles is used.
PhaseGrid max_ergotropy_sweep(const GridSpec& grid, const ModelConfig& config_template,
                              const SweepOptions& options = {});

/// Poles used by the sweeps at a single parameter point.
PoleSet sweep_poles(const ModelConfig& config, double kappa, const ResolventOptions& options = {});

/// Locations where |centred second difference| exceeds 10x its median over
/// the scan (with a roundoff floor), merged within two grid steps. Throws
/// ConfigError for fewer than 5 samples.
std::vector<double> detect_derivative_discontinuity(std::span<const double> x, std::span<const double> y);

/// 1 for delta < 0, 0 for delta > 0, checked against the numerical winding of
/// conj(f_k) around the origin. Throws PreconditionError at delta = 0.
int winding_number(double delta, double J = 1.0);

/// (1/2pi) times the total phase change of conj(f_k) over k in [0, 2pi].
double winding_integral(double delta, double J = 1.0, int samples = 4096);

/// Runs body(i) for i in [0, n) on up to jobs threads.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body);

} // namespace topobatt
