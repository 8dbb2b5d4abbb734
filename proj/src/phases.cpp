// phases.cpp: phase boundaries, grid sweeps and kink detection.

#include "topobatt/phases.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <thread>

#include "topobatt/errors.hpp"

namespace topobatt {

namespace {

BoundaryValue boundary_from(double numerator, double denominator, double J)
{
    BoundaryValue v;
    if (denominator == 0.0) {
        v.divergent = true;
        return v;
    }
    const double radicand = numerator / denominator;
    if (!std::isfinite(radicand)) {
        v.divergent = true;
    } else if (radicand == 0.0) {
        v.degenerate = true;
    } else if (radicand > 0.0) {
        v.g = 2.0 * J * std::sqrt(radicand);
    }
    return v;
}

} // namespace

PhaseBoundaries phase_boundaries(double delta, int d, double J)
{
    if (std::abs(delta) > 1.0) {
        throw ConfigError("delta out of [-1,1]");
    }
    if (d == 0) {
        throw ConfigError("phase boundaries need a nonzero cell distance");
    }
    const double ad = std::abs(d);
    const double w = 1.0 - delta * delta;
    PhaseBoundaries b;
    b.l1 = boundary_from(delta * w, delta - 1.0 - 2.0 * ad * delta, J);
    b.l2 = boundary_from(w, delta - 1.0 + 2.0 * ad, J);
    return b;
}

double ergotropy_zero_curve(double delta, double J)
{
    return std::pow(2.0, 0.75) * J * std::sqrt(std::abs(delta));
}

double max_ergotropy_formula(double delta, double g, double J, double omega_e)
{
    if (!(std::abs(g) < ergotropy_zero_curve(delta, J))) {
        return 0.0;
    }
    const double J2 = J * J;
    const double g2 = g * g;
    const double den = 2.0 * J2 * std::abs(delta) + g2;
    return 0.5 * omega_e * (8.0 * J2 * J2 * delta * delta - g2 * g2) / (den * den);
}

std::vector<double> GridAxis::values() const
{
    if (count < 1) {
        throw ConfigError("grid axis needs at least one point");
    }
    if (count == 1) {
        return {lo};
    }
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) {
        v[i] = lo + (hi - lo) * i / (count - 1);
    }
    return v;
}

void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body)
{
    const auto workers = static_cast<std::size_t>(std::max(1, jobs));
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto run = [&] {
        for (std::size_t i = next++; i < n && !failed; i = next++) {
            try {
                body(i);
            } catch (...) {
                if (!failed.exchange(true)) {
                    failure = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back(run);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

PoleSet sweep_poles(const ModelConfig& config, double kappa, const ResolventOptions& options)
{
    if (kappa <= 0.0) {
        ModelConfig lossless = config;
        lossless.bath.kappa_a = 0.0;
        lossless.bath.kappa_b = 0.0;
        return find_coherent_bse(lossless, options);
    }
    const double values[] = {kappa};
    return continue_poles(config, values, options).front();
}

namespace {

enum class Indicator { stored, ergotropy };

PhaseGrid run_sweep(const GridSpec& grid, const ModelConfig& tmpl, const SweepOptions& options, Indicator kind)
{
    PhaseGrid out;
    out.delta_axis = grid.delta.values();
    out.g_axis = grid.g.values();
    const std::size_t nd = out.delta_axis.size();
    const std::size_t ng = out.g_axis.size();
    out.values.assign(nd * ng, std::numeric_limits<double>::quiet_NaN());
    out.n_bound.assign(nd * ng, -1);
    out.flags.assign(nd * ng, "");
    const double omega_e = tmpl.emitters.omega_e;

    parallel_for(nd * ng, options.jobs, [&](std::size_t idx) {
        ModelConfig c = tmpl;
        c.bath.delta = out.delta_axis[idx / ng];
        c.emitters.g = out.g_axis[idx % ng];
        try {
            const PoleSet poles = sweep_poles(c, options.kappa, options.resolvent);
            int coherent = 0;
            for (const auto& p : poles.poles) {
                coherent += p.kind == PoleKind::coherent ? p.multiplicity : 0;
            }
            const AsymptoticMaximum m = kind == Indicator::stored
                ? asymptotic_max_stored(poles.poles, omega_e, c.bath.J, options.asymptotic)
                : asymptotic_max_ergotropy(poles.poles, omega_e, c.bath.J, options.asymptotic);
            out.values[idx] = m.value;
            out.n_bound[idx] = coherent;
            if (m.commensurate) {
                out.flags[idx] = "commensurate";
            }
        } catch (const Error& e) {
            out.flags[idx] = std::string("error: ") + e.what();
        }
    });
    return out;
}

} // namespace

PhaseGrid mse_sweep(const GridSpec& grid, const ModelConfig& tmpl, const SweepOptions& options)
{
    PhaseGrid out = run_sweep(grid, tmpl, options, Indicator::stored);
    const int d = tmpl.emitters.cell_distance();
    const double J = tmpl.bath.J;
    for (double g : out.g_axis) {
        out.overlays.push_back({"l0", 0.0, g});
    }
    if (d != 0) {
        for (double delta : out.delta_axis) {
            const PhaseBoundaries b = phase_boundaries(delta, d, J);
            if (b.l1.g) {
                out.overlays.push_back({"l1", delta, *b.l1.g});
            }
            if (b.l2.g) {
                out.overlays.push_back({"l2", delta, *b.l2.g});
            }
        }
    }
    return out;
}

PhaseGrid max_ergotropy_sweep(const GridSpec& grid, const ModelConfig& tmpl, const SweepOptions& options)
{
    PhaseGrid out = run_sweep(grid, tmpl, options, Indicator::ergotropy);
    for (double g : out.g_axis) {
        out.overlays.push_back({"l0", 0.0, g});
    }
    for (double delta : out.delta_axis) {
        out.overlays.push_back({"zero", delta, ergotropy_zero_curve(delta, tmpl.bath.J)});
    }
    return out;
}

std::vector<double> detect_derivative_discontinuity(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size()) {
        throw ConfigError("scan coordinates and values differ in length");
    }
    if (x.size() < 5) {
        throw ConfigError("kink detection needs at least 5 samples");
    }
    const std::size_t n = y.size();
    std::vector<double> s(n, 0.0);
    std::vector<double> mags;
    double ymax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ymax = std::max(ymax, std::abs(y[i]));
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        s[i] = std::abs(y[i + 1] - 2.0 * y[i] + y[i - 1]);
        mags.push_back(s[i]);
    }
    std::nth_element(mags.begin(), mags.begin() + mags.size() / 2, mags.end());
    const double median = mags[mags.size() / 2];
    // Floor keeps roundoff in smooth or linear data from being flagged.
    const double threshold = std::max(10.0 * median, 1e-12 * (ymax + 1.0));

    std::vector<double> kinks;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (!(s[i] > threshold)) {
            ++i;
            continue;
        }
        std::size_t best = i;
        std::size_t last = i;
        std::size_t j = i + 1;
        while (j + 1 < n && j - last <= 2) {
            if (s[j] > threshold) {
                last = j;
                if (s[j] > s[best]) {
                    best = j;
                }
            }
            ++j;
        }
        kinks.push_back(x[best]);
        i = last + 1;
    }
    return kinks;
}

double winding_integral(double delta, double J, int samples)
{
    BathParams bath;
    bath.J = J;
    bath.delta = delta;
    double total = 0.0;
    double prev = std::arg(std::conj(coupling_fk(0.0, bath)));
    for (int i = 1; i <= samples; ++i) {
        const double k = 2.0 * std::numbers::pi * i / samples;
        const double cur = std::arg(std::conj(coupling_fk(k, bath)));
        double step = cur - prev;
        step -= 2.0 * std::numbers::pi * std::round(step / (2.0 * std::numbers::pi));
        total += step;
        prev = cur;
    }
    return total / (2.0 * std::numbers::pi);
}

int winding_number(double delta, double J)
{
    if (std::abs(delta) > 1.0) {
        throw ConfigError("delta out of [-1,1]");
    }
    if (delta == 0.0) {
        throw PreconditionError("gap closed, winding undefined");
    }
    const int by_sign = delta < 0.0 ? 1 : 0;
    const int numeric = static_cast<int>(std::lround(winding_integral(delta, J)));
    if (numeric != by_sign) {
        throw SolverError("numerical winding disagrees with the sign rule");
    }
    return by_sign;
}

} // namespace topobatt
