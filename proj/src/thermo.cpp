// thermo.cpp: battery indicators and asymptotic maxima.

#include "topobatt/thermo.hpp"

#include <algorithm>
#include <cmath>

#include "topobatt/errors.hpp"

namespace topobatt {

double stored_energy(cplx c_B, double omega_e)
{
    return omega_e * std::norm(c_B);
}

QubitState passive_state(const QubitState& rho)
{
    const double a = rho.rho(0, 0).real();
    const double d = rho.rho(1, 1).real();
    const double r = std::hypot(0.5 * (a - d), std::abs(rho.rho(0, 1)));
    QubitState out;
    out.rho.setZero();
    out.rho(1, 1) = 0.5 * (a + d) + r; // ground gets the larger weight
    out.rho(0, 0) = 0.5 * (a + d) - r;
    return out;
}

double ergotropy(const QubitState& rho, double omega_e)
{
    const double mean = omega_e * rho.rho(0, 0).real();
    const double passive = omega_e * passive_state(rho).rho(0, 0).real();
    return std::max(0.0, mean - passive);
}

std::vector<std::optional<double>> charging_power(std::span<const double> times,
                                                  std::span<const double> energy)
{
    if (times.size() != energy.size()) {
        throw ConfigError("time and energy series differ in length");
    }
    std::vector<std::optional<double>> p(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] > 0.0) {
            p[i] = energy[i] / times[i];
        }
    }
    return p;
}

IndicatorSeries indicators(const AmplitudeTrace& trace, double omega_e)
{
    IndicatorSeries s;
    s.times = trace.times;
    for (const cplx& c : trace.c_B) {
        const QubitState rho = reduced_battery_state(c);
        s.energy.push_back(stored_energy(c, omega_e));
        s.ergotropy.push_back(std::min(ergotropy(rho, omega_e), s.energy.back()));
    }
    s.power = charging_power(s.times, s.energy);
    return s;
}

PowerMaximum max_charging_power(std::span<const double> times, std::span<const double> energy)
{
    const auto power = charging_power(times, energy);
    std::size_t best = power.size();
    for (std::size_t i = 0; i < power.size(); ++i) {
        if (power[i] && (best == power.size() || *power[i] > *power[best])) {
            best = i;
        }
    }
    if (best == power.size()) {
        throw ConfigError("no sample with t > 0");
    }
    PowerMaximum m{times[best], *power[best]};
    if (best > 0 && best + 1 < power.size() && power[best - 1]) {
        const double t0 = times[best - 1], t1 = times[best], t2 = times[best + 1];
        const double p0 = *power[best - 1], p1 = *power[best], p2 = *power[best + 1];
        const double denom = (t0 - t1) * (t0 - t2) * (t1 - t2);
        const double a = (t2 * (p1 - p0) + t1 * (p0 - p2) + t0 * (p2 - p1)) / denom;
        const double b = (t2 * t2 * (p0 - p1) + t1 * t1 * (p2 - p0) + t0 * t0 * (p1 - p2)) / denom;
        if (a < 0.0) {
            const double tv = -b / (2.0 * a);
            if (tv > t0 && tv < t2) {
                const double c = p0 - a * t0 * t0 - b * t0;
                m = {tv, std::max(p1, a * tv * tv + b * tv + c)};
            }
        }
    }
    return m;
}

bool is_rational(double x, int max_denominator, double tol)
{
    for (int q = 1; q <= max_denominator; ++q) {
        if (std::abs(x * q - std::round(x * q)) <= tol * q) {
            return true;
        }
    }
    return false;
}

namespace {

double scan_maximum(const std::vector<BoundState>& poles, double J, const AsymptoticOptions& opt,
                    double& t_best)
{
    double emax = 0.0;
    for (const auto& p : poles) {
        emax = std::max(emax, std::abs(p.energy.real()));
    }
    const double dt = emax > 0.0 ? opt.scan_phase_step / emax : opt.scan_t_max / J;
    const auto steps = static_cast<long>(std::ceil(opt.scan_t_max / J / dt));

    // Phase rotation e^{-iE(t+dt)} = e^{-iEt} e^{-iE dt}, renormalised every
    // 1024 steps to keep roundoff bounded.
    std::vector<cplx> term(poles.size());
    std::vector<cplx> rot(poles.size());
    for (std::size_t b = 0; b < poles.size(); ++b) {
        term[b] = poles[b].residue;
        rot[b] = std::exp(cplx(0.0, -poles[b].energy.real() * dt));
    }
    auto value_at = [&](double t) {
        cplx s = 0.0;
        for (const auto& p : poles) {
            s += p.residue * std::exp(cplx(0.0, -p.energy.real() * t));
        }
        return std::norm(s);
    };
    double best = -1.0;
    long best_step = 0;
    for (long k = 0; k <= steps; ++k) {
        if (k % 1024 == 0) {
            const double t = k * dt;
            for (std::size_t b = 0; b < poles.size(); ++b) {
                term[b] = poles[b].residue * std::exp(cplx(0.0, -poles[b].energy.real() * t));
            }
        }
        cplx s = 0.0;
        for (const cplx& v : term) {
            s += v;
        }
        const double v = std::norm(s);
        if (v > best) {
            best = v;
            best_step = k;
        }
        for (std::size_t b = 0; b < poles.size(); ++b) {
            term[b] *= rot[b];
        }
    }
    // Golden-section refinement inside the neighbouring steps.
    double a = std::max(0.0, (best_step - 1) * dt);
    double c = (best_step + 1) * dt;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = c - phi * (c - a);
    double x2 = a + phi * (c - a);
    double f1 = value_at(x1);
    double f2 = value_at(x2);
    for (int it = 0; it < 80; ++it) {
        if (f1 > f2) {
            c = x2;
            x2 = x1;
            f2 = f1;
            x1 = c - phi * (c - a);
            f1 = value_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (c - a);
            f2 = value_at(x2);
        }
    }
    t_best = best_step * dt;
    const double refined = std::max(f1, f2);
    if (refined > best) {
        t_best = f1 > f2 ? x1 : x2;
        best = refined;
    }
    return best;
}

} // namespace

AsymptoticMaximum asymptotic_max_stored(std::span<const BoundState> all, double omega_e, double J,
                                        const AsymptoticOptions& options)
{
    std::vector<BoundState> poles;
    bool multiple = false;
    double sum = 0.0;
    for (const auto& p : all) {
        if (p.kind != PoleKind::coherent || std::abs(p.residue) <= options.residue_floor) {
            continue;
        }
        poles.push_back(p);
        sum += std::abs(p.residue);
        multiple = multiple || p.multiplicity > 1;
    }
    AsymptoticMaximum out;
    bool commensurate = multiple;
    if (!commensurate && poles.size() > 2) {
        // Only frequency differences matter for |c_B|^2.
        std::vector<double> w;
        for (std::size_t b = 1; b < poles.size(); ++b) {
            w.push_back(poles[b].energy.real() - poles[0].energy.real());
        }
        for (std::size_t i = 0; i < w.size() && !commensurate; ++i) {
            for (std::size_t j = i + 1; j < w.size() && !commensurate; ++j) {
                const double lo = std::min(std::abs(w[i]), std::abs(w[j]));
                const double hi = std::max(std::abs(w[i]), std::abs(w[j]));
                if (lo == 0.0 || is_rational(hi / lo, options.max_denominator, options.ratio_tol)) {
                    commensurate = true;
                }
            }
        }
    }
    if (!commensurate) {
        out.value = omega_e * sum * sum;
        return out;
    }
    out.commensurate = true;
    out.value = omega_e * scan_maximum(poles, J, options, out.scan_time);
    return out;
}

AsymptoticMaximum asymptotic_max_ergotropy(std::span<const BoundState> poles, double omega_e, double J,
                                           const AsymptoticOptions& options)
{
    AsymptoticMaximum m = asymptotic_max_stored(poles, 1.0, J, options);
    m.value = omega_e * std::max(0.0, 2.0 * m.value - 1.0);
    return m;
}

} // namespace topobatt
