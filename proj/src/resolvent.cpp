// resolvent.cpp: pole function, bound-state search, residues and loss continuation.

#include "topobatt/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "topobatt/errors.hpp"

namespace topobatt {

std::string to_string(PoleKind k)
{
    return k == PoleKind::coherent ? "coherent" : "dissipative";
}

namespace {

Site battery_site(const ModelConfig& c) { return {c.emitters.x1, c.emitters.alpha}; }
Site charger_site(const ModelConfig& c) { return {c.emitters.x2, c.emitters.beta}; }

Site emitter_site(int index, const ModelConfig& c)
{
    if (index == 1) {
        return battery_site(c);
    }
    if (index == 2) {
        return charger_site(c);
    }
    throw ConfigError("emitter index must be 1 (battery) or 2 (charger)");
}

// The function whose zeros are searched. For same-site emitters
// D = (z - Delta - Omega - 2 S11)(z - Delta + Omega), and only the first
// (bright) factor needs a numerical search.
struct PoleEquation {
    const ModelConfig& config;
    GreensOptions greens;
    bool factored;

    PoleEquation(const ModelConfig& c, const GreensOptions& g)
        : config(c), greens(g), factored(c.emitters.same_site()) {}

    cplx operator()(cplx z) const
    {
        if (!factored) {
            return pole_function(z, config, greens);
        }
        const auto& e = config.emitters;
        return z - e.Delta - e.Omega - 2.0 * self_energy(1, 1, z, config, greens);
    }

    cplx full(cplx z) const
    {
        if (!factored) {
            return (*this)(z);
        }
        const auto& e = config.emitters;
        return (*this)(z) * (z - e.Delta + e.Omega);
    }
};

template <class F>
cplx central_difference(const F& f, cplx z, double h)
{
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

template <class F>
cplx richardson_derivative(const F& f, cplx z, double h)
{
    const cplx d1 = central_difference(f, z, h);
    const cplx d2 = central_difference(f, z, 0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

// Finite-difference step that keeps every stencil point off the spectrum.
double safe_step(cplx z, const ModelConfig& config, double h, double tol_spec)
{
    const double margin = spectrum_distance(z, config.bath) - tol_spec * config.bath.J;
    return std::min(h, 0.25 * std::max(margin, 0.0));
}

void sort_poles(std::vector<BoundState>& poles)
{
    std::sort(poles.begin(), poles.end(), [](const BoundState& l, const BoundState& r) {
        if (l.energy.real() != r.energy.real()) {
            return l.energy.real() < r.energy.real();
        }
        return l.energy.imag() < r.energy.imag();
    });
}

BoundState dark_pole(const ModelConfig& config)
{
    BoundState b;
    b.energy = config.emitters.Delta - config.emitters.Omega;
    b.residue = -0.5;
    b.multiplicity = 1;
    b.kind = PoleKind::coherent;
    b.dark = true;
    return b;
}

// With g = 0 the emitters decouple from the bath:
// D = (z - Delta)^2 - Omega12^2, residues +-1/2 at Delta +- Omega12.
PoleSet decoupled_poles(const ModelConfig& config)
{
    PoleSet set;
    const double omega12 = effective_direct_coupling(config);
    if (omega12 == 0.0) {
        return set;
    }
    const double delta = config.emitters.Delta;
    for (double sign : {-1.0, 1.0}) {
        BoundState b;
        b.energy = delta + sign * omega12;
        b.residue = sign * 0.5;
        set.poles.push_back(b);
    }
    set.report.roots_found = 2;
    sort_poles(set.poles);
    return set;
}

// Real-axis sample points on (lo, hi). Ends flagged as band edges get a
// geometric approach down to 1.01 tol_spec; interior spacing is scan_step.
std::vector<double> region_grid(double lo, double hi, bool lo_edge, bool hi_edge,
                                const ResolventOptions& opt, double J)
{
    std::vector<double> pts;
    const double step = opt.scan_step * J;
    const double closest = 1.01 * opt.greens.tol_spec * J;
    if (hi - lo <= 2.0 * closest) {
        return pts;
    }
    const double q = std::pow(10.0, 1.0 / 8.0);
    if (lo_edge) {
        for (double off = closest; off < step && lo + off < hi - closest; off *= q) {
            pts.push_back(lo + off);
        }
    }
    if (hi_edge) {
        for (double off = closest; off < step && hi - off > lo + closest; off *= q) {
            pts.push_back(hi - off);
        }
    }
    const int n = static_cast<int>(std::floor((hi - lo) / step));
    for (int k = lo_edge ? 1 : 0; k <= n; ++k) {
        const double x = lo + k * step;
        if (x >= hi - (hi_edge ? closest : 0.0)) {
            break;
        }
        pts.push_back(x);
    }
    if (!hi_edge) {
        pts.push_back(hi);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double bisect(const std::function<double(double)>& f, double a, double b, double fa, double tol,
              int& iterations)
{
    while (b - a > tol) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        ++iterations;
        if (fm == 0.0) {
            return m;
        }
        if ((fm < 0.0) == (fa < 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct Candidate {
    double z;
    bool from_minimum;
};

void scan_region(const PoleEquation& eq, const std::vector<double>& grid, const ResolventOptions& opt,
                 PoleSearchReport& report, std::vector<Candidate>& out)
{
    if (grid.size() < 2) {
        return;
    }
    auto freal = [&](double x) { return eq(cplx(x, 0.0)).real(); };
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        v[i] = freal(grid[i]);
    }
    report.brackets_scanned += static_cast<int>(grid.size()) - 1;
    const double tol = opt.bisect_tol * eq.config.bath.J;

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (v[i] == 0.0) {
            out.push_back({grid[i], false});
            continue;
        }
        if ((v[i] < 0.0) != (v[i + 1] < 0.0) && v[i + 1] != 0.0) {
            out.push_back({bisect(freal, grid[i], grid[i + 1], v[i], tol, report.refinement_iterations), false});
        }
    }
    if (!grid.empty() && v.back() == 0.0) {
        out.push_back({grid.back(), false});
    }

    // Touching zeros (double roots) and root pairs hidden inside one cell.
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const bool same_sign = (v[i - 1] < 0.0) == (v[i] < 0.0) && (v[i] < 0.0) == (v[i + 1] < 0.0);
        if (!same_sign || v[i] == 0.0) {
            continue;
        }
        if (!(std::abs(v[i]) <= std::abs(v[i - 1]) && std::abs(v[i]) <= std::abs(v[i + 1]))) {
            continue;
        }
        double a = grid[i - 1];
        double b = grid[i + 1];
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double c = b - phi * (b - a);
        double d = a + phi * (b - a);
        double fc = std::abs(freal(c));
        double fd = std::abs(freal(d));
        for (int it = 0; it < 200 && b - a > tol; ++it) {
            if (fc < fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - phi * (b - a);
                fc = std::abs(freal(c));
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + phi * (b - a);
                fd = std::abs(freal(d));
            }
            ++report.refinement_iterations;
        }
        double zmin = 0.5 * (a + b);
        // Polish the extremum with secant steps on F'.
        auto dfx = [&](double x) {
            const double h = safe_step(x, eq.config, 1e-5 * eq.config.bath.J, opt.greens.tol_spec);
            return h > 0.0 ? (freal(x + h) - freal(x - h)) / (2.0 * h) : 0.0;
        };
        double x0 = zmin - 1e-6;
        double x1 = zmin + 1e-6;
        double d0 = dfx(x0);
        double d1 = dfx(x1);
        for (int it = 0; it < 20 && d1 != d0; ++it) {
            const double x2 = x1 - d1 * (x1 - x0) / (d1 - d0);
            if (!(x2 > grid[i - 1] && x2 < grid[i + 1])) {
                break;
            }
            x0 = x1;
            d0 = d1;
            x1 = x2;
            d1 = dfx(x1);
            ++report.refinement_iterations;
            if (std::abs(x1 - x0) < tol) {
                break;
            }
        }
        if (std::abs(freal(x1)) < std::abs(freal(zmin))) {
            zmin = x1;
        }
        const double fmin = freal(zmin);
        if ((fmin < 0.0) != (v[i] < 0.0) && fmin != 0.0) {
            out.push_back({bisect(freal, grid[i - 1], zmin, v[i - 1], tol, report.refinement_iterations), false});
            out.push_back({bisect(freal, zmin, grid[i + 1], fmin, tol, report.refinement_iterations), false});
        } else if (std::abs(eq.full(zmin)) <= opt.accept_residual * eq.config.bath.J * eq.config.bath.J) {
            out.push_back({zmin, true});
        }
    }
}

int local_multiplicity(const PoleEquation& eq, double z, const ResolventOptions& opt)
{
    const double h1 = safe_step(z, eq.config, opt.fd_step * eq.config.bath.J, opt.greens.tol_spec);
    const double h2 = safe_step(z, eq.config, 1e-4 * eq.config.bath.J, opt.greens.tol_spec);
    auto f = [&](cplx x) { return eq(x); };
    const double d1 = std::abs(richardson_derivative(f, z, h1));
    const double d2 = std::abs((eq(z + h2) - 2.0 * eq(cplx(z)) + eq(z - h2)) / (h2 * h2));
    return d1 <= 1e-6 * (1.0 + d2) ? 2 : 1;
}

} // namespace

cplx self_energy(int m, int n, cplx z, const ModelConfig& config, const GreensOptions& options)
{
    const double g = config.emitters.g;
    if (g == 0.0) {
        return 0.0;
    }
    return g * g * greens(emitter_site(m, config), emitter_site(n, config), z, config.bath, options);
}

cplx pole_function(cplx z, const ModelConfig& config, const GreensOptions& options)
{
    const double delta = config.emitters.Delta;
    const double omega12 = effective_direct_coupling(config);
    const cplx s11 = self_energy(1, 1, z, config, options);
    const cplx s22 = self_energy(2, 2, z, config, options);
    const cplx s12 = self_energy(1, 2, z, config, options);
    return (z - delta - s11) * (z - delta - s22) - (omega12 + s12) * (omega12 + s12);
}

cplx amplitude_numerator(cplx z, const ModelConfig& config, const GreensOptions& options)
{
    return effective_direct_coupling(config) + self_energy(1, 2, z, config, options);
}

double scan_cutoff(const ModelConfig& config)
{
    const auto& e = config.emitters;
    return std::abs(e.Delta) + std::abs(e.Omega) + e.g + 4.0 * config.bath.J;
}

ResidueResult residue_at(cplx z0, int multiplicity, const ModelConfig& config,
                         const ResolventOptions& options)
{
    const GreensOptions& go = options.greens;
    auto D = [&](cplx z) { return pole_function(z, config, go); };
    auto N = [&](cplx z) { return amplitude_numerator(z, config, go); };
    const double J = config.bath.J;

    if (multiplicity == 1) {
        const double h = safe_step(z0, config, options.fd_step * J, options.greens.tol_spec);
        return {N(z0) / richardson_derivative(D, z0, h), 0.0};
    }
    if (multiplicity != 2) {
        throw SolverError("poles of multiplicity > 2 are not supported");
    }
    // D = a2 u^2 + a3 u^3 + ..., N = n0 + n1 u + ..., u = z - z0.
    const double h1 = safe_step(z0, config, options.fd_step * J, options.greens.tol_spec);
    const double h2 = safe_step(z0, config, 1e-4 * J, options.greens.tol_spec);
    const double h3 = safe_step(z0, config, 1e-3 * J, options.greens.tol_spec);
    const cplx n0 = N(z0);
    const cplx n1 = richardson_derivative(N, z0, h1);
    const cplx a2 = 0.5 * (D(z0 + h2) - 2.0 * D(z0) + D(z0 - h2)) / (h2 * h2);
    const cplx a3 = (D(z0 + 2.0 * h3) - 2.0 * D(z0 + h3) + 2.0 * D(z0 - h3) - D(z0 - 2.0 * h3))
                    / (12.0 * h3 * h3 * h3);
    if (std::abs(a2) == 0.0) {
        throw SolverError("double pole with vanishing second derivative of D");
    }
    ResidueResult r;
    r.secular = n0 / a2;
    r.residue = n1 / a2 - n0 * a3 / (a2 * a2);
    if (std::abs(r.secular) > options.secular_tol) {
        std::ostringstream msg;
        msg << "double pole at z = " << z0 << " has secular coefficient " << std::abs(r.secular);
        throw ModelInconsistencyError(msg.str());
    }
    return r;
}

PoleSet find_coherent_bse(const ModelConfig& input, const ResolventOptions& options)
{
    const ModelConfig config = validate(input);
    if (!config.bath.lossless()) {
        throw ConfigError("find_coherent_bse needs kappa_a = kappa_b = 0");
    }
    if (config.emitters.g == 0.0) {
        return decoupled_poles(config);
    }

    PoleSet set;
    const PoleEquation eq(config, options.greens);
    const BandEdges bands = band_edges(config.bath);
    const double J = config.bath.J;
    const double zmax = scan_cutoff(config);

    std::vector<Candidate> candidates;
    if (bands.inner() > 0.0) {
        scan_region(eq, region_grid(-bands.inner(), bands.inner(), true, true, options, J), options,
                    set.report, candidates);
    }
    scan_region(eq, region_grid(bands.outer(), zmax, true, false, options, J), options, set.report,
                candidates);
    scan_region(eq, region_grid(-zmax, -bands.outer(), false, true, options, J), options, set.report,
                candidates);

    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& l, const Candidate& r) { return l.z < r.z; });

    // Merge candidates closer than merge_tol; the derivative test decides the
    // multiplicity of the merged root.
    std::size_t i = 0;
    while (i < candidates.size()) {
        std::size_t j = i + 1;
        double sum = candidates[i].z;
        while (j < candidates.size() && candidates[j].z - candidates[j - 1].z < options.merge_tol * J) {
            sum += candidates[j].z;
            ++j;
        }
        const double z0 = sum / double(j - i);
        i = j;

        // Near a band edge D is steep, so the bound includes the slope times
        // the bisection tolerance.
        const double residual = std::abs(eq.full(z0));
        const double h = safe_step(z0, config, options.fd_step * J, options.greens.tol_spec);
        const double slope = h > 0.0 ? std::abs(central_difference([&](cplx x) { return eq.full(x); }, z0, h)) : 0.0;
        if (residual > options.accept_residual * J * J + 10.0 * slope * options.bisect_tol * J) {
            std::ostringstream msg;
            msg << "rejected root candidate at " << z0 << " with |D| = " << residual;
            set.report.warnings.push_back(msg.str());
            continue;
        }
        set.report.max_residual = std::max(set.report.max_residual, residual);

        BoundState b;
        b.energy = z0;
        b.multiplicity = local_multiplicity(eq, z0, options);
        b.residue = residue_at(z0, b.multiplicity, config, options).residue;
        b.kind = PoleKind::coherent;
        set.poles.push_back(b);
    }

    if (config.emitters.same_site()) {
        set.poles.push_back(dark_pole(config));
    }
    set.report.roots_found = static_cast<int>(set.poles.size());
    sort_poles(set.poles);
    return set;
}

namespace {

// |D| acceptance bound. D grows like z^2, so far from the bands (large loss)
// the bound scales with |z|^2 to stay above roundoff.
double residual_bound(cplx z, double J, const ResolventOptions& opt)
{
    const double scale = std::max(1.0, std::norm(z) / (J * J));
    return opt.accept_residual * J * J * scale;
}

ModelConfig with_loss(const ModelConfig& c, double ua, double ub, double kappa)
{
    ModelConfig out = c;
    out.bath.kappa_a = ua * kappa;
    out.bath.kappa_b = ub * kappa;
    return out;
}

// Damped Newton on F(z) / prod_l (z - fixed_l). Returns false on divergence.
bool deflated_newton(const PoleEquation& eq, const std::vector<cplx>& fixed, cplx& z,
                     const ResolventOptions& opt, int& iterations)
{
    const double J = eq.config.bath.J;
    auto deflated = [&](cplx x) {
        cplx value = eq(x);
        for (const cplx& r : fixed) {
            value /= (x - r);
        }
        return value;
    };
    try {
        for (int it = 0; it < 80; ++it) {
            ++iterations;
            const double h = 1e-7 * (J + std::abs(z));
            const cplx f = deflated(z);
            const cplx df = central_difference(deflated, z, h);
            if (!std::isfinite(std::abs(df)) || std::abs(df) == 0.0) {
                return false;
            }
            cplx dz = f / df;
            const double cap = 0.5 * J + 0.1 * std::abs(z);
            if (std::abs(dz) > cap) {
                dz *= cap / std::abs(dz);
            }
            z -= dz;
            if (std::abs(dz) <= 1e-14 * (J + std::abs(z))) {
                break;
            }
        }
        return std::abs(eq.full(z)) <= residual_bound(z, J, opt);
    } catch (const OnSpectrumError&) {
        return false;
    }
}

struct Track {
    cplx z;
    cplx velocity{0.0}; // dz / dkappa from the last accepted step
};

} // namespace

std::vector<PoleSet> continue_poles(const ModelConfig& input, std::span<const double> kappa_values,
                                    const ResolventOptions& options)
{
    const ModelConfig config = validate(input);
    for (std::size_t i = 0; i < kappa_values.size(); ++i) {
        if (kappa_values[i] < 0.0 || (i > 0 && kappa_values[i] < kappa_values[i - 1])) {
            throw ConfigError("kappa samples must be ascending and non-negative");
        }
    }
    // Direction of the loss vector; a lossless config continues along kappa_a.
    const double kmax = std::max(config.bath.kappa_a, config.bath.kappa_b);
    const double ua = kmax > 0.0 ? config.bath.kappa_a / kmax : 1.0;
    const double ub = kmax > 0.0 ? config.bath.kappa_b / kmax : 0.0;
    const double J = config.bath.J;

    std::vector<PoleSet> result;
    if (config.emitters.g == 0.0) {
        for (double kappa : kappa_values) {
            (void)kappa;
            result.push_back(decoupled_poles(config));
        }
        return result;
    }

    const ModelConfig lossless = with_loss(config, ua, ub, 0.0);
    const PoleSet seeds = find_coherent_bse(lossless, options);
    std::vector<Track> tracks;
    for (const auto& p : seeds.poles) {
        if (p.dark) {
            continue;
        }
        for (int m = 0; m < p.multiplicity; ++m) {
            tracks.push_back({p.energy});
        }
    }

    double kappa = 0.0;
    int iterations = 0;
    for (double target : kappa_values) {
        double ds = std::min(options.kappa_step * J, target - kappa);
        while (kappa < target) {
            ds = std::min(ds, target - kappa);
            const double next = (target - kappa - ds < 1e-12 * J) ? target : kappa + ds;
            const ModelConfig step_config = with_loss(config, ua, ub, next);
            const PoleEquation eq(step_config, options.greens);

            bool ok = true;
            std::vector<cplx> solved;
            std::vector<cplx> velocities;
            for (const auto& t : tracks) {
                const double dk = next - kappa;
                cplx z = t.z + t.velocity * dk;
                bool converged = deflated_newton(eq, solved, z, options, iterations);
                if (!converged || std::abs(z - t.z) > 0.5 * J + 2.0 * dk) {
                    z = t.z;
                    converged = deflated_newton(eq, solved, z, options, iterations);
                }
                if (!converged || std::abs(z - t.z) > 0.5 * J + 2.0 * dk) {
                    ok = false;
                    break;
                }
                solved.push_back(z);
                velocities.push_back((z - t.z) / dk);
            }
            if (!ok) {
                ds *= 0.5;
                if (ds < options.kappa_step * J / 1024.0) {
                    std::ostringstream msg;
                    msg << "pole continuation lost a root between kappa = " << kappa << " and kappa = "
                        << kappa + 2.0 * ds;
                    throw SolverError(msg.str());
                }
                continue;
            }
            for (std::size_t i = 0; i < tracks.size(); ++i) {
                tracks[i].z = solved[i];
                tracks[i].velocity = velocities[i];
            }
            kappa = next;
            ds = std::min(2.0 * ds, options.kappa_step * J);
        }

        // Snapshot at this kappa.
        const ModelConfig at = with_loss(config, ua, ub, kappa);
        PoleSet set;
        set.report.refinement_iterations = iterations;
        std::vector<cplx> zs;
        for (const auto& t : tracks) {
            zs.push_back(t.z);
        }
        std::sort(zs.begin(), zs.end(), [](cplx l, cplx r) {
            return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
        });
        std::vector<bool> used(zs.size(), false);
        const PoleEquation eq(at, options.greens);
        for (std::size_t i = 0; i < zs.size(); ++i) {
            if (used[i]) {
                continue;
            }
            BoundState b;
            b.energy = zs[i];
            for (std::size_t j = i + 1; j < zs.size(); ++j) {
                if (!used[j] && std::abs(zs[j] - zs[i]) < options.dissipative_merge_tol * J) {
                    used[j] = true;
                    ++b.multiplicity;
                }
            }
            if (std::abs(b.energy.imag()) <= options.tol_im * J) {
                b.energy = b.energy.real();
            }
            b.kind = std::abs(b.energy.imag()) <= options.tol_im * J ? PoleKind::coherent : PoleKind::dissipative;
            b.residue = residue_at(b.energy, b.multiplicity, at, options).residue;
            set.report.max_residual = std::max(set.report.max_residual, std::abs(eq.full(b.energy)));
            set.poles.push_back(b);
        }
        if (at.emitters.same_site()) {
            set.poles.push_back(dark_pole(at));
        }
        set.report.roots_found = static_cast<int>(set.poles.size());
        sort_poles(set.poles);
        result.push_back(std::move(set));
    }
    return result;
}

PoleSet find_dissipative_poles(const ModelConfig& input, const ResolventOptions& options)
{
    const ModelConfig config = validate(input);
    if (config.bath.lossless()) {
        return find_coherent_bse(config, options);
    }
    const double kmax = std::max(config.bath.kappa_a, config.bath.kappa_b);
    const double values[] = {kmax};
    return continue_poles(config, values, options).front();
}

cplx long_time_amplitude(double t, std::span<const BoundState> poles, bool include_decaying)
{
    cplx sum = 0.0;
    for (const auto& p : poles) {
        if (p.kind == PoleKind::coherent || include_decaying) {
            sum += p.residue * std::exp(cplx(0.0, -1.0) * p.energy * t);
        }
    }
    return sum;
}

} // namespace topobatt
