// acceptance.cpp: end-to-end acceptance gate, one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "topobatt/csv.hpp"
#include "topobatt/errors.hpp"
#include "topobatt/phases.hpp"
#include "topobatt/thermo.hpp"
#include "topobatt/zeno.hpp"

using namespace topobatt;

namespace {

struct Outcome {
    bool pass{false};
    std::string detail;
};

class Detail {
public:
    template <typename T>
    Detail& operator()(const std::string& key, const T& value)
    {
        if (!out_.str().empty()) {
            out_ << ' ';
        }
        out_ << key << '=' << value;
        return *this;
    }
    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string sci(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Battery on B of cell 0, charger on A of cell -d.
ModelConfig split_cells(double delta, double g, int d)
{
    ModelConfig c;
    c.bath.delta = delta;
    c.emitters.g = g;
    c.emitters.x2 = -d;
    c.emitters.alpha = Sublattice::B;
    c.emitters.beta = Sublattice::A;
    return c;
}

// Both emitters on A of cell 0, Delta = -Omega = J, loss on sublattice A.
ModelConfig same_cavity(double delta, double g, double kappa)
{
    ModelConfig c;
    c.bath.delta = delta;
    c.bath.kappa_a = kappa;
    c.emitters.g = g;
    c.emitters.Delta = 1.0;
    c.emitters.Omega = -1.0;
    return c;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
        v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    }
    return v;
}

int coherent_count(const ModelConfig& c)
{
    int n = 0;
    for (const auto& p : find_coherent_bse(c).poles) {
        n += p.multiplicity;
    }
    return n;
}

double mse(const ModelConfig& c)
{
    return asymptotic_max_stored(find_coherent_bse(c).poles, c.emitters.omega_e).value / c.emitters.omega_e;
}

// Traces collected by the dynamics criteria, checked again by the property suite.
std::vector<AmplitudeTrace> g_traces;

Outcome rabi_limit()
{
    ModelConfig c;
    c.emitters.g = 0.0;
    c.emitters.Omega = 1.0;
    c.emitters.Delta = 0.0;
    const auto start = std::chrono::steady_clock::now();
    const auto times = uniform_times(20.0, 0.01);
    const AmplitudeTrace tr = evolve_finite(c, 0, Boundary::periodic, times);
    const double elapsed = seconds_since(start);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        worst = std::max(worst, std::abs(std::abs(tr.c_B[i]) - std::abs(std::sin(tr.times[i]))));
    }
    g_traces.push_back(tr);
    return {worst <= 1e-9 && elapsed < 1.0, Detail()("max_err", sci(worst))("seconds", sci(elapsed)).str()};
}

Outcome greens_oracle()
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const Sublattice subs[] = {Sublattice::A, Sublattice::B};
    GreensOptions quad;
    quad.method = GreensMethod::quadrature;
    double worst = 0.0;
    int lossy = 0;
    int samples = 0;
    while (samples < 20) {
        BathParams b;
        b.delta = -0.9 + 1.8 * unit(rng);
        if (samples % 3 == 0) {
            b.kappa_a = 0.5 * unit(rng);
            b.kappa_b = 0.5 * unit(rng);
        }
        const cplx z(-3.0 + 6.0 * unit(rng), samples % 4 == 1 ? 0.2 * unit(rng) : 0.0);
        if (spectrum_distance(z, b) < 0.05 * b.J) {
            continue;
        }
        const Site m{static_cast<int>(unit(rng) * 7) - 3, subs[rng() % 2]};
        const Site n{static_cast<int>(unit(rng) * 7) - 3, subs[rng() % 2]};
        const FiniteLattice lat = build_finite_lattice(400, Boundary::periodic, b);
        const cplx exact = greens_function_finite(m, n, z, lat);
        worst = std::max(worst, std::abs(greens(m, n, z, b, quad) - exact));
        lossy += b.kappa_a + b.kappa_b > 0.0;
        ++samples;
    }
    const double elapsed = seconds_since(start);
    return {worst <= 1e-6 && lossy > 0 && elapsed < 10.0,
            Detail()("max_diff", sci(worst))("lossy_samples", lossy)("seconds", sci(elapsed)).str()};
}

Outcome pole_sum_vs_evolution()
{
    const ModelConfig c = split_cells(0.5, 1.0, -1);
    const PoleSet poles = find_coherent_bse(c);
    const double t[] = {30.0, 40.0, 50.0};
    const AmplitudeTrace tr = evolve_finite(c, 0, Boundary::periodic, t);
    double worst = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i) {
        worst = std::max(worst, std::abs(std::abs(tr.c_B[i]) - std::abs(long_time_amplitude(t[i], poles.poles))));
    }
    return {worst <= 1e-2 && tr.times.size() == 3, Detail()("max_diff", sci(worst))("cells", tr.cells).str()};
}

Outcome boundaries()
{
    struct Scan {
        double delta;
        int d;
        double expected;
        bool upper;
    };
    const Scan scans[] = {{-0.5, -1, 1.73205, false}, {0.5, -2, 0.92582, true}};
    const double step = 1e-3;
    bool pass = true;
    Detail detail;
    for (const Scan& s : scans) {
        const PhaseBoundaries pb = phase_boundaries(s.delta, s.d);
        const double formula = *(s.upper ? pb.l2.g : pb.l1.g);
        std::vector<double> g, y;
        std::vector<int> count;
        // Grid on multiples of the step around the expected value.
        const long centre = std::lround(s.expected / step);
        for (long i = centre - 60; i <= centre + 60; ++i) {
            g.push_back(i * step);
            const ModelConfig c = split_cells(s.delta, g.back(), s.d);
            count.push_back(coherent_count(c));
            y.push_back(mse(c));
        }
        std::optional<double> change;
        for (std::size_t i = 1; i < g.size() && !change; ++i) {
            if (count[i] != count[i - 1]) {
                change = 0.5 * (g[i] + g[i - 1]);
            }
        }
        const auto kinks = detect_derivative_discontinuity(g, y);
        double kink_gap = INFINITY;
        for (double k : kinks) {
            kink_gap = std::min(kink_gap, std::abs(k - s.expected));
        }
        const double change_gap = change ? std::abs(*change - s.expected) : INFINITY;
        pass = pass && std::abs(formula - s.expected) <= 1e-5 && change_gap <= step * (1.0 + 1e-9) && kink_gap <= step * (1.0 + 1e-9);
        const std::string tag = "d" + std::to_string(s.d);
        detail(tag + "_change_err", sci(change_gap))(tag + "_kink_err", sci(kink_gap));
    }
    return {pass, detail.str()};
}

Outcome degenerate_zero()
{
    bool pass = true;
    double worst_res = 0.0;
    double worst_sec = 0.0;
    for (double delta : {0.2, 0.5, 0.8}) {
        const ModelConfig c = split_cells(delta, 1.0, -1);
        const PoleSet s = find_coherent_bse(c);
        bool found = false;
        for (const auto& p : s.poles) {
            if (std::abs(p.energy) <= 1e-8) {
                found = true;
                const ResidueResult r = residue_at(p.energy, p.multiplicity, c);
                worst_res = std::max(worst_res, std::abs(p.residue));
                worst_sec = std::max(worst_sec, std::abs(r.secular));
            }
        }
        pass = pass && found;
    }
    pass = pass && worst_res <= 1e-8 && worst_sec <= 1e-8;
    return {pass, Detail()("max_res", sci(worst_res))("max_secular", sci(worst_sec)).str()};
}

Outcome max_ergotropy_closed_form()
{
    const auto start = std::chrono::steady_clock::now();
    GridSpec grid;
    grid.delta = {-0.9, 0.9, 11};
    grid.g = {0.2, 2.0, 11};
    std::vector<PhaseGrid> runs;
    for (double kappa : {0.0, 0.5, 1.0}) {
        SweepOptions opt;
        opt.kappa = kappa;
        runs.push_back(max_ergotropy_sweep(grid, same_cavity(0.0, 1.0, 0.0), opt));
    }
    const double elapsed = seconds_since(start);
    double dev[3] = {0.0, 0.0, 0.0};
    double spread = 0.0;
    int missing = 0;
    const PhaseGrid& ref = runs.front();
    for (std::size_t i = 0; i < ref.delta_axis.size(); ++i) {
        for (std::size_t j = 0; j < ref.g_axis.size(); ++j) {
            const std::size_t k = ref.at(i, j);
            const double formula = max_ergotropy_formula(ref.delta_axis[i], ref.g_axis[j]);
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const double v = runs[r].values[k];
                if (std::isnan(v)) {
                    ++missing;
                    continue;
                }
                dev[r] = std::max(dev[r], std::abs(v - formula));
                spread = std::max(spread, std::abs(v - ref.values[k]));
            }
        }
    }
    const bool pass = missing == 0 && std::max({dev[0], dev[1], dev[2]}) <= 1e-3 && spread <= 1e-6 && elapsed < 300.0;
    return {pass, Detail()("dev_k0", sci(dev[0]))("dev_k0.5", sci(dev[1]))("dev_k1", sci(dev[2]))(
                      "kappa_spread", sci(spread))("missing", missing)("seconds", sci(elapsed))
                      .str()};
}

Outcome dark_state()
{
    double worst = 0.0;
    bool pass = true;
    for (double kappa : {0.0, 1.0, 5.0}) {
        const DarkStateCheck d = dark_state_check(same_cavity(0.9, 1.0, kappa), 200);
        worst = std::max(worst, d.residual);
        pass = pass && d.protected_state;
    }
    ModelConfig apart = same_cavity(0.9, 1.0, 0.0);
    apart.emitters.x2 = 1;
    const DarkStateCheck split = dark_state_check(apart, 200);
    pass = pass && worst <= 1e-12 && split.residual > 0.1 * apart.emitters.g;
    return {pass, Detail()("max_residual", sci(worst))("apart_residual", sci(split.residual)).str()};
}

Outcome vdbs()
{
    bool pass = true;
    double worst = 0.0;
    for (double kappa : {0.0, 1.0}) {
        const auto v = vdbs_find(same_cavity(0.9, 1.0, kappa), 200);
        pass = pass && v.has_value();
        if (v) {
            worst = std::max(worst, std::abs(v->energy));
        }
    }
    ModelConfig detuned = same_cavity(0.9, 1.0, 0.0);
    detuned.emitters.Omega = 1.0;
    const bool absent = !vdbs_find(detuned, 200);
    pass = pass && absent && worst <= 1e-10;
    return {pass, Detail()("max_energy", sci(worst))("absent_when_detuned", absent ? "yes" : "no").str()};
}

Outcome zeno_poles()
{
    const ModelConfig c = same_cavity(0.9, 1.0, 0.0);
    const double E0 = coherent_pair_E0(c).E0;
    const double q = kappa_qze(E0);
    const double R0 = reference_residue(c, E0);

    std::vector<double> near = linspace(0.0, 2.0 * q, 21);
    std::vector<double> far;
    for (double m : linspace(std::log(5.0), std::log(50.0), 10)) {
        far.push_back(q * std::exp(m));
    }
    std::vector<double> kappas = near;
    kappas.insert(kappas.end(), far.begin(), far.end());
    kappas.push_back(20.0 * q);
    std::sort(kappas.begin(), kappas.end());
    const auto sets = continue_poles(c, kappas);

    double worst_energy = 0.0;
    std::vector<double> lk, lim;
    double res_slow_err = INFINITY;
    double res_fast_err = INFINITY;
    bool labelled = true;
    for (std::size_t i = 0; i < kappas.size(); ++i) {
        const auto pair = slow_fast_poles(sets[i].poles);
        if (!pair) {
            labelled = false;
            continue;
        }
        const double k = kappas[i];
        if (k <= 2.0 * q + 1e-12) {
            const ZenoPair f = dissipative_energies_formula(k, E0);
            worst_energy = std::max({worst_energy, std::abs(pair->first.energy - f.slow),
                                     std::abs(pair->second.energy - f.fast)});
        }
        if (k >= 5.0 * q - 1e-9 && k <= 50.0 * q + 1e-9) {
            lk.push_back(std::log(k));
            lim.push_back(std::log(-pair->first.energy.imag()));
        }
        if (std::abs(k - 20.0 * q) <= 1e-12 * q) {
            const ResiduePair r = residue_asymptotics(k, E0, R0);
            res_slow_err = std::abs(std::abs(pair->first.residue) / std::abs(r.slow) - 1.0);
            res_fast_err = std::abs(std::abs(pair->second.residue) / std::abs(r.fast) - 1.0);
        }
    }
    double slope = NAN;
    if (lk.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lk.size(); ++i) {
            mx += lk[i];
            my += lim[i];
        }
        mx /= lk.size();
        my /= lk.size();
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < lk.size(); ++i) {
            sxy += (lk[i] - mx) * (lim[i] - my);
            sxx += (lk[i] - mx) * (lk[i] - mx);
        }
        slope = sxy / sxx;
    }
    const bool pass = labelled && worst_energy <= 1e-2 && std::abs(slope + 1.0) <= 0.1 && res_slow_err <= 0.05 &&
                      res_fast_err <= 0.05;
    return {pass, Detail()("max_energy_err", sci(worst_energy))("slope", sci(slope))("res_slow_err", sci(res_slow_err))(
                      "res_fast_err", sci(res_fast_err))
                      .str()};
}

Outcome zeno_power()
{
    const ModelConfig c = same_cavity(0.9, 1.0, 0.0);
    const double E0 = coherent_pair_E0(c).E0;
    const double q = kappa_qze(E0);
    const double multiples[] = {0.5, 1.0, 2.0, 4.0, 8.0};
    std::vector<double> kappas;
    for (double m : multiples) {
        kappas.push_back(m * q);
    }
    const ZenoReport report = max_power_vs_kappa(kappas, c);
    bool pass = true;
    Detail detail;
    std::string powers;
    double prev = -INFINITY;
    for (std::size_t i = 0; i < report.points.size(); ++i) {
        const ZenoPoint& p = report.points[i];
        pass = pass && p.error.empty();
        powers += (powers.empty() ? "" : ",") + sci(p.max_power);
        if (multiples[i] > 1.0) {
            pass = pass && p.max_power > prev;
            prev = p.max_power;
        }
    }
    detail("max_power", powers);

    std::vector<double> t;
    for (int n = 1; n <= 5; ++n) {
        t.push_back(2.0 * std::numbers::pi * n / E0);
    }
    const AmplitudeTrace closed = evolve_finite(c, 0, Boundary::periodic, t);
    const AmplitudeTrace lossy = evolve_finite(same_cavity(0.9, 1.0, 10.0 * q), 0, Boundary::periodic, t);
    g_traces.push_back(closed);
    g_traces.push_back(lossy);
    double worst = 0.0;
    int worst_n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double diff = std::abs(std::abs(closed.c_B[i]) - std::abs(lossy.c_B[i]));
        if (diff > worst) {
            worst = diff;
            worst_n = static_cast<int>(i) + 1;
        }
    }
    pass = pass && worst <= 0.1;
    detail("strobe_max_diff", sci(worst))("at_n", worst_n);
    return {pass, detail.str()};
}

Outcome phase_bounds()
{
    const double delta = -0.26;
    const double high = mse(split_cells(delta, 0.1, -1));
    const double l1 = *phase_boundaries(delta, -1).l1.g;
    const double g_above = l1 + 0.5;
    const double low = mse(split_cells(delta, g_above, -1));

    // Continuity across the gap closing: the jump over delta = 0 against neighbouring differences.
    const double g = 1.0;
    std::vector<double> d = {-0.09, -0.07, -0.05, -0.03, -0.01, 0.01, 0.03, 0.05, 0.07, 0.09};
    std::vector<double> m;
    for (double x : d) {
        m.push_back(mse(split_cells(x, g, -1)));
    }
    double lipschitz = 0.0;
    for (std::size_t i = 1; i < d.size(); ++i) {
        if (i != d.size() / 2) {
            lipschitz = std::max(lipschitz, std::abs(m[i] - m[i - 1]));
        }
    }
    const double jump = std::abs(m[d.size() / 2] - m[d.size() / 2 - 1]);
    const bool pass = high >= 0.9 && low <= 0.25 && jump <= 2.0 * lipschitz;
    return {pass, Detail()("mse_g0.1", sci(high))("g_above", sci(g_above))("mse_above", sci(low))("jump", sci(jump))(
                      "lipschitz", sci(lipschitz))
                      .str()};
}

Outcome properties()
{
    Detail detail;
    bool pass = true;

    // Norm: conserved without loss, nonincreasing with loss.
    double drift = 0.0;
    double rise = 0.0;
    const auto times = uniform_times(10.0, 0.05);
    const AmplitudeTrace closed = evolve_finite(split_cells(0.3, 0.8, -1), 0, Boundary::periodic, times);
    for (double n : closed.norm) {
        drift = std::max(drift, std::abs(n - 1.0));
    }
    ModelConfig leaky = split_cells(0.3, 0.8, -1);
    leaky.bath.kappa_a = 1.0;
    leaky.bath.kappa_b = 0.5;
    const AmplitudeTrace open = evolve_finite(leaky, 0, Boundary::periodic, times);
    for (std::size_t i = 1; i < open.norm.size(); ++i) {
        rise = std::max(rise, open.norm[i] - open.norm[i - 1]);
    }
    g_traces.push_back(closed);
    g_traces.push_back(open);
    pass = pass && drift <= 1e-9 && rise <= 0.0;
    detail("norm_drift", sci(drift))("norm_rise", sci(rise));

    // 0 <= W <= E <= omega_e on every trace.
    double violation = 0.0;
    for (const auto& tr : g_traces) {
        const IndicatorSeries s = indicators(tr, 1.0);
        for (std::size_t i = 0; i < s.times.size(); ++i) {
            violation = std::max({violation, -s.ergotropy[i], s.ergotropy[i] - s.energy[i], s.energy[i] - 1.0});
        }
    }
    pass = pass && violation <= 1e-12;
    detail("indicator_violation", sci(std::max(violation, 0.0)));

    // Chiral symmetry of the lossless bath.
    double chiral = 0.0;
    for (double delta : {-0.6, 0.3, 0.7}) {
        BathParams b;
        b.delta = delta;
        for (double z : {0.1, 2.2, 3.1}) {
            if (band_edges(b).distance(z) < 0.05) {
                continue;
            }
            for (int n : {0, 1, -2}) {
                const Site a0{0, Sublattice::A};
                const Site an{n, Sublattice::A};
                const Site b0{0, Sublattice::B};
                chiral = std::max(chiral, std::abs(greens(an, a0, -z, b) + greens(an, a0, z, b)));
                chiral = std::max(chiral, std::abs(greens(an, b0, -z, b) - greens(an, b0, z, b)));
            }
        }
    }
    pass = pass && chiral <= 1e-8;
    detail("chiral", sci(chiral));

    // Residue sums over coherent bound-state sets. Loss-continued sets are
    // reported only: their residues come from a non-Hermitian problem.
    double worst_sum = 0.0;
    for (double delta : linspace(-0.9, 0.9, 7)) {
        for (double g : linspace(0.2, 2.0, 7)) {
            for (const ModelConfig& c : {split_cells(delta, g, -1), split_cells(delta, g, -2), same_cavity(delta, g, 0.0)}) {
                double sum = 0.0;
                for (const auto& p : find_coherent_bse(c).poles) {
                    sum += std::abs(p.residue);
                }
                worst_sum = std::max(worst_sum, sum);
            }
        }
    }
    pass = pass && worst_sum <= 1.0 + 1e-6;
    detail("max_residue_sum", sci(worst_sum));
    const ModelConfig zc = same_cavity(0.9, 1.0, 0.0);
    const double q = kappa_qze(coherent_pair_E0(zc).E0);
    const double ks[] = {0.5 * q, 2.0 * q, 20.0 * q};
    double lossy_sum = 0.0;
    for (const auto& s : continue_poles(zc, ks)) {
        double sum = 0.0;
        for (const auto& p : s.poles) {
            sum += std::abs(p.residue);
        }
        lossy_sum = std::max(lossy_sum, sum);
    }
    detail("lossy_residue_sum_info", sci(lossy_sum));

    // Byte-identical CSV output.
    auto render = [] {
        std::ostringstream out;
        const ModelConfig c = split_cells(-0.4, 1.1, -1);
        const AmplitudeTrace tr = evolve_finite(c, 0, Boundary::periodic, uniform_times(5.0, 0.1));
        write_dynamics_csv(out, tr, indicators(tr, 1.0));
        write_bound_states_csv(out, find_coherent_bse(c).poles);
        GridSpec grid;
        grid.delta = {-0.5, 0.5, 3};
        grid.g = {0.5, 1.5, 3};
        SweepOptions opt;
        opt.jobs = 2;
        write_sweep_csv(out, mse_sweep(grid, c, opt));
        return out.str();
    };
    const bool identical = render() == render();
    pass = pass && identical;
    detail("csv_identical", identical ? "yes" : "no");
    return {pass, detail.str()};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"rabi limit", rabi_limit},
        {"green's function oracle", greens_oracle},
        {"pole sum vs evolution", pole_sum_vs_evolution},
        {"phase boundaries", boundaries},
        {"degenerate zero-energy residue", degenerate_zero},
        {"max ergotropy closed form", max_ergotropy_closed_form},
        {"dark state", dark_state},
        {"vacancy-like bound state", vdbs},
        {"dissipative poles", zeno_poles},
        {"zeno power boost", zeno_power},
        {"phase diagram bounds", phase_bounds},
        {"property suites", properties},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("criterion %2zu %s  %-32s %s (%.2fs)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                    o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
