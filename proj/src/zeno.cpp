// zeno.cpp: dark state, vacancy-like bound state and the Zeno power sweep.

#include "topobatt/zeno.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "topobatt/errors.hpp"
#include "topobatt/phases.hpp"
#include "topobatt/thermo.hpp"

namespace topobatt {

namespace {

bool is_vdbs_pole(const BoundState& p)
{
    return !p.dark && p.kind == PoleKind::coherent && std::abs(p.energy) <= 1e-8;
}

ModelConfig at_kappa(const ModelConfig& c, double kappa)
{
    ModelConfig out = c;
    const double kmax = std::max(c.bath.kappa_a, c.bath.kappa_b);
    const double ua = kmax > 0.0 ? c.bath.kappa_a / kmax : 1.0;
    const double ub = kmax > 0.0 ? c.bath.kappa_b / kmax : 0.0;
    out.bath.kappa_a = ua * kappa;
    out.bath.kappa_b = ub * kappa;
    return out;
}

} // namespace

CoherentPair coherent_pair_E0(const ModelConfig& config, const ResolventOptions& options)
{
    if (!config.emitters.same_site()) {
        throw ConfigError("coherent pair analysis needs both emitters in the same cavity");
    }
    ModelConfig lossless = config;
    lossless.bath.kappa_a = 0.0;
    lossless.bath.kappa_b = 0.0;
    const PoleSet set = find_coherent_bse(lossless, options);
    std::vector<BoundState> pair;
    for (const auto& p : set.poles) {
        if (!p.dark && !is_vdbs_pole(p)) {
            pair.push_back(p);
        }
    }
    if (set.poles.size() != 4 || pair.size() != 2) {
        std::ostringstream msg;
        msg << "expected dark + VDBS + coherent pair, found " << set.poles.size() << " poles:";
        for (const auto& p : set.poles) {
            msg << ' ' << p.energy.real();
        }
        throw SolverError(msg.str());
    }
    CoherentPair out;
    out.lower = pair[0];
    out.upper = pair[1];
    out.E0 = 0.5 * (std::abs(pair[0].energy.real()) + std::abs(pair[1].energy.real()));
    return out;
}

ZenoPair dissipative_energies_formula(double kappa, double E0)
{
    const cplx shift(0.0, -0.25 * kappa);
    const cplx root = std::sqrt(cplx(E0 * E0 - 0.0625 * kappa * kappa, 0.0));
    return {shift + root, shift - root};
}

double kappa_qze(double E0)
{
    return 4.0 * E0;
}

double reference_residue(const ModelConfig& config, double E0)
{
    const double J = config.bath.J;
    const double delta = config.bath.delta;
    const double g2 = config.emitters.g * config.emitters.g;
    return 2.0 * g2 * g2 / ((E0 * E0 - 2.0 * J * J * (1.0 + delta * delta)) * E0 * E0);
}

ResiduePair residue_asymptotics(double kappa, double E0, double R0)
{
    return {R0, -4.0 * R0 * E0 * E0 / (kappa * kappa)};
}

DarkStateCheck dark_state_check(const ModelConfig& input, int cells, Boundary boundary)
{
    const ModelConfig config = validate(input);
    const FiniteLattice lattice = build_finite_lattice(cells, boundary, config.bath);
    const Eigen::SparseMatrix<cplx> h = system_hamiltonian(config, lattice);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(h.rows());
    psi(kBatteryIndex) = 1.0 / std::sqrt(2.0);
    psi(kChargerIndex) = -1.0 / std::sqrt(2.0);
    const cplx energy = config.emitters.Delta - config.emitters.Omega;
    const Eigen::VectorXcd r = h * psi - energy * psi;
    return {r.norm(), config.emitters.same_site()};
}

std::optional<BoundState> vdbs_find(const ModelConfig& input, int cells, const VdbsOptions& options)
{
    const ModelConfig config = validate(input);
    const FiniteLattice lattice = build_finite_lattice(cells, Boundary::periodic, config.bath);
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(system_hamiltonian(config, lattice));
    const double tol = options.energy_tol * config.bath.J;

    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    if (config.bath.lossless()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        values = es.eigenvalues().cast<cplx>();
        vectors = es.eigenvectors();
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h);
        values = es.eigenvalues();
        vectors = es.eigenvectors();
    }
    int found = 0;
    cplx energy = 0.0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (std::abs(values(i).real()) > tol || std::abs(values(i).imag()) > tol) {
            continue;
        }
        const Eigen::VectorXcd v = vectors.col(i).normalized();
        const double dark_weight = std::norm((v(kBatteryIndex) - v(kChargerIndex)) / std::sqrt(2.0));
        if (dark_weight > options.dark_overlap) {
            continue;
        }
        ++found;
        energy = values(i);
    }
    if (found != 1) {
        return std::nullopt;
    }
    BoundState b;
    b.energy = energy;
    b.kind = PoleKind::coherent;
    b.residue = residue_at(0.0, 1, config).residue;
    return b;
}

std::optional<std::pair<BoundState, BoundState>> slow_fast_poles(std::span<const BoundState> poles)
{
    std::vector<BoundState> pair;
    for (const auto& p : poles) {
        if (!p.dark && !is_vdbs_pole(p)) {
            pair.push_back(p);
        }
    }
    if (pair.size() != 2) {
        return std::nullopt;
    }
    const BoundState& a = pair[0];
    const BoundState& b = pair[1];
    bool a_slow;
    if (std::abs(a.energy.real() - b.energy.real()) > 1e-8) {
        a_slow = a.energy.real() > b.energy.real();
    } else {
        a_slow = std::abs(a.energy.imag()) < std::abs(b.energy.imag());
    }
    return a_slow ? std::make_pair(a, b) : std::make_pair(b, a);
}

ZenoReport max_power_vs_kappa(std::span<const double> kappas, const ModelConfig& config,
                              const ZenoOptions& options)
{
    if (!config.emitters.same_site()) {
        throw ConfigError("Zeno analysis needs both emitters in the same cavity");
    }
    ZenoReport report;
    const CoherentPair pair = coherent_pair_E0(config, options.resolvent);
    report.E0 = pair.E0;
    report.kappa_qze = kappa_qze(pair.E0);
    report.R0 = reference_residue(config, pair.E0);
    report.points.resize(kappas.size());

    // Poles: one continuation over the sorted kappa samples.
    std::vector<std::size_t> order(kappas.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return kappas[l] < kappas[r]; });
    std::vector<double> sorted;
    for (std::size_t i : order) {
        sorted.push_back(kappas[i]);
        report.points[i].kappa = kappas[i];
    }
    try {
        const auto sets = continue_poles(at_kappa(config, 1.0), sorted, options.resolvent);
        for (std::size_t s = 0; s < sets.size(); ++s) {
            if (auto sf = slow_fast_poles(sets[s].poles)) {
                report.points[order[s]].slow = sf->first;
                report.points[order[s]].fast = sf->second;
            }
        }
    } catch (const Error& e) {
        for (auto& p : report.points) {
            p.error = std::string("poles: ") + e.what();
        }
    }

    const std::vector<double> times = uniform_times(options.t_max, options.dt);
    parallel_for(kappas.size(), options.jobs, [&](std::size_t i) {
        ZenoPoint& point = report.points[i];
        try {
            const ModelConfig c = at_kappa(config, point.kappa);
            const AmplitudeTrace trace = evolve_finite(c, options.cells, options.boundary, times, options.evolve);
            const IndicatorSeries s = indicators(trace, c.emitters.omega_e);
            const PowerMaximum m = max_charging_power(s.times, s.energy);
            point.max_power = m.power;
            point.max_power_time = m.time;
        } catch (const Error& e) {
            point.error += (point.error.empty() ? "" : "; ") + std::string("dynamics: ") + e.what();
        }
    });
    return report;
}

} // namespace topobatt
