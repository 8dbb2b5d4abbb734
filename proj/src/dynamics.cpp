// dynamics.cpp: single-excitation evolution on a finite lattice.

#include "topobatt/dynamics.hpp"

#include <cmath>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "topobatt/errors.hpp"

namespace topobatt {

namespace odeint = boost::numeric::odeint;

int light_cone_cells(const ModelConfig& config, double t_max)
{
    const double reach = 2.0 * (2.0 * config.bath.J * t_max);
    return static_cast<int>(std::ceil(reach - 1e-9)) + std::abs(config.emitters.cell_distance()) + 4;
}

Eigen::SparseMatrix<cplx> system_hamiltonian(const ModelConfig& config, const FiniteLattice& lattice)
{
    const auto& e = config.emitters;
    const int n = lattice.dimension() + 2;
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(lattice.matrix.nonZeros() + 8);
    for (int col = 0; col < lattice.matrix.outerSize(); ++col) {
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(lattice.matrix, col); it; ++it) {
            entries.emplace_back(2 + it.row(), 2 + it.col(), it.value());
        }
    }
    entries.emplace_back(kBatteryIndex, kBatteryIndex, e.Delta);
    entries.emplace_back(kChargerIndex, kChargerIndex, e.Delta);
    const double omega12 = effective_direct_coupling(config);
    if (omega12 != 0.0) {
        entries.emplace_back(kBatteryIndex, kChargerIndex, omega12);
        entries.emplace_back(kChargerIndex, kBatteryIndex, omega12);
    }
    if (e.g != 0.0) {
        const int s1 = 2 + lattice.index({e.x1, e.alpha});
        const int s2 = 2 + lattice.index({e.x2, e.beta});
        entries.emplace_back(kBatteryIndex, s1, e.g);
        entries.emplace_back(s1, kBatteryIndex, e.g);
        entries.emplace_back(kChargerIndex, s2, e.g);
        entries.emplace_back(s2, kChargerIndex, e.g);
    }
    Eigen::SparseMatrix<cplx> h(n, n);
    h.setFromTriplets(entries.begin(), entries.end());
    return h;
}

Eigen::VectorXcd initial_state(const FiniteLattice& lattice)
{
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(lattice.dimension() + 2);
    psi(kChargerIndex) = 1.0;
    return psi;
}

std::vector<double> uniform_times(double t_max, double dt)
{
    if (!(dt > 0.0) || !(t_max >= 0.0)) {
        throw ConfigError("time grid needs dt > 0 and t_max >= 0");
    }
    std::vector<double> t;
    const auto n = static_cast<long>(std::floor(t_max / dt * (1.0 + 1e-12) + 1e-6));
    t.reserve(n + 1);
    for (long i = 0; i <= n; ++i) {
        t.push_back(i * dt);
    }
    return t;
}

AmplitudeTrace evolve_finite(const ModelConfig& input, int cells, Boundary boundary,
                             std::span<const double> t_grid, const EvolveOptions& options,
                             const StateObserver& observer)
{
    const ModelConfig config = validate(input);
    if (t_grid.empty()) {
        throw ConfigError("empty time grid");
    }
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0 || (i > 0 && t_grid[i] <= t_grid[i - 1])) {
            throw ConfigError("time grid must be ascending and non-negative");
        }
    }
    const int needed = light_cone_cells(config, t_grid.back());
    if (cells == 0) {
        cells = needed;
    }
    if (cells < needed) {
        std::ostringstream msg;
        msg << "N = " << cells << " cells is inside the light cone for t_max = " << t_grid.back()
            << "; need N >= " << needed;
        throw LightConeError(msg.str(), needed);
    }

    const FiniteLattice lattice = build_finite_lattice(cells, boundary, config.bath);
    const Eigen::SparseMatrix<cplx> h = system_hamiltonian(config, lattice);
    const Eigen::VectorXcd psi0 = initial_state(lattice);

    using State = std::vector<cplx>;
    State psi(psi0.data(), psi0.data() + psi0.size());
    auto rhs = [&h](const State& x, State& dxdt, double) {
        Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        Eigen::Map<Eigen::VectorXcd> dv(dxdt.data(), static_cast<Eigen::Index>(dxdt.size()));
        dv.noalias() = cplx(0.0, -1.0) * (h * xv);
    };

    AmplitudeTrace trace;
    trace.cells = cells;
    trace.boundary = boundary;
    auto record = [&](const State& x, double t) {
        Eigen::Map<const Eigen::VectorXcd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
        const double norm = xv.squaredNorm();
        trace.times.push_back(t);
        trace.c_B.push_back(x[kBatteryIndex]);
        trace.c_C.push_back(x[kChargerIndex]);
        trace.norm.push_back(norm);
        trace.p_loss.push_back(1.0 - norm);
        if (observer) {
            observer(t, xv);
        }
    };

    std::vector<double> times(t_grid.begin(), t_grid.end());
    if (times.front() > 0.0) {
        times.insert(times.begin(), 0.0);
    }
    const bool drop_first = t_grid.front() > 0.0;
    try {
        auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                                 odeint::runge_kutta_dopri5<State>());
        if (times.size() == 1) {
            record(psi, 0.0);
        } else {
            odeint::integrate_times(stepper, rhs, psi, times.begin(), times.end(), options.initial_step,
                                    [&](const State& x, double t) { record(x, t); });
        }
    } catch (const std::exception& ex) {
        throw SolverError(std::string("step-size underflow in time integration: ") + ex.what());
    }
    if (drop_first) {
        auto strip = [](auto& v) { v.erase(v.begin()); };
        strip(trace.times);
        strip(trace.c_B);
        strip(trace.c_C);
        strip(trace.norm);
        strip(trace.p_loss);
    }
    return trace;
}

std::vector<double> loss_probability(const AmplitudeTrace& trace)
{
    std::vector<double> p(trace.norm.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        p[i] = 1.0 - trace.norm[i];
    }
    return p;
}

QubitState reduced_battery_state(cplx c_B)
{
    const double pe = std::norm(c_B);
    if (pe > (1.0 + 1e-9) * (1.0 + 1e-9)) {
        throw SolverError("battery amplitude exceeds 1");
    }
    QubitState s;
    s.rho.setZero();
    s.rho(0, 0) = std::min(pe, 1.0);
    s.rho(1, 1) = 1.0 - std::min(pe, 1.0);
    return s;
}

AmplitudeTrace stroboscopic_samples(const AmplitudeTrace& trace, double period)
{
    if (!(period > 0.0)) {
        throw ConfigError("stroboscopic period must be positive");
    }
    AmplitudeTrace out;
    out.cells = trace.cells;
    out.boundary = trace.boundary;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        const double t = trace.times[i];
        const double n = std::round(t / period);
        if (std::abs(t - n * period) <= 1e-9 * std::max(1.0, t)) {
            out.times.push_back(t);
            out.c_B.push_back(trace.c_B[i]);
            out.c_C.push_back(trace.c_C[i]);
            out.norm.push_back(trace.norm[i]);
            out.p_loss.push_back(trace.p_loss[i]);
        }
    }
    return out;
}

} // namespace topobatt
