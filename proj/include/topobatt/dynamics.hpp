// dynamics.hpp: exact single-excitation evolution of the two atoms plus a
// finite lossy SSH lattice under the effective non-Hermitian Hamiltonian.
//
// Basis of the (2N+2)-dimensional sector: index 0 battery excited, 1 charger
// excited, 2 + j the lattice site j in FiniteLattice order.

#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "topobatt/bath.hpp"
#include "topobatt/model.hpp"

namespace topobatt {

struct AmplitudeTrace {
    std::vector<double> times;
    std::vector<cplx> c_B;
    std::vector<cplx> c_C;
    std::vector<double> norm;
    std::vector<double> p_loss; // 1 - norm
    int cells{0};
    Boundary boundary{Boundary::periodic};
};

/// Battery population matrix in the (e, g) basis.
struct QubitState {
    Eigen::Matrix2cd rho;
    double excited() const { return rho(0, 0).real(); }
};

struct EvolveOptions {
    double abs_tol{1e-12};
    double rel_tol{1e-12};
    double initial_step{1e-3};
};

constexpr int kBatteryIndex = 0;
constexpr int kChargerIndex = 1;

/// Smallest lattice that keeps the light cone (speed 2J) away from the
/// emitters up to t_max: 2 (2J t_max) + |d| + 4 cells.
int light_cone_cells(const ModelConfig& config, double t_max);

/// H_eff in the single-excitation sector.
Eigen::SparseMatrix<cplx> system_hamiltonian(const ModelConfig& config, const FiniteLattice& lattice);

/// |e_charger, g_battery; vac>.
Eigen::VectorXcd initial_state(const FiniteLattice& lattice);

/// Called at every output time with the full state vector.
using StateObserver = std::function<void(double, const Eigen::VectorXcd&)>;

/// Integrates i d psi/dt = H_eff psi with adaptive Dormand-Prince steps and
/// dense output at t_grid (ascending, starting at or after 0). cells = 0
/// selects light_cone_cells. Throws LightConeError when cells is too small
/// and SolverError when the step size underflows.
AmplitudeTrace evolve_finite(const ModelConfig& config, int cells, Boundary boundary,
                             std::span<const double> t_grid, const EvolveOptions& options = {},
                             const StateObserver& observer = {});

/// Uniform grid 0, dt, 2 dt, ..., up to t_max (inclusive within dt/1e6).
std::vector<double> uniform_times(double t_max, double dt);

std::vector<double> loss_probability(const AmplitudeTrace& trace);

/// diag(|c_B|^2, 1 - |c_B|^2); throws SolverError if |c_B| > 1 + 1e-9.
QubitState reduced_battery_state(cplx c_B);

/// Samples of the trace at t_n = n period (matched to grid times within
/// 1e-9 relative), in order of n.
AmplitudeTrace stroboscopic_samples(const AmplitudeTrace& trace, double period);

} // namespace topobatt
