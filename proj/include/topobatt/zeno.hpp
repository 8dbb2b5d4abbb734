// zeno.hpp: same-cavity emitters under sublattice loss: dark state, the
// vacancy-like dressed bound state (VDBS), the dissipative pair that grows
// out of the coherent +-E0 bound states, and max charging power versus loss.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topobatt/dynamics.hpp"
#include "topobatt/resolvent.hpp"

namespace topobatt {

struct CoherentPair {
    BoundState lower; // -E0
    BoundState upper; // +E0
    double E0{0.0};
};

/// The two coherent bound states other than the dark pole and the zero-energy
/// VDBS. Throws SolverError unless exactly those four poles are found.
CoherentPair coherent_pair_E0(const ModelConfig& config, const ResolventOptions& options = {});

struct ZenoPair {
    cplx slow; // smaller decay rate
    cplx fast;
};

/// -i kappa/4 +- sqrt(E0^2 - (kappa/4)^2); the principal root with the
/// + sign is the slow branch.
ZenoPair dissipative_energies_formula(double kappa, double E0);

/// 4 E0.
double kappa_qze(double E0);

/// 2 g^4 / ([E0^2 - 2 J^2 (1 + delta^2)] E0^2).
double reference_residue(const ModelConfig& config, double E0);

struct ResiduePair {
    cplx slow;
    cplx fast;
};

/// slow -> R0, fast -> -4 R0 E0^2 / kappa^2.
ResiduePair residue_asymptotics(double kappa, double E0, double R0);

struct DarkStateCheck {
    double residual{0.0};
    bool protected_state{false}; // same-cavity config
};

/// || H_eff psi - (Delta - Omega) psi || for psi = (|e,g> - |g,e>)/sqrt2 on an
/// N-cell lattice.
DarkStateCheck dark_state_check(const ModelConfig& config, int cells, Boundary boundary = Boundary::periodic);

struct VdbsOptions {
    double energy_tol{1e-10}; // units of J
    double dark_overlap{0.5}; // eigenvectors with more dark-state weight are skipped
};

/// Non-degenerate zero-energy eigenstate of the finite system other than the
/// dark state, returned with its thermodynamic-limit residue; empty when
/// absent.
std::optional<BoundState> vdbs_find(const ModelConfig& config, int cells, const VdbsOptions& options = {});

/// Picks the pair grown out of +-E0 from a pole set and labels it by decay
/// rate; empty if the set has no such pair.
std::optional<std::pair<BoundState, BoundState>> slow_fast_poles(std::span<const BoundState> poles);

struct ZenoPoint {
    double kappa{0.0};
    std::optional<BoundState> slow;
    std::optional<BoundState> fast;
    double max_power{0.0};
    double max_power_time{0.0};
    std::string error; // empty on success
};

struct ZenoReport {
    double E0{0.0};
    double kappa_qze{0.0};
    double R0{0.0};
    std::vector<ZenoPoint> points;
};

struct ZenoOptions {
    double t_max{10.0}; // units of 1/J
    double dt{0.01};
    int cells{0};       // 0: light-cone default
    Boundary boundary{Boundary::periodic};
    int jobs{1};
    ResolventOptions resolvent;
    EvolveOptions evolve;
};

/// For each kappa (loss on the template's lossy sublattice, kappa_a if the
/// template is lossless): continued poles and max_t E(t)/t from finite-lattice
/// evolution. Per-point failures are recorded, not thrown.
ZenoReport max_power_vs_kappa(std::span<const double> kappas, const ModelConfig& config,
                              const ZenoOptions& options = {});

} // namespace topobatt
