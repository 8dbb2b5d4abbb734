// model.hpp: parameter records for the SSH bath and the battery/charger pair.
//
// Units: J = 1 and hbar = 1 unless J is overridden; energies in J, times in
// 1/J, stored energy and ergotropy in units of omega_e.

#pragma once

#include <array>
#include <string>

namespace topobatt {

enum class Sublattice { A, B };

std::string to_string(Sublattice s);
Sublattice sublattice_from_string(const std::string& s);

struct BathParams {
    double J{1.0};       // hopping scale
    double delta{0.0};   // dimerization, |delta| <= 1
    double kappa_a{0.0}; // loss rate on sublattice A
    double kappa_b{0.0}; // loss rate on sublattice B

    double j_plus() const { return J * (1.0 + delta); }  // intracell a_j <-> b_j
    double j_minus() const { return J * (1.0 - delta); } // intercell b_j <-> a_{j+1}
    double kappa_plus() const { return 0.25 * (kappa_a + kappa_b); }
    double kappa_minus() const { return 0.25 * (kappa_a - kappa_b); }
    bool lossless() const { return kappa_a == 0.0 && kappa_b == 0.0; }
};

/// Battery (emitter 1) sits at cell x1 on sublattice alpha, the charger
/// (emitter 2) at cell x2 on sublattice beta.
struct EmitterConfig {
    double Delta{0.0};   // atom detuning from the cavity frequency
    double Omega{0.0};   // direct battery-charger coupling
    double g{0.0};       // atom-bath coupling
    int x1{0};
    Sublattice alpha{Sublattice::A};
    int x2{0};
    Sublattice beta{Sublattice::A};
    double omega_e{1.0}; // battery level splitting

    /// d = x1 - x2 (battery cell minus charger cell).
    int cell_distance() const { return x1 - x2; }
    bool same_site() const { return x1 == x2 && alpha == beta; }
};

struct ModelConfig {
    BathParams bath;
    EmitterConfig emitters;

    /// |delta| = 1: one of the two hoppings vanishes.
    bool decoupled_limit() const;
};

/// Checks every bound and returns the validated record. Throws ConfigError
/// naming the offending field and bound.
ModelConfig validate(const ModelConfig& raw);

/// Omega * delta_{x1,x2} * delta_{alpha,beta}.
double effective_direct_coupling(const ModelConfig& config);

struct Interval {
    double lo{0.0};
    double hi{0.0};
    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Lossless SSH bands [-2J, -2J|delta|] and [2J|delta|, 2J].
struct BandEdges {
    Interval lower;
    Interval upper;

    double inner() const { return upper.lo; }
    double outer() const { return upper.hi; }
    /// Distance from a real energy to the nearest band point (0 inside a band).
    double distance(double x) const;
};

BandEdges band_edges(const BathParams& bath);

} // namespace topobatt
