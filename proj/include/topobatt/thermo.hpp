// thermo.hpp: stored energy, ergotropy and charging power of the battery,
// and their long-time maxima from bound-state data.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include "topobatt/dynamics.hpp"
#include "topobatt/resolvent.hpp"

namespace topobatt {

/// omega_e |c_B|^2.
double stored_energy(cplx c_B, double omega_e);

/// Eigenvalues of rho sorted descending and assigned to |g>, |e> in that order.
QubitState passive_state(const QubitState& rho);

/// Tr[rho H_B] - Tr[passive(rho) H_B] with H_B = omega_e |e><e|.
double ergotropy(const QubitState& rho, double omega_e);

/// P(t) = E(t)/t; absent at t = 0.
std::vector<std::optional<double>> charging_power(std::span<const double> times,
                                                  std::span<const double> energy);

struct IndicatorSeries {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> ergotropy;
    std::vector<std::optional<double>> power;
};

IndicatorSeries indicators(const AmplitudeTrace& trace, double omega_e);

struct PowerMaximum {
    double time{0.0};
    double power{0.0};
};

/// max_t P(t) over t > 0: grid maximum refined by a parabola through the
/// neighbouring samples.
PowerMaximum max_charging_power(std::span<const double> times, std::span<const double> energy);

struct AsymptoticMaximum {
    double value{0.0};
    bool commensurate{false}; // value came from the time-scan fallback
    double scan_time{0.0};    // argmax of the scan, when used
};

struct AsymptoticOptions {
    double residue_floor{1e-10};  // poles with smaller |Res| are ignored
    double ratio_tol{1e-9};       // rational-ratio detection tolerance
    int max_denominator{1000};
    double scan_t_max{1e4};       // units of 1/J
    double scan_phase_step{0.05}; // max |E| dt per scan step
};

/// sup_t |sum_b Res_b e^{-i E_b t}|^2 times omega_e over coherent poles.
/// For rationally independent frequencies this is (sum |Res_b|)^2; if two
/// frequency differences have a rational ratio (denominator <= 1000) or a
/// multiple pole carries weight, a dense time scan on [0, 10^4/J] is used and
/// the result is flagged commensurate.
AsymptoticMaximum asymptotic_max_stored(std::span<const BoundState> poles, double omega_e, double J = 1.0,
                                        const AsymptoticOptions& options = {});

/// omega_e max(0, 2 m - 1) with m = asymptotic_max_stored / omega_e.
AsymptoticMaximum asymptotic_max_ergotropy(std::span<const BoundState> poles, double omega_e,
                                           double J = 1.0, const AsymptoticOptions& options = {});

/// True when x is within tol of p/q for some q <= max_denominator.
bool is_rational(double x, int max_denominator, double tol);

} // namespace topobatt
