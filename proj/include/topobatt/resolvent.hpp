// resolvent.hpp: self-energies, the pole function D(z), bound-state search
// (coherent roots on the real axis, dissipative roots by continuation in the
// loss rate) and the long-time bound-state amplitude of the battery.

#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "topobatt/bath.hpp"
#include "topobatt/model.hpp"

namespace topobatt {

enum class PoleKind { coherent, dissipative };

std::string to_string(PoleKind k);

struct BoundState {
    cplx energy;
    cplx residue;
    int multiplicity{1};
    PoleKind kind{PoleKind::coherent};
    bool dark{false}; // the exact same-site dark pole at Delta - Omega
};

struct PoleSearchReport {
    int brackets_scanned{0};
    int roots_found{0};
    int refinement_iterations{0};
    double max_residual{0.0}; // max |D(root)| over accepted roots
    std::vector<std::string> warnings;
};

struct PoleSet {
    std::vector<BoundState> poles; // ascending real part, then imaginary part
    PoleSearchReport report;
};

struct ResolventOptions {
    GreensOptions greens{GreensMethod::contour, 1e-10, 1e-6};
    double scan_step{1e-3};       // uniform bracket grid (units of J)
    double bisect_tol{1e-12};
    double accept_residual{1e-10}; // |D(root)| bound, units of J^2
    double merge_tol{1e-6};        // coherent roots closer than this are one pole
    double dissipative_merge_tol{1e-8};
    double tol_im{1e-10};          // coherent iff |Im E| <= tol_im
    double fd_step{1e-6};          // residue finite-difference step
    double kappa_step{0.05};       // continuation step in the loss rate
    double secular_tol{1e-8};
};

/// Sigma_mn(z) = g^2 G(site_m, site_n; z); emitter 1 is the battery and
/// emitter 2 the charger.
cplx self_energy(int m, int n, cplx z, const ModelConfig& config,
                 const GreensOptions& options = {GreensMethod::contour});

/// D(z) = [z - Delta - S11][z - Delta - S22] - [Omega12 + S12]^2.
cplx pole_function(cplx z, const ModelConfig& config,
                   const GreensOptions& options = {GreensMethod::contour});

/// Sigma_12(z) + Omega12, the numerator of the battery amplitude.
cplx amplitude_numerator(cplx z, const ModelConfig& config,
                         const GreensOptions& options = {GreensMethod::contour});

/// Outer cutoff of the real-axis scan, |Delta| + |Omega| + g + 4J.
double scan_cutoff(const ModelConfig& config);

/// Real roots of D in the inner gap and the outer regions of a lossless bath.
/// Same-site emitters contribute the exact dark pole at Delta - Omega with
/// residue -1/2; the remaining roots come from the bright factor
/// z - Delta - Omega - 2 Sigma_11.
PoleSet find_coherent_bse(const ModelConfig& config, const ResolventOptions& options = {});

/// Complex roots of D for a lossy bath, obtained by continuing the lossless
/// roots along kappa -> s * (kappa_a, kappa_b), s: 0 -> 1.
PoleSet find_dissipative_poles(const ModelConfig& config, const ResolventOptions& options = {});

/// Same continuation, sampled at several loss strengths along the direction
/// of (kappa_a, kappa_b). Each entry of kappa_values is max(kappa_a, kappa_b)
/// at that sample; values must be ascending and >= 0.
std::vector<PoleSet> continue_poles(const ModelConfig& config, std::span<const double> kappa_values,
                                    const ResolventOptions& options = {});

struct ResidueResult {
    cplx residue;
    cplx secular; // coefficient of t e^{-izt}; zero for simple poles
};

/// Res[(Sigma_12 + Omega12)/D, z0]. Simple poles use a Richardson-extrapolated
/// central difference for D'. Double poles use the Laurent expansion and
/// throw ModelInconsistencyError if the secular coefficient exceeds
/// secular_tol.
ResidueResult residue_at(cplx z0, int multiplicity, const ModelConfig& config,
                         const ResolventOptions& options = {});

/// sum_b Res_b e^{-i E_b t} over coherent poles; dissipative poles are added
/// only when include_decaying is set (branch cuts are never included).
cplx long_time_amplitude(double t, std::span<const BoundState> poles, bool include_decaying = false);

} // namespace topobatt
