// bath.hpp: the lossy SSH lattice in momentum space (Bloch matrix, bath
// Green's function in the thermodynamic limit) and as an explicit finite
// lattice used as the exactness oracle.

#pragma once

#include <complex>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "topobatt/model.hpp"

namespace topobatt {

using cplx = std::complex<double>;

struct Site {
    int cell{0};
    Sublattice sub{Sublattice::A};
};

/// f_k = J_+ + J_- e^{-ik}.
cplx coupling_fk(double k, const BathParams& bath);

struct BlochMatrix {
    double k{0.0};
    Eigen::Matrix2cd entries; // rows/cols ordered (A, B)
};

/// Re[f_k] sx - Im[f_k] sy - i kappa_- sz - i kappa_+ s0, i.e. loss -i kappa_a/2
/// on A and -i kappa_b/2 on B.
BlochMatrix bloch_matrix(double k, const BathParams& bath);

enum class GreensMethod {
    quadrature, // adaptive Gauss-Kronrod over k in (-pi, pi]
    contour,    // exact residue sum inside the unit circle, w = e^{ik}
};

struct GreensOptions {
    GreensMethod method{GreensMethod::quadrature};
    double abs_tol{1e-10};  // quadrature error target
    double tol_spec{1e-6};  // minimum distance to the continuum (units of J)
};

struct GreensValue {
    cplx value;
    double error_estimate{0.0};
    GreensMethod method{GreensMethod::quadrature};
};

/// Distance from z to the bath continuum {eig h_k : k real}. For a lossless
/// bath this is the distance to the two real bands.
double spectrum_distance(cplx z, const BathParams& bath);

/// <m| (z - H_bath)^{-1} |n> in the thermodynamic limit,
/// (1/2pi) int dk e^{ik(x_m - x_n)} [(z - h_k)^{-1}]_{alpha beta}.
///
/// Throws OnSpectrumError when z is within tol_spec of the continuum and
/// AccuracyError when the quadrature misses its error target.
GreensValue greens_function(Site m, Site n, cplx z, const BathParams& bath,
                            const GreensOptions& options = {});

/// Shorthand returning only the value.
cplx greens(Site m, Site n, cplx z, const BathParams& bath, const GreensOptions& options = {});

enum class Boundary { periodic, open };

std::string to_string(Boundary b);
Boundary boundary_from_string(const std::string& s);

/// Effective non-Hermitian bath Hamiltonian on N cells. Basis order is
/// (a_1, b_1, a_2, b_2, ..., a_N, b_N); physical cell x lives in slot
/// (x + N/2) mod N, which keeps small |x| away from open edges.
struct FiniteLattice {
    int cells{0};
    Boundary boundary{Boundary::periodic};
    Eigen::SparseMatrix<cplx> matrix;

    int slot(int cell) const;
    int index(Site s) const { return 2 * slot(s.cell) + (s.sub == Sublattice::B ? 1 : 0); }
    int dimension() const { return 2 * cells; }
    Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix); }
};

FiniteLattice build_finite_lattice(int cells, Boundary boundary, const BathParams& bath);

/// <m| (z - H_lattice)^{-1} |n> by sparse LU. Throws SolverError when z is an
/// eigenvalue of the lattice.
cplx greens_function_finite(Site m, Site n, cplx z, const FiniteLattice& lattice);

} // namespace topobatt
