// bath.cpp: SSH bath: Bloch matrix, Green's functions and the finite-lattice oracle.

#include "topobatt/bath.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/SparseLU>

#include "topobatt/errors.hpp"
#include "topobatt/quadrature.hpp"

namespace topobatt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

// Continuum point for |f_k|^2 = s on branch sign (+1 / -1).
cplx continuum_point(double s, int sign, const BathParams& bath)
{
    const double km = bath.kappa_minus();
    return -kI * bath.kappa_plus() + double(sign) * std::sqrt(cplx(s - km * km, 0.0));
}

// Lattice sum I(n) = (1/2pi) int dk e^{ikn} / (P - Q cos k) evaluated by
// residues at the root of w^2 - (2P/Q) w + 1 inside the unit circle.
struct ContourKernel {
    cplx P;
    double Q;
    cplx w_in;
    cplx prefactor; // -2 / (Q (w_in - w_out))

    ContourKernel(cplx z, const BathParams& bath)
    {
        const double jp = bath.j_plus();
        const double jm = bath.j_minus();
        const cplx za = z + 0.5 * kI * bath.kappa_a;
        const cplx zb = z + 0.5 * kI * bath.kappa_b;
        P = za * zb - (jp * jp + jm * jm);
        Q = 2.0 * jp * jm;
        if (Q == 0.0) {
            w_in = 0.0;
            prefactor = 1.0 / P;
            return;
        }
        const cplx r = P / Q;
        cplx s = std::sqrt(r * r - 1.0);
        cplx w_out = r + s;
        if (std::abs(r - s) > std::abs(w_out)) {
            w_out = r - s;
        }
        w_in = 1.0 / w_out;
        prefactor = -2.0 / (Q * (w_in - w_out));
    }

    cplx operator()(int n) const
    {
        const int m = std::abs(n);
        if (Q == 0.0) {
            return m == 0 ? prefactor : cplx(0.0);
        }
        return prefactor * std::pow(w_in, m);
    }
};

cplx contour_value(Site m, Site n, cplx z, const BathParams& bath)
{
    const ContourKernel I(z, bath);
    const int sep = m.cell - n.cell;
    const double jp = bath.j_plus();
    const double jm = bath.j_minus();
    if (m.sub == Sublattice::A && n.sub == Sublattice::A) {
        return (z + 0.5 * kI * bath.kappa_b) * I(sep);
    }
    if (m.sub == Sublattice::B && n.sub == Sublattice::B) {
        return (z + 0.5 * kI * bath.kappa_a) * I(sep);
    }
    if (m.sub == Sublattice::A) {
        return jp * I(sep) + jm * I(sep - 1);
    }
    return jp * I(sep) + jm * I(sep + 1);
}

// [(z - h_k)^{-1}]_{alpha beta} from the closed-form 2x2 inverse.
cplx inverse_entry(double k, Sublattice alpha, Sublattice beta, cplx z, const BathParams& bath)
{
    const cplx f = coupling_fk(k, bath);
    const cplx za = z + 0.5 * kI * bath.kappa_a;
    const cplx zb = z + 0.5 * kI * bath.kappa_b;
    const cplx det = za * zb - std::norm(f);
    if (alpha == Sublattice::A) {
        return (beta == Sublattice::A ? zb : f) / det;
    }
    return (beta == Sublattice::A ? std::conj(f) : za) / det;
}

} // namespace

cplx coupling_fk(double k, const BathParams& bath)
{
    return bath.j_plus() + bath.j_minus() * std::exp(-kI * k);
}

BlochMatrix bloch_matrix(double k, const BathParams& bath)
{
    const cplx f = coupling_fk(k, bath);
    Eigen::Matrix2cd sx, sy, sz, s0;
    sx << 0, 1, 1, 0;
    sy << 0, -kI, kI, 0;
    sz << 1, 0, 0, -1;
    s0 << 1, 0, 0, 1;
    BlochMatrix h;
    h.k = k;
    // Diagonal (-i kappa_a/2, -i kappa_b/2): the sz coefficient is kappa_-.
    h.entries = f.real() * sx - f.imag() * sy - kI * bath.kappa_minus() * sz
                - kI * bath.kappa_plus() * s0;
    return h;
}

double spectrum_distance(cplx z, const BathParams& bath)
{
    const double s_lo = 4.0 * bath.J * bath.J * bath.delta * bath.delta;
    const double s_hi = 4.0 * bath.J * bath.J;
    if (bath.lossless()) {
        const double dx = band_edges(bath).distance(z.real());
        return std::hypot(dx, z.imag());
    }
    // Sample |f|^2 on both branches, then golden-section refine the best cell.
    constexpr int kSamples = 256;
    double best = std::numeric_limits<double>::infinity();
    for (int sign : {-1, 1}) {
        int best_i = 0;
        double branch_best = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kSamples; ++i) {
            const double s = s_lo + (s_hi - s_lo) * i / kSamples;
            const double d = std::abs(z - continuum_point(s, sign, bath));
            if (d < branch_best) {
                branch_best = d;
                best_i = i;
            }
        }
        double lo = s_lo + (s_hi - s_lo) * std::max(0, best_i - 1) / kSamples;
        double hi = s_lo + (s_hi - s_lo) * std::min(kSamples, best_i + 1) / kSamples;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 60 && hi - lo > 1e-15 * s_hi; ++it) {
            const double a = hi - phi * (hi - lo);
            const double b = lo + phi * (hi - lo);
            if (std::abs(z - continuum_point(a, sign, bath)) < std::abs(z - continuum_point(b, sign, bath))) {
                hi = b;
            } else {
                lo = a;
            }
        }
        branch_best = std::min(branch_best, std::abs(z - continuum_point(0.5 * (lo + hi), sign, bath)));
        best = std::min(best, branch_best);
    }
    return best;
}

GreensValue greens_function(Site m, Site n, cplx z, const BathParams& bath,
                            const GreensOptions& options)
{
    if (options.method == GreensMethod::contour) {
        // The residue form is exact; its conditioning degrades only as the
        // inner root approaches the unit circle.
        if (bath.lossless()) {
            if (spectrum_distance(z, bath) < options.tol_spec * bath.J) {
                throw OnSpectrumError("z on the bath spectrum");
            }
        } else {
            const ContourKernel I(z, bath);
            if (I.Q != 0.0 ? 1.0 - std::abs(I.w_in) < options.tol_spec
                           : std::abs(I.P) < options.tol_spec * bath.J * bath.J) {
                throw OnSpectrumError("z on the bath spectrum");
            }
        }
        return {contour_value(m, n, z, bath), 0.0, GreensMethod::contour};
    }

    if (spectrum_distance(z, bath) < options.tol_spec * bath.J) {
        throw OnSpectrumError("z on the bath spectrum");
    }
    const int sep = m.cell - n.cell;
    auto integrand = [&](double k) {
        return std::exp(kI * (k * sep)) * inverse_entry(k, m.sub, n.sub, z, bath);
    };
    QuadratureOptions q;
    q.abs_tol = options.abs_tol * 2.0 * kPi;
    const QuadratureResult r = integrate_adaptive(integrand, -kPi, kPi, q);
    const double err = r.error_estimate / (2.0 * kPi);
    if (!r.converged) {
        throw AccuracyError("Green's function quadrature missed its error target (estimate "
                                + std::to_string(err) + ")",
                            err);
    }
    return {r.value / (2.0 * kPi), err, GreensMethod::quadrature};
}

cplx greens(Site m, Site n, cplx z, const BathParams& bath, const GreensOptions& options)
{
    return greens_function(m, n, z, bath, options).value;
}

std::string to_string(Boundary b)
{
    return b == Boundary::periodic ? "periodic" : "open";
}

Boundary boundary_from_string(const std::string& s)
{
    if (s == "periodic") {
        return Boundary::periodic;
    }
    if (s == "open") {
        return Boundary::open;
    }
    throw ConfigError("boundary must be \"periodic\" or \"open\", got \"" + s + "\"");
}

int FiniteLattice::slot(int cell) const
{
    const int s = (cell + cells / 2) % cells;
    return s < 0 ? s + cells : s;
}

FiniteLattice build_finite_lattice(int cells, Boundary boundary, const BathParams& bath)
{
    if (cells < 2) {
        throw ConfigError("finite lattice needs N >= 2 cells, got " + std::to_string(cells));
    }
    FiniteLattice lattice;
    lattice.cells = cells;
    lattice.boundary = boundary;

    const int dim = 2 * cells;
    std::vector<Eigen::Triplet<cplx>> entries;
    entries.reserve(4 * dim);
    auto hop = [&](int i, int j, double t) {
        entries.emplace_back(i, j, t);
        entries.emplace_back(j, i, t);
    };
    for (int s = 0; s < cells; ++s) {
        const int a = 2 * s;
        const int b = a + 1;
        entries.emplace_back(a, a, -0.5 * kI * bath.kappa_a);
        entries.emplace_back(b, b, -0.5 * kI * bath.kappa_b);
        hop(a, b, bath.j_plus());
        if (s + 1 < cells) {
            hop(b, a + 2, bath.j_minus());
        } else if (boundary == Boundary::periodic) {
            hop(b, 0, bath.j_minus());
        }
    }
    lattice.matrix.resize(dim, dim);
    lattice.matrix.setFromTriplets(entries.begin(), entries.end());
    lattice.matrix.prune(cplx(0.0));
    return lattice;
}

cplx greens_function_finite(Site m, Site n, cplx z, const FiniteLattice& lattice)
{
    const int dim = lattice.dimension();
    Eigen::SparseMatrix<cplx> A(dim, dim);
    A.setIdentity();
    A = z * A - lattice.matrix;
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) {
        throw SolverError("z is an eigenvalue of the finite lattice");
    }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
    rhs(lattice.index(n)) = 1.0;
    const Eigen::VectorXcd x = lu.solve(rhs);
    const cplx value = x(lattice.index(m));
    if (lu.info() != Eigen::Success || !std::isfinite(std::abs(x.norm())) || x.norm() > 1e14) {
        throw SolverError("z is an eigenvalue of the finite lattice");
    }
    return value;
}

} // namespace topobatt
