#pragma once

// Radial quantum sector on a uniform grid in t = ln r: the curved Kepler
// radial operator H_l, its ladder factorization, closed-form spectra,
// the N-dimensional gauge reduction and the reduced TTW operator.

#include "superint/systems.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace superint {

/// N-dimensional radial PerlickI problem in the Kepler chart.
struct RadialProblem {
    double k = 0.0;
    double mu = 1.0;
    double hbar = 1.0;
    Rational beta{1, 1};
    std::size_t N = 2;
    int l = 0;

    /// (l + (N - 2)/2) / beta.
    double l_tilde() const { return (l + (static_cast<double>(N) - 2.0) / 2.0) / beta.value(); }
    void validate() const;
};

/// Two-dimensional radial operator
/// H_l = -hbar^2 (1 + k r^2)^2 / 2 (d_r^2 + d_r / r - l^2 / r^2) - mu (1 - k r^2) / r
/// with real l >= 0.
struct Sector {
    double k = 0.0;
    double mu = 1.0;
    double hbar = 1.0;
    double l = 0.0;

    Sector with_l(double l2) const { return {k, mu, hbar, l2}; }
};

/// The gauge-equivalent 2D sector (l = l_tilde).
Sector reduce(const RadialProblem& prob);

/// E_{n,l} = -mu^2 / (2 hbar^2 nu^2) + 2 k hbar^2 nu^2 - k hbar^2 / 2, nu = n + l_tilde + 1/2.
double energy(int n, const RadialProblem& prob);
double energy(int n, const Sector& s);
/// Factorization constant E_l = energy(0, s).
double sector_energy(const Sector& s);

/// rho_{0,l}(r) = (r / (1 + k r^2))^l exp(-mu atan(sqrt(k) r) / (hbar^2 sqrt(k) (l + 1/2))), the kernel of a_l.
double ground_state(const Sector& s, double r);

// --- grid -----------------------------------------------------------------------

using GridFunction = Eigen::VectorXd;
using GridOperator = Eigen::SparseMatrix<double>;

/// Cell-centred uniform grid in t = ln r.
struct RadialGrid {
    double t_min = -60.0, t_max = 8.0, h = 0.02;
    std::vector<double> t, r;

    static RadialGrid make(double t_min, double t_max, double h);
    std::size_t size() const { return r.size(); }
    GridFunction sample(const std::function<double(double)>& f) const;
    /// Quadrature weights of r dr / (1 + k r^2)^2.
    GridFunction measure(double k) const;
};

/// Grid sized for the lowest `count` states of the sector.
RadialGrid default_grid(const Sector& s, int count);

/// Relative weighted L2 norm helpers; `margin` points at each end are ignored.
double norm(const GridFunction& u, const GridFunction& weights, std::size_t margin = 0);

/// Points per local wavelength at energy E (minimum over the classically allowed region).
double points_per_wavelength(const Sector& s, const RadialGrid& g, double E);

/// H_l on grid values (values beyond the ends treated as zero).
GridOperator hamiltonian(const Sector& s, const RadialGrid& g);

enum class Ladder { raise, lower };

/// Real part P of the ladder operators with the global phase dropped:
/// a^dagger_l = (i / sqrt 2) P_raise, a_l = (i / sqrt 2) P_lower, so a^dagger_l a_l = -P_raise P_lower / 2.
/// Throws Error when the grid resolves fewer than 12 points per wavelength at E_l.
GridOperator ladder(const Sector& s, const RadialGrid& g, Ladder dir);

/// rho_{n,l} proportional to prod_j a^dagger_{l+j} rho_{0,l+n}, unit norm in the sector measure.
GridFunction wavefunction(int n, const Sector& s, const RadialGrid& g);

// --- spectra --------------------------------------------------------------------

struct SpectrumRow {
    int n = 0;
    int l = 0;
    double e_formula = 0.0;
    std::optional<double> e_grid;
    double residual = 0.0;  // |E_grid - E_formula| / |E_formula|
};

struct SpectrumTable {
    RadialProblem problem;
    std::vector<SpectrumRow> rows;
    std::string note;
    double max_residual() const;
};

/// Lowest eigenvalues of the discretized sector by Sturm-count bisection
/// (symmetric form, Neumann ends).
std::vector<double> sector_eigenvalues(const Sector& s, const RadialGrid& g, int count);
std::vector<double> sector_eigenvalues(const Sector& s, int count);

/// Lowest `count` states of the N-dimensional problem through its 2D reduction.
SpectrumTable eigensolve(const RadialProblem& prob, int count);

/// Eigenvalues of the N-dimensional radial operator discretized directly
/// (first-derivative term kept, indicial boundary closure), found by
/// shift-invert iteration from each shift.
std::vector<double> direct_eigenvalues(const RadialProblem& prob, const std::vector<double>& shifts);

void write_csv(std::ostream& os, const SpectrumTable& t);
std::string to_json(const SpectrumTable& t);

/// Groups of (n, l) with equal closed-form energy within [e_lo, e_hi], n and l
/// up to the given bounds. Within a group, successive members differ by
/// (n + m1, l - m2) for beta = m2 / m1.
std::vector<std::vector<std::pair<int, int>>> degeneracy(const RadialProblem& prob, double e_lo, double e_hi, int n_max,
                                                         int l_max);

// --- quantization equivalence ---------------------------------------------------

/// Scalar curvature of f(r) delta_ij, f = beta^2 / (r^2 (r^-beta + k r^beta)^2), in N dimensions.
double direct_metric_curvature(std::size_t N, double beta, double k, double r);

/// || H_LB u - f^((2-N)/4) H_d f^((N-2)/4) u || / || u || in the Perlick chart, for the
/// angular sector l(l + N - 2). H_d = -hbar^2 / (2 f) nabla^2 + V and
/// H_LB = -hbar^2 / 2 Delta_g + V + hbar^2 (N - 2) / (8 (N - 1)) R.
double laplace_beltrami_residual(const RadialProblem& prob, const RadialGrid& g, const GridFunction& u);

// --- reduced TTW ----------------------------------------------------------------

/// H = (1 + k r^2)^2 / 2 (-hbar^2 (d_r^2 + d_r / r + d_th^2 / r^2) + b1 / (r^2 cos^2(th / beta))
///     + b2 / (r^2 sin^2(th / beta))) - mu (1 - k r^2) / r on th in (0, beta pi / 2),
/// Dirichlet in th, values indexed i_t * M + j_th.
struct TtwOperator {
    double k = 0.0, mu = 1.0, beta = 1.0, b1 = 0.0, b2 = 0.0, hbar = 1.0;
    RadialGrid grid;
    std::vector<double> theta;
    GridOperator H;
    GridFunction weights;  // r dr dth / (1 + k r^2)^2

    std::size_t num_theta() const { return theta.size(); }
};

TtwOperator ttw_quantum_build(double k, double mu, double beta, double b1, double b2, const RadialGrid& g,
                              std::size_t num_theta, double hbar = 1.0);

/// b = (1 - 4 l^2) / (4 beta^2).
double ttw_coupling(double l, double beta);

/// max |W H - (W H)^T| / max |W H|.
double ttw_asymmetry(const TtwOperator& op);

/// For b1 = b2 = 0: || H (phi sin(lambda th)) - (H_lambda phi) sin(lambda th) || / || phi sin(lambda th) ||
/// with lambda = 2 m / beta.
double ttw_reduction_residual(const TtwOperator& op, int m, const GridFunction& phi);

}  // namespace superint
