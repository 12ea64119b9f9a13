#pragma once

// Hamiltonian families on conformally flat radial spaces, written in
// Cartesian coordinates through the sl(2) generators J-, J+, J3, and the
// structural maps between them.

#include "superint/coalgebra.hpp"
#include "superint/phasespace.hpp"

#include <limits>
#include <string>
#include <vector>

#include "json.hpp"

namespace superint {

/// Exact positive rational m/n in lowest terms.
struct Rational {
    long m = 1;
    long n = 1;

    Rational() = default;
    Rational(long m, long n);

    double value() const { return static_cast<double>(m) / static_cast<double>(n); }
    std::string str() const;
    /// Accepts "m/n" or "m". Rejects zero, negatives and non-reduced pairs.
    static Rational parse(const std::string& s);

    bool operator==(const Rational&) const = default;
};

enum class Family { KeplerCurved, PerlickI, PerlickII, DarbouxCCM, TTWCurved };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

struct SystemSpec {
    Family family = Family::KeplerCurved;
    std::size_t N = 2;
    double k = 0.0;
    double lambda = 0.0;
    double delta = 0.0;
    double mu = 1.0;
    Rational beta;   // PerlickI, TTWCurved
    Rational gamma;  // PerlickII
    double b1 = 0.0, b2 = 0.0;  // TTWCurved
    double E = 0.0;             // DarbouxCCM

    /// Throws DomainError on inadmissible parameters.
    void validate() const;

    nlohmann::json to_json() const;
    static SystemSpec from_json(const nlohmann::json& j);
};

/// Radii excluded from the working region. r = 0 is always excluded.
struct AdmissibleRegion {
    double r_min = 0.0;
    double r_max = std::numeric_limits<double>::infinity();
    std::vector<double> singular_radii;

    bool contains(double r) const { return r > r_min && r < r_max; }
};

struct HamiltonianObservable {
    SystemSpec spec;
    Observable H;
    AdmissibleRegion region;
};

HamiltonianObservable build(const SystemSpec& spec);

// --- building blocks ------------------------------------------------------------

/// PerlickI with a floating exponent, for non-closing controls.
Observable perlick_i_real(std::size_t N, double beta, double k, double mu);

/// Darboux-space Hamiltonian T - mu_t U with signed lambda2:
/// T = J- (J-^-1 - lambda2 J-)^2 / 2 * J+, U = 1/J- + lambda2 J- - 2 delta.
struct HamiltonianSplit {
    Observable T, V, U;
};
HamiltonianSplit darboux_split(std::size_t N, double lambda2, double delta);
Observable darboux_pre_ccm(std::size_t N, double lambda2, double delta, double mu_t);
/// T/U + E/U as displayed for the metamorphosed system.
Observable darboux_ccm(std::size_t N, double lambda2, double delta, double E);

/// Coupling constant metamorphosis (T + V - E) / U.
Observable ccm(const HamiltonianSplit& split, double E);

// --- coordinate maps --------------------------------------------------------------

/// A point transformation with its canonical momentum lift. coords are the
/// target canonical coordinates as observables on the source space.
struct CoordinateMap {
    std::size_t dim = 0;
    std::string name;
    std::vector<Observable> coords;
    bool excludes_origin = true;

    PhasePoint operator()(const PhasePoint& pt) const;
    Observable pullback(const Observable& f) const { return substitute(f, coords); }
};

/// Planar map z -> z^a (principal branch) lifted to momenta, P' = P / conj(f'(z)).
CoordinateMap power_map(double a, const std::string& name);

/// Perlick chart -> Kepler chart: r' = r^beta, theta' = beta theta,
/// p_r' = p_r r^(1-beta) / beta, p_theta' = p_theta / beta. inverse flips it.
CoordinateMap angular_rescale(const Rational& beta, bool inverse = false);

/// x = (xt^2 - yt^2)/2, y = xt yt with the cotangent lift.
CoordinateMap levi_civita();
PhasePoint levi_civita(const PhasePoint& pt);

// --- planar polar helpers -----------------------------------------------------------

PhasePoint from_polar(double r, double theta, double pr, double ptheta);
struct Polar {
    double r, theta, pr, ptheta;
};
Polar to_polar(const PhasePoint& pt);

/// r = sqrt(J-) as an observable.
Observable radius(std::size_t N);
/// L_ij = x_i p_j - x_j p_i.
Observable angular_momentum(std::size_t N, std::size_t i, std::size_t j);

// --- transform identities -----------------------------------------------------------

struct IdentityCheck {
    std::string name;
    double max_rel = 0.0;
};

/// Pointwise relative gaps of the three structural identities at random planar points:
/// Levi-Civita (curved Kepler(k, mu, delta) o LC = Darboux form with lambda2 = -k/4, 2 mu),
/// metamorphosis (ccm(split, E) = T/U - E/U) and angular rescale
/// (PerlickI(beta) = beta^2 (Kepler(mu / beta^2) o rescale - 4 (mu / beta^2) delta)).
std::vector<IdentityCheck> transform_identities(double k, double mu, double delta, const Rational& beta, double E,
                                                std::size_t num_points, std::uint64_t seed);

}  // namespace superint
