#pragma once

// Constants of motion: angular momenta, the complex Runge-Lenz constant S and
// its polynomial powers B^n (sqrt A)^m for rational beta = m/n.

#include "superint/systems.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace superint {

struct AngularMomentum {
    std::size_t i, j;  // zero-based, i < j
    Observable L;
};

struct InvariantSet {
    Family family = Family::KeplerCurved;
    Rational beta;
    std::size_t axis = 1;  // one-based site used by sqrt A
    std::vector<AngularMomentum> angular;
    /// C^(N), sqrt(C^(N)).
    Observable C, sqrtC;
    /// B = C (r^-beta - k r^beta) - mu + i sqrt(C) r (r^-beta + k r^beta) p_r.
    Observable B;
    /// sqrt A = (x_a sqrt C - i (x_a J3 - p_a J-)) / sqrt(J-); empty for centrifugal kinds.
    Observable sqrtA;
    /// A = (sqrt A)^2 written through the one-site generators; valid for both kinds.
    Observable A;
    /// Local (principal branch) S = B (sqrtA / sqrtC)^beta; for beta = 1 the
    /// Runge-Lenz constant itself.
    Observable S;
    /// Polynomial constant: B^n (sqrt A)^m, or for centrifugal kinds
    /// B^n A^(m/2) (m even) / B^(2n) A^m (m odd).
    Observable SS;

    Observable re_SS() const { return real_part(SS); }
    Observable im_SS() const { return imag_part(SS); }
    /// {Re SS, L_(i, axis)}: the component along site i, one-based.
    Observable rotated(std::size_t i) const;
};

/// For KeplerCurved, PerlickI and TTWCurved. axis is one-based.
InvariantSet runge_lenz(const HamiltonianObservable& H, std::size_t axis = 1);

/// The expanded first component of the curved Runge-Lenz vector (beta = 1):
/// (1 - k x^2) p^2 x1 + 2k (x.p)^2 x1 - (1 + k x^2)(x.p) p1 - mu x1 / |x|.
Observable runge_lenz_expanded(std::size_t N, double k, double mu);

/// sqrt(C) Im S for beta = 1 written directly, without the 1/sqrt(C).
Observable runge_lenz_im_scaled(std::size_t N, double k, double mu);

/// |S|^2 = 2 E C - 8 mu delta C - 4 k C^2 + mu^2 for KeplerCurved, with E = H.
Observable runge_lenz_modulus_squared(const HamiltonianObservable& H);

/// Split S = S0 - mu W of the curved Kepler constant (beta = 1, N = 2).
struct KeplerSplit {
    Observable S0, W;
};
KeplerSplit kepler_split(double k);

/// Constant of the metamorphosed Darboux system ccm(darboux_split(lambda2,
/// delta), E): the Kepler constant pulled back through Levi-Civita with the
/// coupling replaced by H~ / 2.
Observable ccm_invariant(double lambda2, double delta, double E);

/// Local constant of a planar PerlickII system: ccm_invariant pulled back
/// through the gamma rescale (principal branch).
Observable perlick_ii_invariant(const SystemSpec& spec);

struct CommutationSample {
    std::size_t num_points = 0;
    double max_abs = 0.0;
    double max_rel = 0.0;  // |{H, I}| / (1 + |dH| |dI|)
    std::vector<double> worst;  // (x, p) where max_abs is attained
};

/// Max |{H, I}| over random admissible points.
CommutationSample verify_commutation(const HamiltonianObservable& H, const Observable& I, std::size_t num_points,
                                     std::uint64_t seed);

/// Sampling region used by the verifiers: inside the admissible radii, away
/// from x_i = 0 for centrifugal families.
SampleRegion admissible_sampling(const HamiltonianObservable& H);

/// Numerical rank of the Jacobian of the given observables (real parts) at pt,
/// singular values below rel_tol * s_max discarded.
std::size_t jacobian_rank(const std::vector<Observable>& fs, const PhasePoint& pt, double rel_tol = 1e-8);

}  // namespace superint
