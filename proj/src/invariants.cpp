#include "superint/invariants.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace superint {

namespace {

const cplx I_{0.0, 1.0};

// B in the chart where H has the PerlickI form; beta = 1 gives the curved
// Kepler expression C (1 - k r^2)/r - mu + i sqrt(C) (1 + k r^2) p_r.
Observable b_factor(const Sl2Realization& g, const Observable& sqrtC, double beta, double k, double mu) {
    Observable rmb, rb;
    if (beta == 1.0) {
        rb = sqrt(g.jm);
        rmb = 1.0 / rb;
    } else {
        rb = pow(g.jm, beta / 2);
        rmb = pow(g.jm, -beta / 2);
    }
    return g.casimir(g.N) * (rmb - k * rb) - mu + I_ * sqrtC * (rmb + k * rb) * g.j3;
}

Observable a_factor(const Sl2Realization& g, const Observable& sqrtC, std::size_t a) {
    const Observable &jm = g.jm, &j3 = g.j3, &C = g.casimir(g.N);
    const std::size_t N = g.N;
    const Observable x = position(N, a), p = momentum(N, a);
    const Observable jm1 = x * x, j31 = x * p;
    Observable jp1 = p * p;
    if (g.kind.type == RealizationKind::Type::centrifugal && g.kind.b[a] != 0.0)
        jp1 = jp1 + g.kind.b[a] * g.kind.b[a] / jm1;
    const Observable re = jm1 * C - jm1 * j3 * j3 + 2.0 * j31 * j3 * jm - jp1 * jm * jm;
    const Observable im = -2.0 * sqrtC * (jm1 * j3 - j31 * jm);
    return (re + I_ * im) / jm;
}

}  // namespace

Observable InvariantSet::rotated(std::size_t i) const {
    const std::size_t N = C.dim();
    if (i < 1 || i > N || i == axis) throw DomainError("rotation index must differ from the axis and lie in 1..N");
    return bracket(re_SS(), angular_momentum(N, i - 1, axis - 1)).named("L" + std::to_string(i) + "(Re SS)");
}

InvariantSet runge_lenz(const HamiltonianObservable& H, std::size_t axis) {
    const SystemSpec& s = H.spec;
    const std::size_t N = s.N;
    if (axis < 1 || axis > N) throw DomainError("axis " + std::to_string(axis) + " out of range 1.." + std::to_string(N));
    if (s.family != Family::KeplerCurved && s.family != Family::PerlickI && s.family != Family::TTWCurved)
        throw DomainError("runge_lenz needs a KeplerCurved, PerlickI or TTWCurved system");

    const bool centrifugal = s.family == Family::TTWCurved;
    const auto g = realize(N, centrifugal ? RealizationKind::centrifugal({s.b1, s.b2}) : RealizationKind::cartesian());
    InvariantSet out;
    out.family = s.family;
    out.beta = s.family == Family::KeplerCurved ? Rational(1, 1) : s.beta;
    out.axis = axis;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) out.angular.push_back({i, j, angular_momentum(N, i, j)});

    const double beta = out.beta.value();
    out.C = g.casimir(N);
    out.sqrtC = sqrt(out.C).named("sqrtC");
    out.B = b_factor(g, out.sqrtC, beta, s.k, s.mu).named("B");
    out.A = a_factor(g, out.sqrtC, axis - 1).named("A");
    const long m = out.beta.m, n = out.beta.n;
    if (!centrifugal) {
        const Observable x = position(N, axis - 1), p = momentum(N, axis - 1);
        out.sqrtA = ((x * out.sqrtC - I_ * (x * g.j3 - p * g.jm)) / sqrt(g.jm)).named("sqrtA");
        const Observable phase = out.sqrtA / out.sqrtC;
        out.S = (out.B * (beta == 1.0 ? phase : pow(phase, beta))).named("S");
        out.SS = (ipow(out.B, n) * ipow(out.sqrtA, m)).named("SS");
    } else {
        const Observable phase2 = out.A / out.C;
        out.S = (out.B * (beta == 2.0 ? phase2 : pow(phase2, beta / 2))).named("S");
        if (m % 2 == 0)
            out.SS = (ipow(out.B, n) * ipow(out.A, m / 2)).named("SS");
        else
            out.SS = (ipow(out.B, 2 * n) * ipow(out.A, m)).named("SS");
    }
    return out;
}

Observable runge_lenz_expanded(std::size_t N, double k, double mu) {
    const auto g = realize(N, RealizationKind::cartesian());
    const Observable x1 = position(N, 0), p1 = momentum(N, 0);
    return ((1.0 - k * g.jm) * g.jp * x1 + 2.0 * k * g.j3 * g.j3 * x1 - (1.0 + k * g.jm) * g.j3 * p1 - mu * x1 / sqrt(g.jm))
        .named("L1_expanded");
}

Observable runge_lenz_im_scaled(std::size_t N, double k, double mu) {
    const auto g = realize(N, RealizationKind::cartesian());
    const Observable x = position(N, 0), p = momentum(N, 0);
    const Observable& C = g.casimir(N);
    return (C * (1.0 + k * g.jm) * g.j3 * x / g.jm - (C * (1.0 - k * g.jm) / g.jm - mu / sqrt(g.jm)) * (x * g.j3 - p * g.jm))
        .named("sqrtC ImS");
}

Observable runge_lenz_modulus_squared(const HamiltonianObservable& H) {
    const auto& s = H.spec;
    if (s.family != Family::KeplerCurved) throw DomainError("closed-form |S|^2 is for KeplerCurved");
    const Observable C = realize(s.N, RealizationKind::cartesian()).casimir(s.N);
    return (2.0 * H.H * C - 8.0 * s.mu * s.delta * C - 4.0 * s.k * C * C + s.mu * s.mu).named("|S|^2");
}

KeplerSplit kepler_split(double k) {
    const auto g = realize(2, RealizationKind::cartesian());
    const Observable sqrtC = sqrt(g.casimir(2));
    const Observable r = sqrt(g.jm);
    const Observable x = position(2, 0), p = momentum(2, 0);
    const Observable W = ((x * sqrtC - I_ * (x * g.j3 - p * g.jm)) / r / sqrtC).named("W");
    const Observable b0 = g.casimir(2) * (1.0 - k * g.jm) / r + I_ * sqrtC * (1.0 + k * g.jm) * g.j3 / r;
    return {(b0 * W).named("S0"), W};
}

Observable ccm_invariant(double lambda2, double delta, double E) {
    const auto ks = kepler_split(-4.0 * lambda2);
    const auto lc = levi_civita();
    const Observable Ht = ccm(darboux_split(2, lambda2, delta), E);
    return (lc.pullback(ks.S0) - Ht / 2.0 * lc.pullback(ks.W)).named("S_ccm");
}

Observable perlick_ii_invariant(const SystemSpec& spec) {
    if (spec.family != Family::PerlickII || spec.N != 2) throw DomainError("perlick_ii_invariant needs a planar PerlickII");
    const double g2 = spec.gamma.value() * spec.gamma.value();
    return angular_rescale(spec.gamma).pullback(ccm_invariant(spec.lambda * spec.lambda, spec.delta, -spec.mu / g2))
        .named("S_PerlickII");
}

SampleRegion admissible_sampling(const HamiltonianObservable& H) {
    SampleRegion region;
    double limit = H.region.r_max;
    for (double r : H.region.singular_radii) limit = std::min(limit, r);
    region.r_max = std::min(region.r_max, 0.9 * limit);
    region.r_min = std::min(region.r_min, 0.5 * region.r_max);
    if (H.spec.family == Family::TTWCurved) region.min_abs_coord = 0.1;
    return region;
}

CommutationSample verify_commutation(const HamiltonianObservable& H, const Observable& I, std::size_t num_points,
                                     std::uint64_t seed) {
    const SampleRegion region = admissible_sampling(H);
    std::mt19937_64 rng(seed);
    CommutationSample out;
    out.num_points = num_points;
    for (std::size_t k = 0; k < num_points; ++k) {
        const PhasePoint pt = sample_point(rng, H.spec.N, region);
        const Jet a = H.H.jet(pt, 1), b = I.jet(pt, 1);
        const std::size_t N = pt.dim();
        cplx v{};
        double scale = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            v += a.grad[i] * b.grad[N + i] - b.grad[i] * a.grad[N + i];
            scale += std::abs(a.grad[i] * b.grad[N + i]) + std::abs(b.grad[i] * a.grad[N + i]);
        }
        if (out.worst.empty() || std::abs(v) > out.max_abs) {
            out.max_abs = std::abs(v);
            out.worst = pt.state();
        }
        out.max_rel = std::max(out.max_rel, std::abs(v) / (1.0 + scale));
    }
    return out;
}

std::size_t jacobian_rank(const std::vector<Observable>& fs, const PhasePoint& pt, double rel_tol) {
    const std::size_t d = 2 * pt.dim();
    Eigen::MatrixXd J(fs.size(), d);
    for (std::size_t r = 0; r < fs.size(); ++r) {
        const Jet j = fs[r].jet(pt, 1);
        for (std::size_t c = 0; c < d; ++c) J(r, c) = j.grad[c].real();
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) == 0.0) return 0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) ++rank;
    return rank;
}

}  // namespace superint
