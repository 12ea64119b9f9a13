#include "superint/coalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace superint {

std::string RealizationKind::label() const {
    return type == Type::cartesian ? "cartesian" : "centrifugal";
}

Sl2Realization realize(std::size_t N, const RealizationKind& kind) {
    if (N == 0) throw DomainError("realization needs N >= 1");
    const bool cf = kind.type == RealizationKind::Type::centrifugal;
    if (cf && kind.b.size() != N)
        throw DimensionError("centrifugal realization needs " + std::to_string(N) + " coefficients, got " +
                             std::to_string(kind.b.size()));
    if (!cf && !kind.b.empty()) throw DimensionError("cartesian realization takes no coefficients");

    Sl2Realization r;
    r.N = N;
    r.kind = kind;
    for (std::size_t i = 0; i < N; ++i) {
        const Observable x = position(N, i), p = momentum(N, i);
        Observable jm = x * x, jp = p * p, j3 = x * p;
        if (cf && kind.b[i] != 0.0) jp = jp + (kind.b[i] * kind.b[i]) / (x * x);
        if (i > 0) {
            jm = r.jm_l.back() + jm;
            jp = r.jp_l.back() + jp;
            j3 = r.j3_l.back() + j3;
        }
        const std::string l = std::to_string(i + 1);
        r.jm_l.push_back(jm.named("J-^(" + l + ")"));
        r.jp_l.push_back(jp.named("J+^(" + l + ")"));
        r.j3_l.push_back(j3.named("J3^(" + l + ")"));
        r.casimirs.push_back((r.jp_l.back() * r.jm_l.back() - r.j3_l.back() * r.j3_l.back()).named("C^(" + l + ")"));
    }
    r.jm = r.jm_l.back();
    r.jp = r.jp_l.back();
    r.j3 = r.j3_l.back();
    return r;
}

CoalgebraReport verify_coalgebra_relations(const Sl2Realization& r, std::size_t num_points, std::uint64_t seed,
                                           double min_abs_coord) {
    CoalgebraReport rep;
    rep.N = r.N;
    rep.kind = r.kind.label();
    rep.num_points = num_points;
    rep.seed = seed;
    SampleRegion region;
    if (r.kind.type == RealizationKind::Type::centrifugal) region.min_abs_coord = min_abs_coord;
    rep.min_abs_coord = region.min_abs_coord;

    struct Check {
        std::string name;
        std::function<cplx(const PhasePoint&)> violation;
    };
    std::vector<Check> checks;
    const std::size_t N = r.N;
    for (std::size_t i = 1; i <= N; ++i) {
        for (std::size_t j = i; j <= N; ++j) {
            const auto tag = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
            const Observable &j3i = r.j3_l[i - 1], &jmi = r.jm_l[i - 1], &jpi = r.jp_l[i - 1];
            const Observable &jmj = r.jm_l[j - 1], &jpj = r.jp_l[j - 1];
            checks.push_back({"{J3^i,J+^j}=2J+^i " + tag,
                              [=](const PhasePoint& pt) { return poisson_bracket(j3i, jpj, pt) - 2.0 * jpi.value(pt); }});
            checks.push_back({"{J3^i,J-^j}=-2J-^i " + tag,
                              [=](const PhasePoint& pt) { return poisson_bracket(j3i, jmj, pt) + 2.0 * jmi.value(pt); }});
            checks.push_back({"{J-^i,J+^j}=4J3^i " + tag,
                              [=](const PhasePoint& pt) { return poisson_bracket(jmi, jpj, pt) - 4.0 * j3i.value(pt); }});
        }
    }
    for (std::size_t l = 1; l <= N; ++l) {
        const Observable& c = r.casimirs[l - 1];
        const auto tag = " l=" + std::to_string(l);
        checks.push_back({"{C^l,J-}=0" + tag, [=, &r](const PhasePoint& pt) { return poisson_bracket(c, r.jm, pt); }});
        checks.push_back({"{C^l,J+}=0" + tag, [=, &r](const PhasePoint& pt) { return poisson_bracket(c, r.jp, pt); }});
        checks.push_back({"{C^l,J3}=0" + tag, [=, &r](const PhasePoint& pt) { return poisson_bracket(c, r.j3, pt); }});
        for (std::size_t m = l + 1; m <= N; ++m) {
            const Observable& d = r.casimirs[m - 1];
            checks.push_back({"{C^l,C^m}=0" + tag + " m=" + std::to_string(m),
                              [=](const PhasePoint& pt) { return poisson_bracket(c, d, pt); }});
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<PhasePoint> pts;
    for (std::size_t k = 0; k < num_points; ++k) pts.push_back(sample_point(rng, N, region));
    for (const auto& c : checks) {
        RelationResult res{c.name, 0.0, pts.front().state()};
        for (const auto& pt : pts) {
            const double v = std::abs(c.violation(pt));
            if (v > res.max_violation) res = {c.name, v, pt.state()};
        }
        rep.max_violation = std::max(rep.max_violation, res.max_violation);
        rep.relations.push_back(std::move(res));
    }
    return rep;
}

}  // namespace superint
