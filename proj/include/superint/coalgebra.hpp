#pragma once

// sl(2) generator triples built by iterating the trivial coproduct
// J -> J (x) 1 + 1 (x) J over N sites, with the left Casimirs
// C^(l) = J+^(l) J-^(l) - (J3^(l))^2 acting on the first l coordinates.

#include "superint/phasespace.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace superint {

struct RealizationKind {
    enum class Type { cartesian, centrifugal };
    Type type = Type::cartesian;
    std::vector<double> b;  // centrifugal coefficients, one per site

    static RealizationKind cartesian() { return {}; }
    static RealizationKind centrifugal(std::vector<double> b) { return {Type::centrifugal, std::move(b)}; }
    std::string label() const;
};

struct Sl2Realization {
    std::size_t N = 0;
    RealizationKind kind;
    Observable jm, jp, j3;  // N-site generators
    // l-site generators, index l-1
    std::vector<Observable> jm_l, jp_l, j3_l;
    std::vector<Observable> casimirs;  // C^(l), index l-1

    const Observable& casimir(std::size_t l) const { return casimirs.at(l - 1); }
};

Sl2Realization realize(std::size_t N, const RealizationKind& kind);

struct RelationResult {
    std::string relation;
    double max_violation = 0.0;
    std::vector<double> worst;  // (x, p) of the largest violation
};

struct CoalgebraReport {
    std::size_t N = 0;
    std::string kind;
    std::size_t num_points = 0;
    std::uint64_t seed = 0;
    double min_abs_coord = 0.0;  // sampling exclusion around x_i = 0
    std::vector<RelationResult> relations;
    double max_violation = 0.0;
};

/// Checks {J3^i, J+^j} = 2 J+^i, {J3^i, J-^j} = -2 J-^i, {J-^i, J+^j} = 4 J3^i
/// for all i <= j <= N, plus Casimir centrality and mutual commutation.
/// Centrifugal realizations are sampled with |x_i| >= min_abs_coord; near
/// x_i = 0 the b^2/x^2 terms make the cancellation lose absolute accuracy.
CoalgebraReport verify_coalgebra_relations(const Sl2Realization& r, std::size_t num_points, std::uint64_t seed,
                                           double min_abs_coord = 0.1);

}  // namespace superint
