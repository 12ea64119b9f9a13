#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "superint/coalgebra.hpp"

#include <cmath>

using namespace superint;

TEST_CASE("cartesian generators on unit circular data") {
    const auto r = realize(2, RealizationKind::cartesian());
    const PhasePoint pt({1.0, 0.0}, {0.0, 1.0});
    CHECK(r.jm.real_value(pt) == 1.0);
    CHECK(r.jp.real_value(pt) == 1.0);
    CHECK(r.j3.real_value(pt) == 0.0);
    CHECK(r.casimir(2).real_value(pt) == 1.0);
    CHECK(r.casimir(1).real_value(pt) == 0.0);
}

TEST_CASE("one-site Casimir vanishes identically") {
    const auto r = realize(1, RealizationKind::cartesian());
    std::mt19937_64 rng(4);
    for (int k = 0; k < 20; ++k) CHECK(std::abs(r.casimir(1).value(sample_point(rng, 1, {}))) < 1e-12);
}

TEST_CASE("generators are the explicit sums") {
    const auto r = realize(3, RealizationKind::cartesian());
    const PhasePoint pt({0.3, -1.2, 0.7}, {1.1, 0.4, -0.6});
    double jm = 0, jp = 0, j3 = 0;
    for (int i = 0; i < 3; ++i) {
        jm += pt.x()[i] * pt.x()[i];
        jp += pt.p()[i] * pt.p()[i];
        j3 += pt.x()[i] * pt.p()[i];
    }
    CHECK(r.jm.real_value(pt) == doctest::Approx(jm).epsilon(1e-15));
    CHECK(r.jp.real_value(pt) == doctest::Approx(jp).epsilon(1e-15));
    CHECK(r.j3.real_value(pt) == doctest::Approx(j3).epsilon(1e-15));
    // C^(2) is L12^2
    const double l12 = pt.x()[0] * pt.p()[1] - pt.x()[1] * pt.p()[0];
    CHECK(r.casimir(2).real_value(pt) == doctest::Approx(l12 * l12));
}

TEST_CASE("centrifugal Casimir in polar form") {
    const double b1 = 0.4, b2 = 0.7;
    const auto r = realize(2, RealizationKind::centrifugal({b1, b2}));
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double pi = std::acos(-1.0);
    for (int k = 0; k < 20; ++k) {
        const double rad = 0.3 + 1.7 * u(rng), th = 0.05 + (pi / 2 - 0.1) * u(rng);
        const double pr = 2 * u(rng) - 1, pth = 2 * u(rng) - 1;
        const double c = std::cos(th), s = std::sin(th);
        const PhasePoint pt({rad * c, rad * s}, {c * pr - s * pth / rad, s * pr + c * pth / rad});
        const double expect = pth * pth + b1 * b1 / (c * c) + b2 * b2 / (s * s);
        CHECK(r.casimir(2).real_value(pt) == doctest::Approx(expect).epsilon(1e-12));
    }
}

TEST_CASE("centrifugal with b = 0 agrees with cartesian") {
    const auto a = realize(3, RealizationKind::cartesian());
    const auto b = realize(3, RealizationKind::centrifugal({0, 0, 0}));
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
        const auto pt = sample_point(rng, 3, {});
        CHECK(a.jp.value(pt) == b.jp.value(pt));
        for (std::size_t l = 1; l <= 3; ++l) CHECK(a.casimir(l).value(pt) == b.casimir(l).value(pt));
    }
}

TEST_CASE("homomorphism relations and Casimir centrality") {
    SUBCASE("N=3 cartesian") {
        const auto rep = verify_coalgebra_relations(realize(3, RealizationKind::cartesian()), 100, 1);
        CHECK(rep.max_violation < 1e-10);
        CHECK(rep.relations.size() == 3 * 6 + 3 * 3 + 3);
    }
    SUBCASE("N=1 single site") {
        for (auto kind : {RealizationKind::cartesian(), RealizationKind::centrifugal({0.8})}) {
            const auto rep = verify_coalgebra_relations(realize(1, kind), 50, 2);
            CHECK(rep.max_violation < 1e-12);
        }
    }
    SUBCASE("N=4 centrifugal") {
        const auto rep = verify_coalgebra_relations(realize(4, RealizationKind::centrifugal({0.5, 0, 0.3, 0})), 100, 3);
        CHECK(rep.max_violation < 1e-10);
        CHECK(rep.min_abs_coord == 0.1);
    }
}

TEST_CASE("a broken triple is detected") {
    auto r = realize(2, RealizationKind::cartesian());
    r.jp_l[1] = r.jp_l[1] * 1.01;
    r.jp = r.jp_l[1];
    CHECK(verify_coalgebra_relations(r, 10, 0).max_violation > 1e-3);
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(realize(0, RealizationKind::cartesian()), DomainError);
    CHECK_THROWS_AS(realize(3, RealizationKind::centrifugal({1.0, 2.0})), DimensionError);
}
