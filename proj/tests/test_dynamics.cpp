#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "superint/dynamics.hpp"
#include "superint/invariants.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace superint;

namespace {

constexpr double pi = std::numbers::pi;

SystemSpec kepler(double k, double delta = 0.0) {
    SystemSpec s;
    s.family = Family::KeplerCurved;
    s.k = k;
    s.delta = delta;
    return s;
}

SystemSpec perlick_i(Rational beta, double k = 0.0, std::size_t N = 2) {
    SystemSpec s;
    s.family = Family::PerlickI;
    s.beta = beta;
    s.k = k;
    s.N = N;
    return s;
}

SystemSpec perlick_ii(Rational gamma) {
    SystemSpec s;
    s.family = Family::PerlickII;
    s.gamma = gamma;
    s.lambda = 0.2;
    s.delta = 0.05;
    return s;
}

double radial_period_of(const HamiltonianObservable& H, const PhasePoint& init) {
    IntegrateOptions o;
    o.stop_after_pericentres = 4;
    const auto p = radial_period(integrate(H, init, 1e6, o));
    REQUIRE(p.has_value());
    return *p;
}

}  // namespace

TEST_CASE("flat circular Kepler orbit") {
    const auto H = build(kepler(0.0));
    const auto traj = integrate(H, PhasePoint({1.0, 0.0}, {0.0, 1.0}), 4 * pi);
    for (const auto& s : traj.states) CHECK(std::abs(std::hypot(s[0], s[1]) - 1.0) < 1e-9);
    const auto c = detect_closure(traj, 1e-5);
    REQUIRE(c.closed);
    CHECK(std::abs(*c.period - 2 * pi) < 1e-6);
    for (std::size_t k = 1; k < traj.times.size(); ++k) CHECK(traj.times[k] > traj.times[k - 1]);
}

TEST_CASE("Kepler third law") {
    const auto H = build(kepler(0.0));
    const auto traj = integrate(H, PhasePoint({1.0, 0.0}, {0.0, 1.2}), 40.0);
    const double a = -1.0 / (2.0 * traj.energy.front());
    const auto c = detect_closure(traj, 1e-5);
    REQUIRE(c.closed);
    CHECK(std::abs(*c.period - 2 * pi * std::pow(a, 1.5)) < 1e-5);
}

TEST_CASE("curved Kepler energy drift over ten periods") {
    const auto H = build(kepler(0.1));
    const PhasePoint init({1.0, 0.2}, {0.1, 0.9});
    const double T = radial_period_of(H, init);
    const auto traj = integrate(H, init, 10.2 * T);
    CHECK(pericentre_times(traj).size() >= 10);
    CHECK(energy_drift(traj) < 1e-10);
    CHECK(traj.stats.tol == 1e-12);
}

TEST_CASE("time reversal returns to the initial state") {
    const auto H = build(kepler(0.1, 0.05));
    const PhasePoint init({1.0, 0.2}, {0.1, 0.9});
    const auto fwd = integrate(H, init, 3.0);
    const auto back = integrate(H, fwd.point(fwd.states.size() - 1), -3.0);
    CHECK(back.times.back() == doctest::Approx(-3.0));
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(back.states.back()[i] - fwd.states.front()[i]) < 10 * 1e-12);
}

TEST_CASE("PerlickII conserves H and L") {
    const auto spec = perlick_ii({1, 1});
    const auto H = build(spec);
    IntegrateOptions o;
    o.invariants = {{"L12", angular_momentum(2, 0, 1)}};
    const auto traj = integrate(H, from_polar(0.8, 0.3, 0.05, 0.6), 20.0, o);
    CHECK_FALSE(traj.event.has_value());
    CHECK(energy_drift(traj) < 1e-9);
    CHECK(relative_drift(traj.log("L12")) < 1e-9);
}

TEST_CASE("rational PerlickI closes, period a rational multiple of the radial one") {
    const PhasePoint init({1.0, 0.2}, {0.1, 0.7});
    for (Rational b : {Rational(1, 2), Rational(2, 1), Rational(1, 3), Rational(3, 2)}) {
        CAPTURE(b.str());
        const auto H = build(perlick_i(b));
        const double T = radial_period_of(H, init);
        const auto c = detect_closure(integrate(H, init, (b.m + 0.5) * T), 1e-5);
        REQUIRE(c.closed);
        CHECK(c.miss_distance < 1e-5);
        const double ratio = *c.period / T;
        bool rational = false;
        for (long q = 1; q <= b.m + b.n; ++q)
            if (std::abs(ratio * q - std::round(ratio * q)) < 1e-4 * q) rational = true;
        CHECK(rational);
    }
}

TEST_CASE("rational PerlickII closes") {
    const auto init = from_polar(0.8, 0.3, 0.05, 0.6);
    for (Rational g : {Rational(1, 1), Rational(2, 1), Rational(3, 2), Rational(1, 3), Rational(1, 2)}) {
        CAPTURE(g.str());
        const auto H = build(perlick_ii(g));
        const double T = radial_period_of(H, init);
        const auto c = detect_closure(integrate(H, init, 5.5 * T), 1e-5);
        CHECK(c.closed);
        CHECK(c.miss_distance < 1e-5);
    }
}

TEST_CASE("irrational beta does not close") {
    auto H = build(perlick_i({1, 1}));
    H.H = perlick_i_real(2, 1 / std::sqrt(2.0), 0.0, 1.0);
    const PhasePoint init({1.0, 0.2}, {0.1, 0.7});
    const double T = radial_period_of(H, init);
    const auto traj = integrate(H, init, 50.2 * T);
    CHECK(pericentre_times(traj).size() >= 50);
    const auto c = detect_closure(traj, 1e-5);
    CHECK(c.bounded);
    CHECK_FALSE(c.closed);
    CHECK(c.miss_distance > 1e-3);
}

TEST_CASE("orbit equation along curved Kepler trajectories") {
    for (double k : {0.0, 0.1})
        for (double delta : {0.0, 0.05})
            for (double sgn : {1.0, -1.0}) {
                const auto spec = kepler(k, delta);
                const auto traj = integrate(build(spec), PhasePoint({1.0, 0.2}, {0.1 * sgn, 0.9 * sgn}), 40.0);
                CHECK(orbit_equation_residual(spec, traj) < 1e-8);
            }
}

TEST_CASE("approach to the origin ends with an event") {
    const auto H = build(kepler(0.0));
    IntegrateOptions o;
    o.singular_margin = 1e-3;
    const auto traj = integrate(H, PhasePoint({1.0, 0.0}, {-0.5, 0.0}), 10.0, o);
    REQUIRE(traj.event.has_value());
    CHECK(traj.event->kind == "singular-approach");
    CHECK(traj.times.back() < 10.0);
}

TEST_CASE("integrate rejects bad input") {
    const auto H = build(kepler(0.0));
    IntegrateOptions o;
    o.tol = 1e-3;
    CHECK_THROWS_AS(integrate(H, PhasePoint({1.0, 0.0}, {0.0, 1.0}), 1.0, o), DomainError);
    CHECK_THROWS_AS(integrate(H, PhasePoint({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}), 1.0), DimensionError);
}

TEST_CASE("dense output agrees with stored states") {
    const auto H = build(kepler(0.1));
    const auto traj = integrate(H, PhasePoint({1.0, 0.2}, {0.1, 0.9}), 5.0);
    const std::size_t k = traj.times.size() / 2;
    const auto s = traj.dense_state(traj.times[k]);
    for (std::size_t i = 0; i < 4; ++i) CHECK(s[i] == traj.states[k][i]);
    const double tm = 0.5 * (traj.times[k] + traj.times[k + 1]);
    CHECK(std::abs(H.H.real_value(PhasePoint::from_state(traj.dense_state(tm))) - traj.energy[0]) < 1e-10);
    CHECK_THROWS_AS(traj.dense_state(6.0), DomainError);
}

TEST_CASE("csv layout") {
    const auto H = build(kepler(0.0));
    IntegrateOptions o;
    o.invariants = {{"L12", angular_momentum(2, 0, 1)}};
    const auto traj = integrate(H, PhasePoint({1.0, 0.0}, {0.0, 1.0}), 1.0, o);
    std::ostringstream os;
    write_csv(os, traj);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,x1,x2,p1,p2,H,L12");
    std::size_t rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == traj.times.size());
}

TEST_CASE("scalar curvature of the round sphere") {
    // stereographic metric 4/(1+r^2)^2 delta, R = 2 in 2D and 6 in 3D
    for (std::size_t d : {2u, 3u}) {
        const MetricFn g = [d](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
            const double f = 4.0 / std::pow(1.0 + x.squaredNorm(), 2);
            return f * Eigen::MatrixXd::Identity(d, d);
        };
        Eigen::VectorXd x = Eigen::VectorXd::Constant(d, 0.4);
        CHECK(scalar_curvature(g, x, 1e-2) == doctest::Approx(d * (d - 1.0)).epsilon(1e-8));
    }
}

TEST_CASE("curvature examples") {
    std::vector<double> radii;
    for (int i = 1; i <= 10; ++i) radii.push_back(0.3 * i);

    const auto flat = curvature_check(perlick_i({1, 1}, 0.0), radii);
    for (const auto& s : flat.samples) {
        CHECK(s.closed_3d == 0.0);
        CHECK(std::abs(s.numeric_3d) < 1e-6);
    }

    const auto slice = curvature_check(perlick_i({2, 1}, 0.5), radii);
    for (const auto& s : slice.samples) {
        CHECK(s.closed_2d == doctest::Approx(16.0));
        CHECK(std::abs(s.numeric_2d - 16.0) < 1e-6 * 16.0);
    }

    const auto one = curvature_check(perlick_i({1, 2}, 0.1), {1.3});
    REQUIRE(one.samples.size() == 1);
    const double a = std::pow(1.3, -0.5) + 0.1 * std::pow(1.3, 0.5);
    CHECK(one.samples[0].closed_3d == doctest::Approx(2 * 0.75 * a * a + 24 * 0.25 * 0.1));
    CHECK(one.max_deviation < 1e-6);
}

TEST_CASE("curvature grid across beta and k") {
    std::vector<double> radii;
    for (int i = 1; i <= 10; ++i) radii.push_back(0.3 * i);
    for (Rational b : {Rational(1, 2), Rational(1, 1), Rational(2, 1)})
        for (double k : {0.0, 0.1, 0.5}) CHECK(curvature_check(perlick_i(b, k), radii).max_deviation < 1e-6);
}

TEST_CASE("curvature skips conformal-factor zeros") {
    // r^-1 - r vanishes at r = 1
    const auto rep = curvature_check(perlick_i({1, 1}, -1.0), {0.5, 1.0});
    REQUIRE(rep.samples.size() == 2);
    CHECK_FALSE(rep.samples[0].skipped);
    CHECK(rep.samples[1].skipped);
    CHECK_FALSE(rep.samples[1].note.empty());
    CHECK_THROWS_AS(curvature_check(kepler(0.1), {1.0}), DomainError);
}

TEST_CASE("radial interval of a bounded curved Kepler orbit") {
    const auto H = build(kepler(0.1));
    const auto init = from_polar(1.0, 0.0, 0.0, 0.9);
    const double E = H.H.real_value(init);
    const auto iv = radial_interval(H, E, 0.9, 1.0);
    REQUIRE(iv.has_value());
    CHECK(iv->first < 1.0);
    CHECK(iv->second >= 1.0 - 1e-9);
    const auto traj = integrate(H, init, 20.0);
    double lo = 1e9, hi = 0;
    for (const auto& s : traj.states) {
        lo = std::min(lo, std::hypot(s[0], s[1]));
        hi = std::max(hi, std::hypot(s[0], s[1]));
    }
    CHECK(lo == doctest::Approx(iv->first).epsilon(1e-4));
    CHECK(hi == doctest::Approx(iv->second).epsilon(1e-4));
}
