// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "superint/cli.hpp"
#include "superint/coalgebra.hpp"
#include "superint/dynamics.hpp"
#include "superint/invariants.hpp"
#include "superint/quantum.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

using namespace superint;
using nlohmann::json;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) detail << "; ";
            pass = false;
            detail << "failed: " << what;
        }
    }
};

const std::vector<Rational> higher_betas = {{1, 2}, {2, 1}, {1, 3}, {3, 2}};

SystemSpec perlick_i(Rational beta, double k, std::size_t N) {
    SystemSpec s;
    s.family = Family::PerlickI;
    s.beta = beta;
    s.k = k;
    s.N = N;
    return s;
}

std::string tag(const SystemSpec& s) { return s.to_json().dump(); }

// Runs one CLI command into a scratch directory.
RunResult cli(const json& j) {
    static int counter = 0;
    json c = j;
    c["out"] = (std::filesystem::temp_directory_path() / ("superint_acceptance_" + std::to_string(counter++))).string();
    return run(RunConfig::from_json(c));
}

std::string failures(const RunResult& r) {
    std::string s;
    for (const auto& f : r.report["failures"]) s += (s.empty() ? "" : ",") + f["name"].get<std::string>();
    return s;
}

RadialProblem problem(Rational beta, double k, std::size_t N, int l) {
    RadialProblem p;
    p.beta = beta;
    p.k = k;
    p.N = N;
    p.l = l;
    return p;
}

RadialGrid operator_grid(double k) { return RadialGrid::make(-6.0, k > 0 ? 12.0 : 7.0, 0.02); }

std::vector<GridFunction> test_functions(const RadialGrid& g, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<GridFunction> out;
    for (int q = 0; q < count; ++q) {
        const double c = 1.5 * U(rng), w = 0.75 + 0.25 * U(rng), a = 0.3 * U(rng);
        out.push_back(g.sample([=](double r) {
            const double t = std::log(r);
            return std::exp(-(t - c) * (t - c) / (2 * w * w)) * (1 + a * t);
        }));
    }
    return out;
}

// --- criteria -------------------------------------------------------------------

void algebra(Outcome& o) {
    double worst = 0.0;
    for (std::size_t N : {1u, 2u, 3u, 5u})
        for (bool centrifugal : {false, true}) {
            const auto kind = centrifugal ? RealizationKind::centrifugal(std::vector<double>(N, 0.5)) : RealizationKind::cartesian();
            const auto rep = verify_coalgebra_relations(realize(N, kind), 100, 42);
            worst = std::max(worst, rep.max_violation);
            o.require(rep.max_violation < 1e-10, "N=" + std::to_string(N) + " " + rep.kind);
        }
    o.detail << "max violation " << worst;
}

void quadratic(Outcome& o) {
    double worst = 0.0;
    for (double k : {0.0, 0.1})
        for (std::size_t N : {2u, 3u})
            for (Family f : {Family::KeplerCurved, Family::PerlickI}) {
                SystemSpec s = perlick_i({1, 1}, k, N);
                s.family = f;
                const auto H = build(s);
                const auto inv = runge_lenz(H);
                std::vector<Observable> fs;
                for (const auto& a : inv.angular) fs.push_back(a.L);
                fs.push_back(real_part(inv.S));
                fs.push_back(imag_part(inv.S) * inv.sqrtC);
                for (std::size_t i = 0; i < fs.size(); ++i) {
                    const double v = verify_commutation(H, fs[i], 50, 42 + i).max_abs;
                    worst = std::max(worst, v);
                    o.require(v < 1e-10, tag(s) + " #" + std::to_string(i));
                }
            }
    o.detail << "max |{H, I}| " << worst;
}

void higher_order(Outcome& o) {
    double drift = 0.0, energy = 0.0;
    for (Rational b : higher_betas)
        for (std::size_t N : {2u, 3u})
            for (double k : {0.0, 0.1}) {
                const auto s = perlick_i(b, k, N);
                const auto r = cli({{"command", "verify-invariants"},
                                    {"system", s.to_json()},
                                    {"options", {{"num_points", 5}, {"periods", 10}}}});
                o.require(r.exit_code == 0, tag(s) + " " + failures(r));
                o.require(r.report["results"].value("pericentres", 0) >= 10, tag(s) + " fewer than 10 periods");
                for (const auto& c : r.report["checks"]) {
                    const auto name = c["name"].get<std::string>();
                    if (name == "drift ReSS" || name == "drift ImSS") drift = std::max(drift, c["value"].get<double>());
                    if (name == "energy-drift") energy = std::max(energy, c["value"].get<double>());
                }
            }
    o.detail << "max SS drift " << drift << ", max energy drift " << energy;
}

void closure(Outcome& o) {
    double miss = 0.0;
    for (Rational b : higher_betas)
        for (double k : {0.0, 0.1}) {
            const auto s = perlick_i(b, k, 2);
            const auto r = cli({{"command", "closure"}, {"system", s.to_json()}});
            o.require(r.exit_code == 0, tag(s) + " " + failures(r));
            miss = std::max(miss, r.report["results"]["miss_distance"].get<double>());
        }
    for (Rational g : higher_betas) {
        SystemSpec s;
        s.family = Family::PerlickII;
        s.gamma = g;
        s.lambda = 0.2;
        s.delta = 0.05;
        const auto r = cli({{"command", "closure"}, {"system", s.to_json()}});
        o.require(r.exit_code == 0, tag(s) + " " + failures(r));
        miss = std::max(miss, r.report["results"]["miss_distance"].get<double>());
    }
    const auto ctrl = cli({{"command", "closure"},
                           {"system", perlick_i({1, 1}, 0.0, 2).to_json()},
                           {"options", {{"beta_real", 0.7071}, {"periods", 50.2}}}});
    o.require(ctrl.exit_code == 0, "irrational control " + failures(ctrl));
    o.require(ctrl.report["results"].value("pericentres", 0) >= 50, "control shorter than 50 periods");
    o.detail << "max miss " << miss << ", control miss " << ctrl.report["results"]["miss_distance"].get<double>();
}

void orbit_equation(Outcome& o) {
    double worst = 0.0;
    for (double k : {0.0, 0.1})
        for (double delta : {0.0, 0.05}) {
            SystemSpec s;
            s.k = k;
            s.delta = delta;
            const auto traj = integrate(build(s), PhasePoint({1.0, 0.2}, {0.1, 0.7}), 30.0);
            const double v = orbit_equation_residual(s, traj);
            worst = std::max(worst, v);
            o.require(v < 1e-8, tag(s));
        }
    o.detail << "max residual " << worst;
}

void transforms(Outcome& o) {
    double worst = 0.0;
    for (Rational b : higher_betas)
        for (double k : {0.0, 0.1}) {
            SystemSpec s;
            s.k = k;
            s.delta = 0.05;
            const auto r = cli({{"command", "ccm-check"}, {"system", s.to_json()}, {"options", {{"beta", b.str()}}}});
            o.require(r.exit_code == 0, "beta=" + b.str() + " " + failures(r));
            for (const auto& c : r.report["checks"]) worst = std::max(worst, c["value"].get<double>());
        }
    o.detail << "max relative gap " << worst;
}

void curvature(Outcome& o) {
    double worst = 0.0;
    for (Rational b : {Rational(1, 2), Rational(1, 1), Rational(2, 1)})
        for (double k : {0.0, 0.1, 0.5}) {
            const auto s = perlick_i(b, k, 3);
            const auto r = cli({{"command", "curvature"}, {"system", s.to_json()}});
            o.require(r.exit_code == 0, tag(s) + " " + failures(r));
            o.require(r.report["results"]["skipped"] == 0, tag(s) + " skipped radii");
            worst = std::max(worst, r.report["results"]["max_deviation"].get<double>());
        }
    o.detail << "max deviation " << worst;
}

void spectra(Outcome& o) {
    double worst = 0.0;
    for (Rational b : {Rational(1, 1), Rational(1, 2), Rational(2, 1)})
        for (double k : {0.0, 0.05})
            for (std::size_t N : {2u, 3u}) {
                const auto t = eigensolve(problem(b, k, N, 0), 5);
                bool all = t.rows.size() == 5;
                for (const auto& row : t.rows) all = all && row.e_grid.has_value();
                worst = std::max(worst, t.max_residual());
                o.require(all && t.max_residual() < 1e-5, "beta=" + b.str() + " k=" + std::to_string(k) + " N=" + std::to_string(N));
            }
    o.detail << "max relative residual " << worst;
}

void ladders(Outcome& o) {
    double shape = 0.0, kill = 0.0, chain = 0.0;
    for (double k : {0.0, 0.05})
        for (double l : {0.0, 1.0, 2.0}) {
            const Sector s{k, 1.0, 1.0, l};
            const auto g = operator_grid(k);
            const auto m = g.measure(k);
            const auto up = ladder(s, g, Ladder::raise), down = ladder(s, g, Ladder::lower);
            const auto H = hamiltonian(s, g), H1 = hamiltonian(s.with_l(l + 1), g);
            const double E = sector_energy(s);
            for (const auto& phi : test_functions(g, 5, 11)) {
                const double n = norm(phi, m, 20);
                const GridFunction fact = -0.5 * (up * (down * phi)) - (H * phi - E * phi);
                const GridFunction si = -0.5 * (down * (up * phi)) + E * phi - H1 * phi;
                shape = std::max({shape, norm(fact, m, 20) / n, norm(si, m, 20) / n});
            }
            // a_{l+1} annihilates the ground state of sector l + 1
            const Sector s1 = s.with_l(l + 1);
            const auto rho = g.sample([&](double r) { return ground_state(s1, r); });
            kill = std::max(kill, norm(ladder(s1, g, Ladder::lower) * rho, m, 20) / norm(rho, m, 20));
            const GridFunction psi = up * rho;
            const GridFunction res = H * psi - energy(0, s1) * psi;
            chain = std::max(chain, norm(res, m, 20) / norm(psi, m, 20));
        }
    o.require(shape < 1e-6, "factorization / shape invariance");
    o.require(kill < 1e-8, "ground state annihilation");
    o.require(chain < 1e-6, "raised eigenfunction");
    o.detail << "identities " << shape << ", annihilation " << kill << ", chain " << chain;
}

void degenerate(Outcome& o) {
    double worst = 0.0;
    std::size_t pairs = 0;
    for (Rational b : {Rational(1, 2), Rational(2, 1)})
        for (double k : {0.0, 0.05}) {
            const auto base = problem(b, k, 2, 0);
            for (const auto& grp : degeneracy(base, -100.0, 0.0, 6, 6)) {
                if (grp.size() < 2) continue;
                std::vector<double> e;
                for (const auto& [n, l] : grp) {
                    auto p = base;
                    p.l = l;
                    e.push_back(sector_eigenvalues(reduce(p), n + 1).back());
                }
                for (std::size_t i = 1; i < e.size(); ++i, ++pairs) {
                    const double v = std::abs(e[i] - e[0]) / std::abs(e[0]);
                    worst = std::max(worst, v);
                    o.require(v < 1e-5, "beta=" + b.str() + " (" + std::to_string(grp[i].first) + "," +
                                            std::to_string(grp[i].second) + ")");
                }
            }
        }
    o.require(pairs > 0, "no degenerate pairs found");
    o.detail << pairs << " pairs, max relative gap " << worst;
}

void laplace_beltrami(Outcome& o) {
    double worst = 0.0;
    const auto g = operator_grid(0.0);
    for (std::size_t N : {2u, 3u, 4u})
        for (Rational b : {Rational(1, 2), Rational(1, 1), Rational(2, 1)})
            for (double k : {0.0, 0.1})
                for (const auto& u : test_functions(g, 5, 5)) worst = std::max(worst, laplace_beltrami_residual(problem(b, k, N, 1), g, u));
    o.require(worst < 1e-6, "residual");
    o.detail << "max residual " << worst;
}

void ttw(Outcome& o) {
    std::map<std::string, double> worst;
    for (Rational b : {Rational(1, 1), Rational(1, 2), Rational(2, 1), Rational(3, 2)}) {
        SystemSpec s;
        s.family = Family::TTWCurved;
        s.beta = b;
        s.k = 0.1;
        s.b1 = 0.3;
        s.b2 = 0.5;
        const auto r = cli({{"command", "ttw-check"}, {"system", s.to_json()}});
        o.require(r.exit_code == 0, tag(s) + " " + failures(r));
        for (const auto& c : r.report["checks"]) {
            double& w = worst[c["name"].get<std::string>()];
            w = std::max(w, c["value"].get<double>());
        }
    }
    for (const auto& [name, v] : worst) o.detail << (o.detail.tellp() > 0 ? ", " : "") << name << " " << v;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Outcome&)> body;
        double budget_s;
    };
    const std::vector<Criterion> criteria = {
        {"algebra suite", algebra, 5},
        {"quadratic invariants", quadratic, 5},
        {"higher-order invariants", higher_order, 60},
        {"closure", closure, 120},
        {"orbit equation", orbit_equation, 0},
        {"transform identities", transforms, 0},
        {"curvature", curvature, 0},
        {"quantum spectrum", spectra, 60},
        {"shape invariance and factorization", ladders, 0},
        {"degeneracy", degenerate, 0},
        {"quantization equivalence", laplace_beltrami, 0},
        {"TTW", ttw, 0},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            criteria[i].body(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].budget_s > 0) o.require(secs < criteria[i].budget_s, "runtime budget");
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.str().c_str(), secs);
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
