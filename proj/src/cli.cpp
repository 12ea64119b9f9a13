#include "superint/cli.hpp"

#include "superint/coalgebra.hpp"
#include "superint/dynamics.hpp"
#include "superint/invariants.hpp"
#include "superint/quantum.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>

namespace superint {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* version = "0.1.0";

// Typed access to cfg.options; anything not read by the command is rejected.
class Options {
public:
    explicit Options(const json& j) : j_(j) {
        if (!j_.is_object()) throw UsageError("options must be a JSON object");
    }

    template <class T>
    T get(const std::string& key, T def) {
        seen_.insert(key);
        if (!j_.contains(key)) return def;
        try {
            return j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw UsageError("option '" + key + "' has the wrong type");
        }
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }
    const json& raw(const std::string& key) const { return j_.at(key); }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!seen_.count(key)) throw UsageError("unknown option '" + key + "'");
    }

private:
    const json& j_;
    std::set<std::string> seen_;
};

// Named pass/fail checks; a failure names the check and its worst point.
struct Checks {
    json items = json::array();
    json failures = json::array();

    void add(const std::string& name, double value, double tol, const json& worst = nullptr) {
        add(name, value, tol, std::isfinite(value) && value < tol, worst);
    }
    void add(const std::string& name, double value, double tol, bool pass, const json& worst = nullptr) {
        json c = {{"name", name}, {"value", value}, {"tol", tol}, {"pass", pass}};
        if (!worst.is_null()) c["worst"] = worst;
        if (!pass) failures.push_back(c);
        items.push_back(std::move(c));
    }
    bool pass() const { return failures.empty(); }
};

struct Context {
    const RunConfig& cfg;
    Options opts;
    Checks checks;
    json results = json::object();
    std::vector<std::string> artifacts;

    double tol(double def) const { return cfg.tol.value_or(def); }

    const SystemSpec& system(std::initializer_list<Family> allowed) const {
        if (!cfg.system) throw UsageError("command '" + cfg.command + "' needs a system");
        for (Family f : allowed)
            if (cfg.system->family == f) return *cfg.system;
        throw UsageError("command '" + cfg.command + "' does not accept family " + to_string(cfg.system->family));
    }

    std::ofstream open(const std::string& name) {
        artifacts.push_back(name);
        std::ofstream os(fs::path(cfg.out) / name);
        if (!os) throw Error("cannot write " + name);
        return os;
    }
};

json state_json(const std::vector<double>& s) {
    const std::size_t N = s.size() / 2;
    return {{"x", std::vector<double>(s.begin(), s.begin() + N)}, {"p", std::vector<double>(s.begin() + N, s.end())}};
}

PhasePoint default_init(const SystemSpec& s) {
    switch (s.family) {
        case Family::PerlickII:
        case Family::DarbouxCCM: return from_polar(0.8, 0.3, 0.05, 0.6);
        case Family::TTWCurved: return PhasePoint({1.0, 0.6}, {0.2, 0.5});
        default: break;
    }
    std::vector<double> x{1.0, 0.2, 0.3}, p{0.1, 0.7, 0.2};
    x.resize(s.N, 0.25);
    p.resize(s.N, 0.15);
    return PhasePoint(x, p);
}

PhasePoint read_init(Options& o, const SystemSpec& s) {
    if (!o.has("init")) return default_init(s);
    const json& j = o.raw("init");
    try {
        if (j.contains("r"))
            return from_polar(j.at("r").get<double>(), j.value("theta", 0.0), j.value("pr", 0.0), j.at("ptheta").get<double>());
        auto x = j.at("x").get<std::vector<double>>(), p = j.at("p").get<std::vector<double>>();
        if (x.size() != s.N || p.size() != s.N) throw UsageError("init has the wrong dimension");
        return PhasePoint(x, p);
    } catch (const json::exception&) {
        throw UsageError("init must be {x, p} or {r, theta, pr, ptheta}");
    }
}

// Constants of motion logged along trajectories, with the scale their drift is measured against.
struct Tracked {
    std::vector<NamedObservable> list;
    std::vector<Observable> brackets;  // what verify-invariants brackets with H
    std::vector<std::string> bracket_names;
    std::map<std::string, std::function<double(const PhasePoint&)>> scale;
};

Tracked tracked_invariants(const HamiltonianObservable& H) {
    Tracked t;
    auto bracket = [&](const std::string& name, const Observable& f) {
        t.brackets.push_back(f);
        t.bracket_names.push_back(name);
    };
    const std::size_t N = H.spec.N;
    switch (H.spec.family) {
        case Family::KeplerCurved:
        case Family::PerlickI:
        case Family::TTWCurved: {
            const auto inv = runge_lenz(H);
            // the centrifugal barriers break rotations, so TTW keeps only C and SS
            if (H.spec.family != Family::TTWCurved)
                for (const auto& a : inv.angular) {
                    const auto name = "L" + std::to_string(a.i + 1) + std::to_string(a.j + 1);
                    t.list.push_back({name, a.L});
                    t.scale[name] = [c = inv.sqrtC](const PhasePoint& pt) { return std::abs(c.value(pt)); };
                    bracket(name, a.L);
                }
            t.list.push_back({"C", inv.C});
            bracket("C", inv.C);
            const auto ss = [s = inv.SS](const PhasePoint& pt) { return std::abs(s.value(pt)); };
            t.list.push_back({"ReSS", inv.re_SS()});
            t.list.push_back({"ImSS", inv.im_SS()});
            t.scale["ReSS"] = t.scale["ImSS"] = ss;
            bracket("ReSS", inv.re_SS());
            bracket("ImSS", inv.im_SS());
            break;
        }
        case Family::PerlickII: {
            t.list.push_back({"L12", angular_momentum(2, 0, 1)});
            bracket("L12", angular_momentum(2, 0, 1));
            const auto I = perlick_ii_invariant(H.spec);
            bracket("ReI", real_part(I));
            bracket("ImI", imag_part(I));
            break;
        }
        case Family::DarbouxCCM: {
            t.list.push_back({"L12", angular_momentum(N, 0, 1)});
            bracket("L12", angular_momentum(N, 0, 1));
            // build() metamorphoses with the opposite sign of E
            const auto I = ccm_invariant(H.spec.lambda * H.spec.lambda, H.spec.delta, -H.spec.E);
            bracket("ReI", real_part(I));
            bracket("ImI", imag_part(I));
            break;
        }
    }
    return t;
}

// Integrates for `periods` radial periods (measured from the first few pericentres).
Trajectory run_periods(const HamiltonianObservable& H, const PhasePoint& init, double periods, double integrator_tol,
                       const std::vector<NamedObservable>& logged, json& results) {
    IntegrateOptions probe;
    probe.tol = integrator_tol;
    probe.stop_after_pericentres = 4;
    const auto T = radial_period(integrate(H, init, 1e6, probe));
    if (!T) throw IntegrationError("orbit from the initial point is not bounded", init, 0.0);
    results["radial_period"] = *T;
    IntegrateOptions o;
    o.tol = integrator_tol;
    o.invariants = logged;
    return integrate(H, init, (periods + 0.2) * *T, o);
}

void record_drift(Context& c, const Trajectory& traj, const Tracked& t, double drift_tol, double energy_tol) {
    c.checks.add("energy-drift", energy_drift(traj), energy_tol);
    const auto p0 = traj.point(0);
    for (const auto& n : t.list) {
        const auto it = t.scale.find(n.name);
        const double s = it == t.scale.end() ? 0.0 : it->second(p0);
        c.checks.add("drift " + n.name, relative_drift(traj.log(n.name), s), drift_tol);
    }
    if (traj.event)
        c.checks.add("integration-event " + traj.event->kind, traj.event->t, 0.0, false,
                     json{{"t", traj.event->t}, {"detail", traj.event->detail}});
}

void verify_algebra(Context& c) {
    const auto N = c.opts.get<std::size_t>("N", 3);
    const auto kind = c.opts.get<std::string>("realization", "cartesian");
    const auto points = c.opts.get<std::size_t>("num_points", 100);
    const auto min_abs = c.opts.get<double>("min_abs_coord", 0.1);
    RealizationKind rk;
    if (kind == "centrifugal") {
        auto b = c.opts.get<std::vector<double>>("b", std::vector<double>(N, 0.5));
        if (b.size() != N) throw UsageError("b needs one coefficient per site");
        rk = RealizationKind::centrifugal(b);
    } else if (kind != "cartesian") {
        throw UsageError("realization must be cartesian or centrifugal");
    }
    if (N == 0) throw UsageError("N must be positive");
    const auto rep = verify_coalgebra_relations(realize(N, rk), points, c.cfg.seed, min_abs);
    const double tol = c.tol(1e-10);
    for (const auto& r : rep.relations) c.checks.add(r.relation, r.max_violation, tol, state_json(r.worst));
    c.results = {{"N", N}, {"realization", rep.kind}, {"num_points", points}, {"max_violation", rep.max_violation}};
}

void verify_invariants(Context& c) {
    const auto& spec = c.system({Family::KeplerCurved, Family::PerlickI, Family::PerlickII, Family::DarbouxCCM,
                                 Family::TTWCurved});
    const auto points = c.opts.get<std::size_t>("num_points", 50);
    const auto periods = c.opts.get<double>("periods", 10.0);
    const auto drift_tol = c.opts.get<double>("drift_tol", 1e-6);
    const auto energy_tol = c.opts.get<double>("energy_tol", 1e-10);
    const auto itol = c.opts.get<double>("integrator_tol", 1e-12);
    const auto init = read_init(c.opts, spec);
    const auto H = build(spec);
    const auto t = tracked_invariants(H);
    json brackets = json::object();
    for (std::size_t i = 0; i < t.brackets.size(); ++i) {
        const auto s = verify_commutation(H, t.brackets[i], points, c.cfg.seed + i);
        c.checks.add("bracket " + t.bracket_names[i], s.max_rel, c.tol(1e-10), state_json(s.worst));
        brackets[t.bracket_names[i]] = {{"max_abs", s.max_abs}, {"max_rel", s.max_rel}};
    }
    c.results["brackets"] = brackets;
    if (periods > 0) {
        const auto traj = run_periods(H, init, periods, itol, t.list, c.results);
        record_drift(c, traj, t, drift_tol, energy_tol);
        c.results["pericentres"] = pericentre_times(traj).size();
    }
}

void simulate(Context& c) {
    const auto& spec = c.system({Family::KeplerCurved, Family::PerlickI, Family::PerlickII, Family::DarbouxCCM,
                                 Family::TTWCurved});
    const auto itol = c.opts.get<double>("integrator_tol", 1e-12);
    const auto drift_tol = c.opts.get<double>("drift_tol", 1e-6);
    const auto init = read_init(c.opts, spec);
    const auto H = build(spec);
    const auto t = tracked_invariants(H);
    Trajectory traj;
    if (c.opts.has("t_final")) {
        IntegrateOptions o;
        o.tol = itol;
        o.invariants = t.list;
        traj = integrate(H, init, c.opts.get<double>("t_final", 0.0), o);
    } else {
        traj = run_periods(H, init, c.opts.get<double>("periods", 10.0), itol, t.list, c.results);
    }
    auto os = c.open("trajectory.csv");
    write_csv(os, traj);
    record_drift(c, traj, t, drift_tol, c.tol(1e-10));
    c.results["samples"] = traj.times.size();
    c.results["t_final"] = traj.times.back();
    c.results["steps"] = traj.stats.steps;
    c.results["rejected"] = traj.stats.rejected;
}

void closure(Context& c) {
    const auto& spec = c.system({Family::KeplerCurved, Family::PerlickI, Family::PerlickII});
    const auto init = read_init(c.opts, spec);
    auto H = build(spec);
    const bool real_beta = c.opts.has("beta_real");
    if (real_beta) {
        if (spec.family != Family::PerlickI) throw UsageError("beta_real needs a PerlickI system");
        H.H = perlick_i_real(spec.N, c.opts.get<double>("beta_real", 1.0), spec.k, spec.mu);
    }
    const Rational& q = spec.family == Family::PerlickII ? spec.gamma : spec.beta;
    const double def_periods = real_beta ? 50.2 : spec.family == Family::KeplerCurved ? 2.5 : 2.0 * (q.m + q.n) + 0.5;
    const auto periods = c.opts.get<double>("periods", def_periods);
    const auto expect = c.opts.get<bool>("expect_closed", !real_beta);
    const auto itol = c.opts.get<double>("integrator_tol", 1e-12);
    const double tol = c.tol(1e-5);

    const auto traj = run_periods(H, init, periods - 0.2, itol, {}, c.results);
    const auto res = detect_closure(traj, tol);
    auto os = c.open("trajectory.csv");
    write_csv(os, traj);
    c.results["bounded"] = res.bounded;
    c.results["closed"] = res.closed;
    c.results["miss_distance"] = res.miss_distance;
    c.results["minima_examined"] = res.minima_examined;
    c.results["pericentres"] = pericentre_times(traj).size();
    if (res.period) {
        c.results["period"] = *res.period;
        c.results["period_over_radial"] = *res.period / c.results["radial_period"].get<double>();
    }
    c.checks.add("bounded", res.bounded ? 0.0 : 1.0, 0.5);
    if (expect)
        c.checks.add("closure", res.miss_distance, tol, res.closed && res.miss_distance < tol);
    else
        c.checks.add("non-closure", res.miss_distance, tol, !res.closed && res.miss_distance >= tol);
}

void curvature(Context& c) {
    const auto& spec = c.system({Family::PerlickI});
    std::vector<double> def;
    for (int i = 0; i < 10; ++i) def.push_back(0.3 + 0.2 * i);
    const auto radii = c.opts.get<std::vector<double>>("radii", def);
    const auto rep = curvature_check(spec, radii);
    auto os = c.open("curvature.csv");
    os << "r,R3_closed,R3_numeric,R2_closed,R2_numeric,skipped\n";
    os.precision(17);
    const double tol = c.tol(1e-6);
    double worst3 = 0.0, worst2 = 0.0, r3 = 0.0, r2 = 0.0;
    std::size_t skipped = 0;
    for (const auto& s : rep.samples) {
        os << s.r << ',' << s.closed_3d << ',' << s.numeric_3d << ',' << s.closed_2d << ',' << s.numeric_2d << ','
           << (s.skipped ? 1 : 0) << '\n';
        if (s.skipped) {
            ++skipped;
            continue;
        }
        const double d3 = std::abs(s.numeric_3d - s.closed_3d) / std::max(1.0, std::abs(s.closed_3d));
        const double d2 = std::abs(s.numeric_2d - s.closed_2d) / std::max(1.0, std::abs(s.closed_2d));
        if (d3 >= worst3) worst3 = d3, r3 = s.r;
        if (d2 >= worst2) worst2 = d2, r2 = s.r;
    }
    c.checks.add("curvature-3d", worst3, tol, json{{"r", r3}});
    c.checks.add("curvature-2d", worst2, tol, json{{"r", r2}});
    c.results = {{"radii", radii.size()}, {"skipped", skipped}, {"max_deviation", rep.max_deviation}};
}

void spectrum(Context& c) {
    const auto& spec = c.system({Family::KeplerCurved, Family::PerlickI});
    if (spec.family == Family::KeplerCurved && spec.delta != 0.0)
        throw UsageError("spectrum takes delta = 0; the constant 4 mu delta only shifts energies");
    RadialProblem prob;
    prob.k = spec.k;
    prob.mu = spec.mu;
    prob.N = spec.N;
    prob.beta = spec.family == Family::PerlickI ? spec.beta : Rational(1, 1);
    prob.hbar = c.opts.get<double>("hbar", 1.0);
    prob.l = c.opts.get<int>("l", 0);
    const auto count = c.opts.get<int>("count", 5);
    if (count <= 0) throw UsageError("count must be positive");
    try {
        prob.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const auto table = eigensolve(prob, count);
    {
        auto os = c.open("spectrum.csv");
        write_csv(os, table);
    }
    {
        auto os = c.open("spectrum.json");
        os << to_json(table) << '\n';
    }
    const double tol = c.tol(1e-5);
    double worst = 0.0;
    json at = nullptr;
    for (const auto& row : table.rows) {
        const double v = row.e_grid ? row.residual : std::numeric_limits<double>::infinity();
        if (at.is_null() || v > worst) worst = v, at = {{"n", row.n}, {"l", row.l}, {"E_formula", row.e_formula}};
    }
    c.checks.add("spectrum", worst, tol, at);
    c.results = json::parse(to_json(table));
}

void ccm_check(Context& c) {
    SystemSpec spec;
    spec.k = 0.1;
    spec.delta = 0.05;
    if (c.cfg.system) spec = c.system({Family::KeplerCurved});
    const auto E = c.opts.get<double>("E", -0.8);
    const auto points = c.opts.get<std::size_t>("num_points", 20);
    Rational beta;
    try {
        beta = Rational::parse(c.opts.get<std::string>("beta", "1/2"));
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    const double tol = c.tol(1e-10);
    for (const auto& id : transform_identities(spec.k, spec.mu, spec.delta, beta, E, points, c.cfg.seed))
        c.checks.add(id.name, id.max_rel, tol);
    c.results = {{"k", spec.k}, {"mu", spec.mu}, {"delta", spec.delta}, {"E", E}, {"beta", beta.str()},
                 {"num_points", points}};
}

void ttw_check(Context& c) {
    const auto& spec = c.system({Family::TTWCurved});
    const auto periods = c.opts.get<double>("periods", 10.0);
    const auto drift_tol = c.opts.get<double>("drift_tol", 1e-6);
    const auto energy_tol = c.opts.get<double>("energy_tol", 1e-8);
    const auto itol = c.opts.get<double>("integrator_tol", 1e-12);
    const auto num_theta = c.opts.get<std::size_t>("num_theta", 64);
    const auto init = read_init(c.opts, spec);

    const auto H = build(spec);
    auto t = tracked_invariants(H);
    std::erase_if(t.list, [](const NamedObservable& n) { return n.name != "ReSS" && n.name != "ImSS"; });
    const auto traj = run_periods(H, init, periods, itol, t.list, c.results);
    record_drift(c, traj, t, drift_tol, energy_tol);

    // quantum side: b = 0 separation against a seeded Gaussian radial profile
    std::mt19937_64 rng(c.cfg.seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double centre = 1.5 * u(rng), width = 0.75 + 0.25 * u(rng);
    const auto g = RadialGrid::make(-8.0, 5.0, 0.02);
    const auto phi = g.sample([&](double r) {
        const double s = (std::log(r) - centre) / width;
        return std::exp(-0.5 * s * s);
    });
    const double b = spec.beta.value();
    const auto free_op = ttw_quantum_build(spec.k, spec.mu, b, 0.0, 0.0, g, num_theta);
    const double tol = c.tol(1e-8);
    for (int m : {1, 2}) c.checks.add("quantum-reduction m=" + std::to_string(m), ttw_reduction_residual(free_op, m, phi), tol);
    const auto op = ttw_quantum_build(spec.k, spec.mu, b, spec.b1, spec.b2, g, num_theta);
    c.checks.add("quantum-symmetry", ttw_asymmetry(op), 1e-10);
    c.results["pericentres"] = pericentre_times(traj).size();
    c.results["gaussian"] = {{"centre", centre}, {"width", width}};
}

using Command = void (*)(Context&);

const std::map<std::string, Command>& table() {
    static const std::map<std::string, Command> t = {
        {"verify-algebra", verify_algebra}, {"verify-invariants", verify_invariants},
        {"simulate", simulate},             {"closure", closure},
        {"curvature", curvature},           {"spectrum", spectrum},
        {"ccm-check", ccm_check},           {"ttw-check", ttw_check},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& commands() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, _] : table()) v.push_back(k);
        return v;
    }();
    return names;
}

json RunConfig::to_json() const {
    json j = {{"command", command}, {"seed", seed}, {"out", out}, {"options", options}};
    if (system) j["system"] = system->to_json();
    if (tol) j["tol"] = *tol;
    return j;
}

RunConfig RunConfig::from_json(const json& j) {
    static const std::set<std::string> known = {"command", "system", "seed", "tol", "out", "options"};
    if (!j.is_object()) throw UsageError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw UsageError("unknown config key '" + key + "'");
    RunConfig c;
    try {
        c.command = j.at("command").get<std::string>();
        c.seed = j.value("seed", c.seed);
        c.out = j.value("out", c.out);
        if (j.contains("tol")) c.tol = j.at("tol").get<double>();
        if (j.contains("options")) c.options = j.at("options");
        if (j.contains("system")) c.system = SystemSpec::from_json(j.at("system"));
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad config: ") + e.what());
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (!table().count(c.command)) throw UsageError("unknown command '" + c.command + "'");
    if (!c.options.is_object()) throw UsageError("options must be a JSON object");
    if (c.tol && !(*c.tol > 0)) throw UsageError("tol must be positive");
    return c;
}

RunResult run(const RunConfig& cfg) {
    const auto start = std::chrono::steady_clock::now();
    const auto it = table().find(cfg.command);
    if (it == table().end()) throw UsageError("unknown command '" + cfg.command + "'");
    if (cfg.tol && !(*cfg.tol > 0)) throw UsageError("tol must be positive");
    Context c{cfg, Options(cfg.options), {}, json::object(), {}};
    std::error_code ec;
    fs::create_directories(cfg.out, ec);
    if (ec) throw UsageError("cannot create output directory " + cfg.out);

    try {
        it->second(c);
        c.opts.finish();
    } catch (const UsageError&) {
        throw;
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    } catch (const IntegrationError& e) {
        c.checks.add("integration", e.time(), 0.0, false, json{{"t", e.time()}, {"state", state_json(e.last_state().state())},
                                                             {"message", e.what()}});
    }

    RunResult res;
    res.exit_code = c.checks.pass() ? 0 : 1;
    res.report = {{"command", cfg.command}, {"seed", cfg.seed},       {"pass", c.checks.pass()},
                  {"checks", c.checks.items}, {"failures", c.checks.failures}, {"results", c.results}};
    if (cfg.system) res.report["system"] = cfg.system->to_json();
    {
        std::ofstream os(fs::path(cfg.out) / "report.json");
        os << res.report.dump(2) << '\n';
    }
    c.artifacts.push_back("report.json");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const json manifest = {
        {"config", cfg.to_json()},
        {"versions",
         {{"superint", version},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"compiler", __VERSION__}}},
        {"wall_time_s", wall},
        {"exit_code", res.exit_code},
        {"artifacts", c.artifacts}};
    std::ofstream(fs::path(cfg.out) / "manifest.json") << manifest.dump(2) << '\n';
    return res;
}

}  // namespace superint
