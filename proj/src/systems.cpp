#include "superint/systems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace superint {

Rational::Rational(long m_, long n_) : m(m_), n(n_) {
    if (m <= 0 || n <= 0) throw DomainError("rational " + std::to_string(m) + "/" + std::to_string(n) + " must be positive");
    if (std::gcd(m, n) != 1)
        throw DomainError("rational " + std::to_string(m) + "/" + std::to_string(n) + " is not in lowest terms");
}

std::string Rational::str() const { return n == 1 ? std::to_string(m) : std::to_string(m) + "/" + std::to_string(n); }

Rational Rational::parse(const std::string& s) {
    const auto slash = s.find('/');
    try {
        std::size_t used = 0;
        const long m = std::stol(s.substr(0, slash), &used);
        if (used != (slash == std::string::npos ? s.size() : slash)) throw std::invalid_argument(s);
        long n = 1;
        if (slash != std::string::npos) {
            const std::string tail = s.substr(slash + 1);
            n = std::stol(tail, &used);
            if (used != tail.size()) throw std::invalid_argument(s);
        }
        return Rational(m, n);
    } catch (const std::logic_error&) {
        throw DomainError("cannot parse rational '" + s + "'");
    }
}

std::string to_string(Family f) {
    switch (f) {
        case Family::KeplerCurved: return "KeplerCurved";
        case Family::PerlickI: return "PerlickI";
        case Family::PerlickII: return "PerlickII";
        case Family::DarbouxCCM: return "DarbouxCCM";
        case Family::TTWCurved: return "TTWCurved";
    }
    return "?";
}

Family family_from_string(const std::string& s) {
    for (Family f : {Family::KeplerCurved, Family::PerlickI, Family::PerlickII, Family::DarbouxCCM, Family::TTWCurved})
        if (to_string(f) == s) return f;
    throw DomainError("unknown family '" + s + "'");
}

void SystemSpec::validate() const {
    auto finite = [](double v) { return std::isfinite(v); };
    if (N < 2) throw DomainError("dimension must be at least 2");
    if (!finite(k) || !finite(lambda) || !finite(delta) || !finite(mu) || !finite(b1) || !finite(b2) || !finite(E))
        throw DomainError("parameters must be finite");
    if (!(mu > 0)) throw DomainError("mu must be positive");
    if (lambda < 0) throw DomainError("lambda must be non-negative");
    if (family == Family::TTWCurved) {
        if (N != 2) throw DomainError("TTWCurved is two dimensional");
        if (b1 < 0 || b2 < 0) throw DomainError("b1, b2 must be non-negative");
    }
}

nlohmann::json SystemSpec::to_json() const {
    nlohmann::json j;
    j["family"] = superint::to_string(family);
    j["N"] = N;
    j["mu"] = mu;
    switch (family) {
        case Family::KeplerCurved: j["k"] = k; j["delta"] = delta; break;
        case Family::PerlickI: j["k"] = k; j["beta"] = beta.str(); break;
        case Family::PerlickII:
            j["lambda"] = lambda; j["delta"] = delta; j["gamma"] = gamma.str();
            break;
        case Family::DarbouxCCM: j["lambda"] = lambda; j["delta"] = delta; j["E"] = E; break;
        case Family::TTWCurved:
            j["k"] = k; j["beta"] = beta.str(); j["b1"] = b1; j["b2"] = b2;
            break;
    }
    return j;
}

SystemSpec SystemSpec::from_json(const nlohmann::json& j) {
    static const std::set<std::string> known = {"family", "N", "k", "lambda", "delta", "mu", "beta", "gamma", "b1", "b2", "E"};
    if (!j.is_object()) throw DomainError("system spec must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw DomainError("unknown system spec key '" + key + "'");
    if (!j.contains("family")) throw DomainError("system spec needs a family");
    SystemSpec s;
    try {
        s.family = family_from_string(j.at("family").get<std::string>());
        s.N = j.value("N", std::size_t{2});
        s.k = j.value("k", 0.0);
        s.lambda = j.value("lambda", 0.0);
        s.delta = j.value("delta", 0.0);
        s.mu = j.value("mu", 1.0);
        s.b1 = j.value("b1", 0.0);
        s.b2 = j.value("b2", 0.0);
        s.E = j.value("E", 0.0);
        if (j.contains("beta")) s.beta = Rational::parse(j.at("beta").get<std::string>());
        if (j.contains("gamma")) s.gamma = Rational::parse(j.at("gamma").get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("bad system spec: ") + e.what());
    }
    s.validate();
    return s;
}

Observable radius(std::size_t N) {
    Observable s = position(N, 0) * position(N, 0);
    for (std::size_t i = 1; i < N; ++i) s = s + position(N, i) * position(N, i);
    return sqrt(s).named("r");
}

Observable angular_momentum(std::size_t N, std::size_t i, std::size_t j) {
    return (position(N, i) * momentum(N, j) - position(N, j) * momentum(N, i))
        .named("L" + std::to_string(i + 1) + std::to_string(j + 1));
}

namespace {

// Wraps f so that evaluation throws DomainError where U <= 0.
Observable require_positive(const Observable& f, const Observable& U, const std::string& what) {
    return Observable(f.dim(), f.name(), [f, U, what](const PhasePoint& pt, int order) {
        const cplx u = U.raw(pt, 0).value;
        if (!(u.real() > 0.0)) throw DomainError(what + " outside its admissible region");
        return f.raw(pt, order);
    });
}

Observable perlick_i_from(const Sl2Realization& g, double beta, double k, double mu) {
    const Observable rb = pow(g.jm, beta / 2), rmb = pow(g.jm, -beta / 2);
    const Observable f = rmb + k * rb;
    return g.jm * f * f / 2.0 * g.jp - mu * (rmb - k * rb);
}

double perlick_i_singular_radius(double beta, double k) {
    // r^-beta + k r^beta = 0
    return std::pow(-k, -1.0 / (2.0 * beta));
}

}  // namespace

Observable perlick_i_real(std::size_t N, double beta, double k, double mu) {
    if (!(beta > 0)) throw DomainError("beta must be positive");
    return perlick_i_from(realize(N, RealizationKind::cartesian()), beta, k, mu).named("H_PerlickI");
}

HamiltonianSplit darboux_split(std::size_t N, double lambda2, double delta) {
    const auto g = realize(N, RealizationKind::cartesian());
    const Observable w = 1.0 / g.jm;
    const Observable f = w - lambda2 * g.jm;
    return {g.jm * f * f / 2.0 * g.jp, constant(N, 0.0), w + lambda2 * g.jm - 2.0 * delta};
}

Observable darboux_pre_ccm(std::size_t N, double lambda2, double delta, double mu_t) {
    const auto s = darboux_split(N, lambda2, delta);
    return (s.T - mu_t * s.U).named("H_Darboux");
}

Observable darboux_ccm(std::size_t N, double lambda2, double delta, double E) {
    const auto s = darboux_split(N, lambda2, delta);
    return require_positive(((s.T + E) / s.U).named("H_DarbouxCCM"), s.U, "H_DarbouxCCM");
}

Observable ccm(const HamiltonianSplit& split, double E) {
    return ((split.T + split.V - E) / split.U).named("H_ccm");
}

namespace {

// Admissible radii for U = r^-2g + lambda^2 r^2g - 2 delta > 0: the component
// reaching down to r = 0.
AdmissibleRegion perlick_ii_region(double gamma, double lambda, double delta) {
    AdmissibleRegion reg;
    const double l2 = lambda * lambda;
    if (lambda > 0) reg.singular_radii.push_back(std::pow(lambda, -1.0 / (2.0 * gamma)));
    double s_max = std::numeric_limits<double>::infinity();
    if (l2 == 0.0) {
        if (delta > 0) s_max = 1.0 / (2.0 * delta);
    } else if (delta >= lambda) {
        s_max = (delta - std::sqrt(delta * delta - l2)) / l2;
    }
    reg.r_max = std::pow(s_max, 1.0 / (2.0 * gamma));
    return reg;
}

}  // namespace

HamiltonianObservable build(const SystemSpec& spec) {
    spec.validate();
    const std::size_t N = spec.N;
    HamiltonianObservable out{spec, {}, {}};
    const double k = spec.k, mu = spec.mu;
    switch (spec.family) {
        case Family::KeplerCurved: {
            const auto g = realize(N, RealizationKind::cartesian());
            const Observable a = 1.0 + k * g.jm;
            out.H = (a * a / 2.0 * g.jp - mu * (1.0 - k * g.jm) / sqrt(g.jm) + 4.0 * mu * spec.delta).named("H_KeplerCurved");
            if (k < 0) {
                out.region.singular_radii.push_back(1.0 / std::sqrt(-k));
                out.region.r_max = out.region.singular_radii.back();
            }
            break;
        }
        case Family::PerlickI:
        case Family::TTWCurved: {
            const bool ttw = spec.family == Family::TTWCurved;
            const auto g = realize(N, ttw ? RealizationKind::centrifugal({spec.b1, spec.b2}) : RealizationKind::cartesian());
            out.H = perlick_i_from(g, spec.beta.value(), k, mu).named(ttw ? "H_TTWCurved" : "H_PerlickI");
            if (k < 0) {
                out.region.singular_radii.push_back(perlick_i_singular_radius(spec.beta.value(), k));
                out.region.r_max = out.region.singular_radii.back();
            }
            break;
        }
        case Family::PerlickII: {
            const auto g = realize(N, RealizationKind::cartesian());
            const double gm = spec.gamma.value(), l2 = spec.lambda * spec.lambda;
            const Observable w = pow(g.jm, -gm), z = pow(g.jm, gm);
            const Observable U = w + l2 * z - 2.0 * spec.delta;
            const Observable f = w - l2 * z;
            out.H = require_positive((g.jm * f * f / (2.0 * U) * g.jp + mu / U).named("H_PerlickII"), U, "H_PerlickII");
            out.region = perlick_ii_region(gm, spec.lambda, spec.delta);
            break;
        }
        case Family::DarbouxCCM: {
            out.H = darboux_ccm(N, spec.lambda * spec.lambda, spec.delta, spec.E);
            out.region = perlick_ii_region(1.0, spec.lambda, spec.delta);
            break;
        }
    }
    return out;
}

// --- coordinate maps ------------------------------------------------------------------

PhasePoint CoordinateMap::operator()(const PhasePoint& pt) const {
    if (pt.dim() != dim) throw DimensionError("map '" + name + "' acts on dimension " + std::to_string(dim));
    if (excludes_origin) {
        double r2 = 0;
        for (double v : pt.x()) r2 += v * v;
        if (r2 == 0.0) throw DomainError("map '" + name + "' is singular at the origin");
    }
    std::vector<double> x(dim), p(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        x[i] = coords[i].real_value(pt);
        p[i] = coords[dim + i].real_value(pt);
    }
    return PhasePoint(std::move(x), std::move(p));
}

namespace {

Observable conj(const Observable& u) { return real_part(u) - cplx(0.0, 1.0) * imag_part(u); }

CoordinateMap conformal_lift(const Observable& w, const Observable& fprime, const std::string& name) {
    const Observable P = complex_from(momentum(2, 0), momentum(2, 1));
    const Observable Pw = P / conj(fprime);
    return {2, name, {real_part(w), imag_part(w), real_part(Pw), imag_part(Pw)}, true};
}

}  // namespace

CoordinateMap power_map(double a, const std::string& name) {
    const Observable z = complex_from(position(2, 0), position(2, 1));
    return conformal_lift(pow(z, a), a * pow(z, a - 1.0), name);
}

CoordinateMap angular_rescale(const Rational& beta, bool inverse) {
    const double a = inverse ? 1.0 / beta.value() : beta.value();
    if (a == 1.0) {
        return {2, "identity", {position(2, 0), position(2, 1), momentum(2, 0), momentum(2, 1)}, true};
    }
    return power_map(a, inverse ? "kepler->perlick" : "perlick->kepler");
}

CoordinateMap levi_civita() {
    const Observable z = complex_from(position(2, 0), position(2, 1));
    return conformal_lift(z * z / 2.0, z, "levi-civita");
}

PhasePoint levi_civita(const PhasePoint& pt) {
    static const CoordinateMap m = levi_civita();
    return m(pt);
}

PhasePoint from_polar(double r, double theta, double pr, double ptheta) {
    if (!(r > 0)) throw DomainError("polar radius must be positive");
    const double c = std::cos(theta), s = std::sin(theta);
    return PhasePoint({r * c, r * s}, {c * pr - s * ptheta / r, s * pr + c * ptheta / r});
}

Polar to_polar(const PhasePoint& pt) {
    if (pt.dim() != 2) throw DimensionError("polar form needs a planar point");
    const double x = pt.x()[0], y = pt.x()[1];
    const double r = std::hypot(x, y);
    if (r == 0.0) throw DomainError("polar form undefined at the origin");
    return {r, std::atan2(y, x), (x * pt.p()[0] + y * pt.p()[1]) / r, x * pt.p()[1] - y * pt.p()[0]};
}

std::vector<IdentityCheck> transform_identities(double k, double mu, double delta, const Rational& beta, double E,
                                                std::size_t num_points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    SystemSpec kep;
    kep.k = k;
    kep.mu = mu;
    kep.delta = delta;
    std::vector<IdentityCheck> out;

    IdentityCheck lc{"levi-civita", 0.0};
    const auto m = levi_civita();
    const Observable H19 = build(kep).H, H22 = darboux_pre_ccm(2, -k / 4, delta, 2 * mu);
    for (std::size_t i = 0; i < num_points; ++i) {
        const auto pt = sample_point(rng, 2, {});
        lc.max_rel = std::max(lc.max_rel, rel(H19.value(m(pt)), H22.value(pt)));
    }
    out.push_back(lc);

    IdentityCheck cc{"coupling-constant-metamorphosis", 0.0};
    SampleRegion inner;
    inner.r_max = 1.5;
    const Observable h = ccm(darboux_split(2, -k / 4, delta), E), h23 = darboux_ccm(2, -k / 4, delta, -E);
    for (std::size_t i = 0; i < num_points; ++i) {
        const auto pt = sample_point(rng, 2, inner);
        cc.max_rel = std::max(cc.max_rel, rel(h.value(pt), h23.value(pt)));
    }
    out.push_back(cc);

    IdentityCheck ar{"angular-rescale", 0.0};
    SystemSpec pi = kep;
    pi.family = Family::PerlickI;
    pi.beta = beta;
    pi.delta = 0.0;
    const double b2 = beta.value() * beta.value();
    SystemSpec kb = kep;
    kb.mu = mu / b2;
    const Observable HI = build(pi).H, HK = build(kb).H;
    const auto resc = angular_rescale(beta);
    for (std::size_t i = 0; i < num_points; ++i) {
        const auto pt = sample_point(rng, 2, {});
        ar.max_rel = std::max(ar.max_rel, rel(HI.value(pt), b2 * (HK.value(resc(pt)) - 4 * (mu / b2) * delta)));
    }
    out.push_back(ar);
    return out;
}

}  // namespace superint
