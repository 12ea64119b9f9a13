#include "superint/phasespace.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace superint {

namespace {

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

std::size_t width(std::size_t dim) { return 2 * dim; }

Jet zero_jet(std::size_t dim, int order) {
    Jet j;
    if (order >= 1) j.grad.assign(width(dim), cplx{});
    if (order >= 2) j.hess.assign(width(dim) * width(dim), cplx{});
    return j;
}

// phi(u) with chain rule: grad = d1 * grad_u, hess = d1 * hess_u + d2 * grad_u grad_u^T.
Jet chain(Jet u, cplx value, cplx d1, cplx d2, int order) {
    u.value = value;
    if (order >= 2) {
        const std::size_t w = u.grad.size();
        for (std::size_t a = 0; a < w; ++a)
            for (std::size_t b = 0; b < w; ++b) u.hess[a * w + b] = d1 * u.hess[a * w + b] + d2 * u.grad[a] * u.grad[b];
    }
    if (order >= 1) {
        for (auto& g : u.grad) g *= d1;
    }
    return u;
}

Jet add(Jet a, const Jet& b, cplx sb, int order) {
    a.value += sb * b.value;
    if (order >= 1) {
        for (std::size_t k = 0; k < a.grad.size(); ++k) a.grad[k] += sb * b.grad[k];
    }
    if (order >= 2) {
        for (std::size_t k = 0; k < a.hess.size(); ++k) a.hess[k] += sb * b.hess[k];
    }
    return a;
}

Jet mul(const Jet& a, const Jet& b, int order) {
    Jet out;
    out.value = a.value * b.value;
    if (order >= 1) {
        const std::size_t w = a.grad.size();
        out.grad.resize(w);
        for (std::size_t k = 0; k < w; ++k) out.grad[k] = a.value * b.grad[k] + b.value * a.grad[k];
        if (order >= 2) {
            out.hess.resize(w * w);
            for (std::size_t i = 0; i < w; ++i) {
                for (std::size_t j = 0; j < w; ++j) {
                    const std::size_t ij = i * w + j;
                    out.hess[ij] = a.value * b.hess[ij] + b.value * a.hess[ij] + a.grad[i] * b.grad[j] +
                                   b.grad[i] * a.grad[j];
                }
            }
        }
    }
    return out;
}

Jet scale(Jet a, cplx c) {
    a.value *= c;
    for (auto& g : a.grad) g *= c;
    for (auto& h : a.hess) h *= c;
    return a;
}

void require_same_dim(const Observable& a, const Observable& b) {
    if (a.dim() != b.dim()) {
        throw DimensionError("observables '" + a.name() + "' and '" + b.name() + "' have dimensions " +
                             std::to_string(a.dim()) + " and " + std::to_string(b.dim()));
    }
}

std::string short_name(const Observable& o) { return o.name().size() > 40 ? std::string("expr") : o.name(); }
std::string paren(const Observable& o) { return "(" + short_name(o) + ")"; }

}  // namespace

// --- PhasePoint -------------------------------------------------------------------

PhasePoint::PhasePoint(std::vector<double> x, std::vector<double> p) : x_(std::move(x)), p_(std::move(p)) {
    if (x_.empty() || x_.size() != p_.size()) {
        throw DimensionError("phase point needs equal, nonzero numbers of positions and momenta");
    }
    auto bad = [](double v) { return !std::isfinite(v); };
    if (std::any_of(x_.begin(), x_.end(), bad) || std::any_of(p_.begin(), p_.end(), bad)) {
        throw DomainError("phase point has non-finite entries");
    }
}

PhasePoint PhasePoint::shifted(std::size_t k, double delta) const {
    PhasePoint out = *this;
    if (k < dim()) {
        out.x_[k] += delta;
    } else {
        out.p_[k - dim()] += delta;
    }
    return out;
}

std::vector<double> PhasePoint::state() const {
    std::vector<double> s(x_);
    s.insert(s.end(), p_.begin(), p_.end());
    return s;
}

PhasePoint PhasePoint::from_state(const std::vector<double>& s) {
    if (s.size() % 2 != 0) throw DimensionError("state vector length must be even");
    const auto n = static_cast<std::ptrdiff_t>(s.size() / 2);
    return PhasePoint({s.begin(), s.begin() + n}, {s.begin() + n, s.end()});
}

// --- Observable -------------------------------------------------------------------

Observable::Observable(std::size_t dim, std::string name, Rule rule)
    : dim_(dim), name_(std::move(name)), rule_(std::make_shared<const Rule>(std::move(rule))) {
    if (dim_ == 0) throw DimensionError("observable dimension must be positive");
}

Observable Observable::named(std::string name) const {
    Observable out = *this;
    out.name_ = std::move(name);
    return out;
}

Jet Observable::jet(const PhasePoint& pt, int order) const {
    if (!rule_) throw Error("evaluation of an empty observable");
    if (pt.dim() != dim_) {
        throw DimensionError("observable '" + name_ + "' has dimension " + std::to_string(dim_) +
                             ", point has dimension " + std::to_string(pt.dim()));
    }
    Jet j = (*rule_)(pt, order);
    bool ok = finite(j.value);
    for (const auto& g : j.grad) ok = ok && finite(g);
    for (const auto& h : j.hess) ok = ok && finite(h);
    if (!ok) throw SingularEvaluation(name_);
    return j;
}

Observable constant(std::size_t dim, cplx c) {
    std::string name = c.imag() == 0.0 ? std::to_string(c.real()) : "const";
    return Observable(dim, name, [dim, c](const PhasePoint&, int order) {
        Jet j = zero_jet(dim, order);
        j.value = c;
        return j;
    });
}

namespace {
Observable coordinate(std::size_t dim, std::size_t k, std::string name) {
    return Observable(dim, std::move(name), [dim, k](const PhasePoint& pt, int order) {
        Jet j = zero_jet(dim, order);
        j.value = pt.coord(k);
        if (order >= 1) j.grad[k] = 1.0;
        return j;
    });
}
}  // namespace

Observable position(std::size_t dim, std::size_t i) {
    if (i >= dim) throw DimensionError("position index out of range");
    return coordinate(dim, i, "x" + std::to_string(i + 1));
}

Observable momentum(std::size_t dim, std::size_t i) {
    if (i >= dim) throw DimensionError("momentum index out of range");
    return coordinate(dim, dim + i, "p" + std::to_string(i + 1));
}

Observable operator+(const Observable& a, const Observable& b) {
    require_same_dim(a, b);
    return Observable(a.dim(), short_name(a) + " + " + short_name(b), [a, b](const PhasePoint& pt, int order) {
        return add(a.raw(pt, order), b.raw(pt, order), 1.0, order);
    });
}

Observable operator-(const Observable& a, const Observable& b) {
    require_same_dim(a, b);
    return Observable(a.dim(), short_name(a) + " - " + paren(b), [a, b](const PhasePoint& pt, int order) {
        return add(a.raw(pt, order), b.raw(pt, order), -1.0, order);
    });
}

Observable operator*(const Observable& a, const Observable& b) {
    require_same_dim(a, b);
    return Observable(a.dim(), paren(a) + "*" + paren(b), [a, b](const PhasePoint& pt, int order) {
        return mul(a.raw(pt, order), b.raw(pt, order), order);
    });
}

Observable operator/(const Observable& a, const Observable& b) {
    require_same_dim(a, b);
    return (a * (1.0 / b)).named(paren(a) + "/" + paren(b));
}

Observable operator-(const Observable& a) {
    return Observable(a.dim(), "-" + paren(a),
                      [a](const PhasePoint& pt, int order) { return scale(a.raw(pt, order), -1.0); });
}

Observable operator+(const Observable& a, cplx c) {
    return Observable(a.dim(), short_name(a), [a, c](const PhasePoint& pt, int order) {
        Jet j = a.raw(pt, order);
        j.value += c;
        return j;
    });
}
Observable operator+(cplx c, const Observable& a) { return a + c; }
Observable operator-(const Observable& a, cplx c) { return a + (-c); }
Observable operator-(cplx c, const Observable& a) { return (-a) + c; }

Observable operator*(const Observable& a, cplx c) {
    return Observable(a.dim(), paren(a), [a, c](const PhasePoint& pt, int order) { return scale(a.raw(pt, order), c); });
}
Observable operator*(cplx c, const Observable& a) { return a * c; }
Observable operator/(const Observable& a, cplx c) { return a * (1.0 / c); }

Observable operator/(cplx c, const Observable& a) {
    return apply(
               a, [c](cplx u) { return c / u; }, [c](cplx u) { return -c / (u * u); },
               [c](cplx u) { return 2.0 * c / (u * u * u); })
        .named(std::to_string(c.real()) + "/" + paren(a));
}

Observable apply(const Observable& u, std::function<cplx(cplx)> phi, std::function<cplx(cplx)> d1,
                 std::function<cplx(cplx)> d2) {
    return Observable(u.dim(), "f" + paren(u), [u, phi, d1, d2](const PhasePoint& pt, int order) {
        Jet ju = u.raw(pt, order);
        const cplx v = ju.value;
        const cplx g1 = order >= 1 ? d1(v) : cplx{};
        const cplx g2 = order >= 2 ? d2(v) : cplx{};
        return chain(std::move(ju), phi(v), g1, g2, order);
    });
}

Observable sqrt(const Observable& u) {
    return apply(
               u, [](cplx v) { return std::sqrt(v); }, [](cplx v) { return 0.5 / std::sqrt(v); },
               [](cplx v) { return -0.25 / (v * std::sqrt(v)); })
        .named("sqrt" + paren(u));
}

Observable exp(const Observable& u) {
    auto e = [](cplx v) { return std::exp(v); };
    return apply(u, e, e, e).named("exp" + paren(u));
}

Observable log(const Observable& u) {
    return apply(
               u, [](cplx v) { return std::log(v); }, [](cplx v) { return 1.0 / v; },
               [](cplx v) { return -1.0 / (v * v); })
        .named("log" + paren(u));
}

Observable sin(const Observable& u) {
    return apply(
               u, [](cplx v) { return std::sin(v); }, [](cplx v) { return std::cos(v); },
               [](cplx v) { return -std::sin(v); })
        .named("sin" + paren(u));
}

Observable cos(const Observable& u) {
    return apply(
               u, [](cplx v) { return std::cos(v); }, [](cplx v) { return -std::sin(v); },
               [](cplx v) { return -std::cos(v); })
        .named("cos" + paren(u));
}

Observable atan(const Observable& u) {
    return apply(
               u, [](cplx v) { return std::atan(v); }, [](cplx v) { return 1.0 / (1.0 + v * v); },
               [](cplx v) { return -2.0 * v / ((1.0 + v * v) * (1.0 + v * v)); })
        .named("atan" + paren(u));
}

Observable pow(const Observable& u, double a) {
    return apply(
               u, [a](cplx v) { return std::pow(v, a); }, [a](cplx v) { return a * std::pow(v, a - 1.0); },
               [a](cplx v) { return a * (a - 1.0) * std::pow(v, a - 2.0); })
        .named(paren(u) + "^" + std::to_string(a));
}

namespace {
cplx int_power(cplx v, int n) {
    cplx out = 1.0;
    cplx base = v;
    while (n > 0) {
        if (n & 1) out *= base;
        base *= base;
        n >>= 1;
    }
    return out;
}
}  // namespace

Observable ipow(const Observable& u, int n) {
    if (n < 0) throw DomainError("ipow needs a non-negative exponent");
    if (n == 0) return constant(u.dim(), 1.0);
    if (n == 1) return u;
    return apply(
               u, [n](cplx v) { return int_power(v, n); },
               [n](cplx v) { return static_cast<double>(n) * int_power(v, n - 1); },
               [n](cplx v) { return static_cast<double>(n) * (n - 1) * (n >= 2 ? int_power(v, n - 2) : cplx{}); })
        .named(paren(u) + "^" + std::to_string(n));
}

namespace {
Jet project(Jet j, bool imag) {
    auto pick = [imag](cplx z) { return cplx(imag ? z.imag() : z.real(), 0.0); };
    j.value = pick(j.value);
    for (auto& g : j.grad) g = pick(g);
    for (auto& h : j.hess) h = pick(h);
    return j;
}
}  // namespace

Observable real_part(const Observable& u) {
    return Observable(u.dim(), "Re" + paren(u), [u](const PhasePoint& pt, int order) { return project(u.raw(pt, order), false); });
}

Observable imag_part(const Observable& u) {
    return Observable(u.dim(), "Im" + paren(u), [u](const PhasePoint& pt, int order) { return project(u.raw(pt, order), true); });
}

Observable complex_from(const Observable& re, const Observable& im) {
    require_same_dim(re, im);
    return Observable(re.dim(), short_name(re) + " + i" + paren(im), [re, im](const PhasePoint& pt, int order) {
        return add(re.raw(pt, order), im.raw(pt, order), cplx(0.0, 1.0), order);
    });
}

Observable bracket(const Observable& f, const Observable& g) {
    require_same_dim(f, g);
    const std::size_t n = f.dim();
    return Observable(n, "{" + short_name(f) + ", " + short_name(g) + "}", [f, g, n](const PhasePoint& pt, int order) {
        if (order >= 2) throw Error("bracket observables support first-order evaluation only");
        Jet jf = f.raw(pt, order + 1);
        Jet jg = g.raw(pt, order + 1);
        const std::size_t w = 2 * n;
        Jet out;
        for (std::size_t i = 0; i < n; ++i) {
            out.value += jf.grad[i] * jg.grad[n + i] - jg.grad[i] * jf.grad[n + i];
        }
        if (order >= 1) {
            out.grad.assign(w, cplx{});
            for (std::size_t k = 0; k < w; ++k) {
                cplx s{};
                for (std::size_t i = 0; i < n; ++i) {
                    s += jf.hess[k * w + i] * jg.grad[n + i] + jf.grad[i] * jg.hess[k * w + n + i] -
                         jg.hess[k * w + i] * jf.grad[n + i] - jg.grad[i] * jf.hess[k * w + n + i];
                }
                out.grad[k] = s;
            }
        }
        return out;
    });
}

Observable substitute(const Observable& f, const std::vector<Observable>& coords) {
    if (coords.size() != 2 * f.dim()) {
        throw DimensionError("substitute needs 2N coordinate observables for '" + f.name() + "'");
    }
    const std::size_t src = coords.front().dim();
    for (const auto& c : coords) {
        if (c.dim() != src) throw DimensionError("substitute coordinates disagree on dimension");
    }
    const std::size_t tw = coords.size();
    return Observable(src, short_name(f) + " (mapped)", [f, coords, src, tw](const PhasePoint& pt, int order) {
        std::vector<Jet> cj;
        cj.reserve(tw);
        std::vector<double> target(tw);
        for (std::size_t k = 0; k < tw; ++k) {
            cj.push_back(coords[k].raw(pt, order));
            target[k] = cj.back().value.real();
        }
        Jet jf = f.raw(PhasePoint::from_state(target), order);
        const std::size_t w = 2 * src;
        Jet out;
        out.value = jf.value;
        if (order >= 1) {
            out.grad.assign(w, cplx{});
            for (std::size_t k = 0; k < tw; ++k)
                for (std::size_t a = 0; a < w; ++a) out.grad[a] += jf.grad[k] * cj[k].grad[a];
        }
        if (order >= 2) {
            out.hess.assign(w * w, cplx{});
            for (std::size_t k = 0; k < tw; ++k) {
                for (std::size_t a = 0; a < w * w; ++a) out.hess[a] += jf.grad[k] * cj[k].hess[a];
                for (std::size_t l = 0; l < tw; ++l) {
                    const cplx fkl = jf.hess[k * tw + l];
                    if (fkl == cplx{}) continue;
                    for (std::size_t a = 0; a < w; ++a)
                        for (std::size_t b = 0; b < w; ++b) out.hess[a * w + b] += fkl * cj[k].grad[a] * cj[l].grad[b];
                }
            }
        }
        return out;
    });
}

cplx poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& pt) {
    require_same_dim(f, g);
    const Jet jf = f.jet(pt, 1);
    const Jet jg = g.jet(pt, 1);
    const std::size_t n = f.dim();
    cplx s{};
    for (std::size_t i = 0; i < n; ++i) s += jf.grad[i] * jg.grad[n + i] - jg.grad[i] * jf.grad[n + i];
    return s;
}

double gradcheck(const Observable& f, const PhasePoint& pt, double step) {
    if (!(step > 0.0)) throw DomainError("gradcheck step must be positive");
    const Jet j = f.jet(pt, 1);
    double worst = 0.0;
    for (std::size_t k = 0; k < 2 * f.dim(); ++k) {
        const cplx fp = f.value(pt.shifted(k, step));
        const cplx fm = f.value(pt.shifted(k, -step));
        const cplx fd = (fp - fm) / (2.0 * step);
        worst = std::max(worst, std::abs(j.grad[k] - fd) / (1.0 + std::abs(j.grad[k])));
    }
    return worst;
}

PhasePoint sample_point(std::mt19937_64& rng, std::size_t dim, const SampleRegion& region) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> radius(region.r_min, region.r_max);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<double> x(dim), p(dim);
        double norm = 0.0;
        for (auto& v : x) {
            v = unit(rng);
            norm += v * v;
        }
        norm = std::sqrt(norm);
        if (norm < 1e-3) continue;
        const double r = radius(rng);
        bool ok = true;
        for (auto& v : x) {
            v *= r / norm;
            if (std::abs(v) < region.min_abs_coord) ok = false;
        }
        for (auto& v : p) v = region.p_max * unit(rng);
        if (ok) return PhasePoint(std::move(x), std::move(p));
    }
    throw DomainError("could not sample a point in the requested region");
}

}  // namespace superint
