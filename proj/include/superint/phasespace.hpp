#pragma once

// Differentiable observables on 2N-dimensional phase space and the Poisson
// bracket built on their analytic gradients.
//
// Every observable carries a complex value together with its gradient (and
// optionally its Hessian) with respect to the canonical coordinates, ordered
// as (x_1..x_N, p_1..p_N). Real observables simply have zero imaginary part.
// Derivatives are propagated forward through the combinators below, so a
// bracket is exact up to rounding.
//
// Bracket convention: {f, g} = sum_i df/dx_i dg/dp_i - dg/dx_i df/dp_i,
// so that {x.p, p^2} = 2 p^2.

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace superint {

using cplx = std::complex<double>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Raised when an observable is evaluated on one of its singular loci.
class SingularEvaluation : public Error {
public:
    explicit SingularEvaluation(const std::string& observable)
        : Error("singular evaluation of '" + observable + "'"), observable_(observable) {}
    const std::string& observable() const noexcept { return observable_; }

private:
    std::string observable_;
};

class PhasePoint {
public:
    PhasePoint(std::vector<double> x, std::vector<double> p);

    std::size_t dim() const noexcept { return x_.size(); }
    const std::vector<double>& x() const noexcept { return x_; }
    const std::vector<double>& p() const noexcept { return p_; }

    /// Canonical coordinate k in (x_1..x_N, p_1..p_N) ordering.
    double coord(std::size_t k) const { return k < dim() ? x_[k] : p_[k - dim()]; }
    PhasePoint shifted(std::size_t k, double delta) const;

    /// Packs as (x, p); the inverse of from_state.
    std::vector<double> state() const;
    static PhasePoint from_state(const std::vector<double>& s);

private:
    std::vector<double> x_;
    std::vector<double> p_;
};

/// Value, gradient and (when requested) Hessian of an observable at a point.
/// hess is row-major (2N x 2N) and empty for first-order evaluations.
struct Jet {
    cplx value{};
    std::vector<cplx> grad;
    std::vector<cplx> hess;

    bool has_hessian() const noexcept { return !hess.empty(); }
};

class Observable {
public:
    using Rule = std::function<Jet(const PhasePoint&, int order)>;

    /// An empty placeholder; evaluating it throws.
    Observable() = default;
    Observable(std::size_t dim, std::string name, Rule rule);

    std::size_t dim() const noexcept { return dim_; }
    const std::string& name() const noexcept { return name_; }
    Observable named(std::string name) const;

    /// Evaluates to the given derivative order (1 or 2). Throws DimensionError
    /// on a point of the wrong dimension and SingularEvaluation when the value
    /// or any derivative is not finite.
    Jet jet(const PhasePoint& pt, int order = 1) const;
    cplx value(const PhasePoint& pt) const { return jet(pt, 0).value; }
    double real_value(const PhasePoint& pt) const { return value(pt).real(); }

    /// Unchecked evaluation used by combinators.
    Jet raw(const PhasePoint& pt, int order) const { return (*rule_)(pt, order); }

private:
    std::size_t dim_ = 0;
    std::string name_;
    std::shared_ptr<const Rule> rule_;
};

// --- elementary observables -------------------------------------------------

Observable constant(std::size_t dim, cplx c);
Observable position(std::size_t dim, std::size_t i);
Observable momentum(std::size_t dim, std::size_t i);

// --- combinators --------------------------------------------------------------

Observable operator+(const Observable& a, const Observable& b);
Observable operator-(const Observable& a, const Observable& b);
Observable operator*(const Observable& a, const Observable& b);
Observable operator/(const Observable& a, const Observable& b);
Observable operator-(const Observable& a);

Observable operator+(const Observable& a, cplx c);
Observable operator+(cplx c, const Observable& a);
Observable operator-(const Observable& a, cplx c);
Observable operator-(cplx c, const Observable& a);
Observable operator*(const Observable& a, cplx c);
Observable operator*(cplx c, const Observable& a);
Observable operator/(const Observable& a, cplx c);
Observable operator/(cplx c, const Observable& a);

/// Generic smooth scalar function phi applied pointwise; d1, d2 are phi', phi''.
Observable apply(const Observable& u, std::function<cplx(cplx)> phi,
                 std::function<cplx(cplx)> d1, std::function<cplx(cplx)> d2);

Observable sqrt(const Observable& u);
Observable exp(const Observable& u);
Observable log(const Observable& u);
Observable sin(const Observable& u);
Observable cos(const Observable& u);
Observable atan(const Observable& u);
/// u^a for real a on the principal branch; intended for u > 0.
Observable pow(const Observable& u, double a);
/// u^n by repeated multiplication; n >= 0.
Observable ipow(const Observable& u, int n);

Observable real_part(const Observable& u);
Observable imag_part(const Observable& u);
/// re + i im.
Observable complex_from(const Observable& re, const Observable& im);

/// The bracket {f, g} as an observable. Its gradient needs second derivatives
/// of f and g, so it supports first-order evaluation only.
Observable bracket(const Observable& f, const Observable& g);

/// f composed with a coordinate change: coords holds the 2N target
/// coordinates (x_1..x_N, p_1..p_N of f's space) as observables on the source
/// space. Supports first and second order.
Observable substitute(const Observable& f, const std::vector<Observable>& coords);

// --- bracket calculus ---------------------------------------------------------

cplx poisson_bracket(const Observable& f, const Observable& g, const PhasePoint& pt);

/// max_k |analytic - central difference| / (1 + |analytic|) over the 2N coordinates.
double gradcheck(const Observable& f, const PhasePoint& pt, double step);

// --- sampling -------------------------------------------------------------------

/// Box for random phase points: radius in [r_min, r_max], every |x_i| >=
/// min_abs_coord, momenta uniform in [-p_max, p_max].
struct SampleRegion {
    double r_min = 0.3;
    double r_max = 2.0;
    double min_abs_coord = 0.0;
    double p_max = 1.0;
};

PhasePoint sample_point(std::mt19937_64& rng, std::size_t dim, const SampleRegion& region);

}  // namespace superint
