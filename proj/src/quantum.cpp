#include "superint/quantum.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>

namespace superint {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

// Eighth-order central stencils on offsets -4..4.
constexpr double kD1[9] = {1.0 / 280, -4.0 / 105, 1.0 / 5, -4.0 / 5, 0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
constexpr double kD2[9] = {-1.0 / 560, 8.0 / 315, -1.0 / 5, 8.0 / 5, -205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

// How values beyond an end are supplied: dropped, or mirrored about the
// cell face assuming u ~ exp(s t) (s = 0 is Neumann, odd flips the sign).
struct Ghost {
    enum class Kind { zero, mirror } kind = Kind::zero;
    double s = 0.0;
    bool odd = false;

    static Ghost zero() { return {}; }
    static Ghost mirror(double s = 0.0) { return {Kind::mirror, s, false}; }
    static Ghost odd_mirror() { return {Kind::mirror, 0.0, true}; }
};

GridOperator stencil(std::size_t n, const double* c, double scale, double h, Ghost left, Ghost right) {
    Triplets tr;
    tr.reserve(9 * n);
    const auto N = static_cast<long>(n);
    for (long i = 0; i < N; ++i) {
        for (long o = -4; o <= 4; ++o) {
            const double v = c[o + 4] * scale;
            if (v == 0.0) continue;
            long col = i + o;
            double f = 1.0;
            if (col < 0) {
                if (left.kind == Ghost::Kind::zero) continue;
                const long j = -1 - col;
                f = std::exp(-left.s * (2 * j + 1) * h) * (left.odd ? -1.0 : 1.0);
                col = j;
            } else if (col >= N) {
                if (right.kind == Ghost::Kind::zero) continue;
                const long j = col - N;
                f = std::exp(right.s * (2 * j + 1) * h) * (right.odd ? -1.0 : 1.0);
                col = N - 1 - j;
            }
            if (col < 0 || col >= N) continue;
            tr.emplace_back(i, col, v * f);
        }
    }
    GridOperator m(N, N);
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
}

GridOperator diag(const GridFunction& d) {
    GridOperator m(d.size(), d.size());
    Triplets tr;
    for (Eigen::Index i = 0; i < d.size(); ++i) tr.emplace_back(i, i, d(i));
    m.setFromTriplets(tr.begin(), tr.end());
    return m;
}

GridOperator identity(std::size_t n) { return diag(GridFunction::Ones(static_cast<Eigen::Index>(n))); }

GridFunction kinetic_weight(const Sector& s, const RadialGrid& g) {
    return g.sample([&](double r) { return std::pow(1 + s.k * r * r, 2) / (r * r); });
}

GridFunction potential(const Sector& s, const RadialGrid& g) {
    return g.sample([&](double r) { return -s.mu * (1 - s.k * r * r) / r; });
}

GridOperator sector_hamiltonian(const Sector& s, const RadialGrid& g, Ghost left, Ghost right) {
    const std::size_t n = g.size();
    const GridOperator D2 = stencil(n, kD2, 1.0 / (g.h * g.h), g.h, left, right);
    const GridOperator K = D2 - s.l * s.l * identity(n);
    return GridOperator(-0.5 * s.hbar * s.hbar * diag(kinetic_weight(s, g)) * K) + diag(potential(s, g));
}

// Symmetric pencil A - E B of the sector: A = hbar^2/2 (-D2 + l^2) + V / w, B = 1 / w.
std::pair<GridOperator, GridFunction> symmetric_pencil(const Sector& s, const RadialGrid& g) {
    const std::size_t n = g.size();
    const GridOperator D2 = stencil(n, kD2, 1.0 / (g.h * g.h), g.h, Ghost::mirror(), Ghost::mirror());
    const GridFunction w = kinetic_weight(s, g);
    const GridFunction b = w.cwiseInverse();
    const GridFunction v = potential(s, g).cwiseProduct(b);
    GridOperator A = 0.5 * s.hbar * s.hbar * (GridOperator(-D2) + s.l * s.l * identity(n));
    A += diag(v);
    return {A, b};
}

class SturmCounter {
public:
    SturmCounter(GridOperator A, GridFunction B) : A_(std::move(A)), B_(diag(B)) { ldlt_.analyzePattern(A_); }
    int operator()(double sigma) {
        ldlt_.factorize(A_ - sigma * B_);
        if (ldlt_.info() != Eigen::Success) throw Error("LDL^T factorization failed at shift " + std::to_string(sigma));
        const auto& d = ldlt_.vectorD();
        return static_cast<int>((d.array() < 0.0).count());
    }

private:
    GridOperator A_, B_;
    Eigen::SimplicialLDLT<GridOperator, Eigen::Lower, Eigen::NaturalOrdering<int>> ldlt_;
};

}  // namespace

// --- problem --------------------------------------------------------------------

void RadialProblem::validate() const {
    if (!(hbar > 0)) throw DomainError("hbar must be positive");
    if (!(mu > 0)) throw DomainError("mu must be positive");
    if (k < 0) throw DomainError("k < 0 is outside the bound-state analysis");
    if (N < 2) throw DomainError("N must be at least 2");
    if (l < 0) throw DomainError("l must be non-negative");
}

Sector reduce(const RadialProblem& prob) {
    prob.validate();
    return {prob.k, prob.mu, prob.hbar, prob.l_tilde()};
}

double energy(int n, const Sector& s) {
    const double nu = n + s.l + 0.5;
    const double h2 = s.hbar * s.hbar;
    return -s.mu * s.mu / (2 * h2 * nu * nu) + 2 * s.k * h2 * nu * nu - s.k * h2 / 2;
}

double energy(int n, const RadialProblem& prob) { return energy(n, reduce(prob)); }

double sector_energy(const Sector& s) { return energy(0, s); }

double ground_state(const Sector& s, double r) {
    const double c = s.mu / (s.hbar * s.hbar * (s.l + 0.5));
    const double arc = s.k > 0 ? std::atan(std::sqrt(s.k) * r) / std::sqrt(s.k) : r;
    return std::pow(r / (1 + s.k * r * r), s.l) * std::exp(-c * arc);
}

// --- grid -----------------------------------------------------------------------

RadialGrid RadialGrid::make(double t_min, double t_max, double h) {
    if (!(t_max > t_min) || !(h > 0)) throw DomainError("bad grid bounds");
    RadialGrid g;
    g.t_min = t_min;
    g.t_max = t_max;
    const auto n = static_cast<std::size_t>(std::ceil((t_max - t_min) / h));
    g.h = (t_max - t_min) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        g.t.push_back(t_min + (static_cast<double>(i) + 0.5) * g.h);
        g.r.push_back(std::exp(g.t.back()));
    }
    return g;
}

GridFunction RadialGrid::sample(const std::function<double(double)>& f) const {
    GridFunction u(static_cast<Eigen::Index>(size()));
    for (std::size_t i = 0; i < size(); ++i) u(static_cast<Eigen::Index>(i)) = f(r[i]);
    return u;
}

GridFunction RadialGrid::measure(double k) const {
    return sample([&](double x) { return h * x * x / std::pow(1 + k * x * x, 2); });
}

RadialGrid default_grid(const Sector& s, int count) {
    if (s.k > 0) return RadialGrid::make(-60.0, 80.0, 0.02);
    const double nu = s.l + count + 2.5;
    const double a = s.hbar * s.hbar / s.mu;
    return RadialGrid::make(-60.0, std::log(a * (2 * nu * nu + 60 * nu)), 0.02);
}

double norm(const GridFunction& u, const GridFunction& weights, std::size_t margin) {
    const auto n = u.size();
    const auto m = static_cast<Eigen::Index>(margin);
    if (2 * m >= n) return 0.0;
    return std::sqrt((u.segment(m, n - 2 * m).array().square() * weights.segment(m, n - 2 * m).array()).sum());
}

double points_per_wavelength(const Sector& s, const RadialGrid& g, double E) {
    double qmax = 0.0;
    for (double r : g.r) {
        const double w = std::pow(1 + s.k * r * r, 2) / (r * r);
        const double V = -s.mu * (1 - s.k * r * r) / r;
        const double q2 = 2.0 / (s.hbar * s.hbar) * (E - V) / w - s.l * s.l;
        qmax = std::max(qmax, q2);
    }
    if (qmax <= 0) return std::numeric_limits<double>::infinity();
    return 2 * std::numbers::pi / (std::sqrt(qmax) * g.h);
}

GridOperator hamiltonian(const Sector& s, const RadialGrid& g) {
    return sector_hamiltonian(s, g, Ghost::zero(), Ghost::zero());
}

GridOperator ladder(const Sector& s, const RadialGrid& g, Ladder dir) {
    const double ppw = points_per_wavelength(s, g, sector_energy(s));
    if (ppw < 12.0)
        throw Error("grid too coarse: " + std::to_string(ppw) + " points per wavelength at E_l, need 12 (h = " +
                    std::to_string(g.h) + ")");
    const std::size_t n = g.size();
    const GridOperator D1 = stencil(n, kD1, 1.0 / g.h, g.h, Ghost::zero(), Ghost::zero());
    const GridFunction coef = g.sample([&](double r) { return (1 + s.k * r * r) / r; });
    const double shift = s.mu / (s.hbar * (s.l + 0.5));
    const double ang = dir == Ladder::raise ? -(s.l + 1) : s.l;
    const GridFunction pot =
        g.sample([&](double r) { return (dir == Ladder::raise ? shift : -shift) + s.hbar * ang * (1 - s.k * r * r) / r; });
    return GridOperator(-s.hbar * diag(coef) * D1) + diag(pot);
}

GridFunction wavefunction(int n, const Sector& s, const RadialGrid& g) {
    if (n < 0) throw DomainError("n must be non-negative");
    GridFunction u = g.sample([&](double r) { return ground_state(s.with_l(s.l + n), r); });
    for (int j = n - 1; j >= 0; --j) u = ladder(s.with_l(s.l + j), g, Ladder::raise) * u;
    const double nu = norm(u, g.measure(s.k));
    if (!(nu > 0)) throw Error("wavefunction underflow");
    return u / nu;
}

// --- spectra --------------------------------------------------------------------

double SpectrumTable::max_residual() const {
    double m = 0.0;
    for (const auto& r : rows)
        if (r.e_grid) m = std::max(m, r.residual);
    return m;
}

std::vector<double> sector_eigenvalues(const Sector& s, const RadialGrid& g, int count) {
    auto [A, B] = symmetric_pencil(s, g);
    SturmCounter sturm(A, B);
    double lo = -1.0;
    while (sturm(lo) > 0) lo *= 2;
    double hi;
    if (s.k > 0) {
        hi = 1.0;
        while (sturm(hi) < count) hi *= 2;
    } else {
        hi = -1e-300;
        count = std::min(count, sturm(hi));
    }
    std::vector<double> out;
    for (int j = 0; j < count; ++j) {
        double a = lo, b = hi;
        while (b - a > 1e-15 * std::max(1.0, std::abs(a) + std::abs(b))) {
            const double m = 0.5 * (a + b);
            if (m == a || m == b) break;
            (sturm(m) >= j + 1 ? b : a) = m;
        }
        out.push_back(0.5 * (a + b));
        lo = out.back();
    }
    return out;
}

std::vector<double> sector_eigenvalues(const Sector& s, int count) {
    return sector_eigenvalues(s, default_grid(s, count), count);
}

SpectrumTable eigensolve(const RadialProblem& prob, int count) {
    const Sector s = reduce(prob);
    if (count <= 0) throw DomainError("count must be positive");
    SpectrumTable t;
    t.problem = prob;
    const auto ev = sector_eigenvalues(s, count);
    for (int n = 0; n < count; ++n) {
        SpectrumRow row;
        row.n = n;
        row.l = prob.l;
        row.e_formula = energy(n, s);
        if (n < static_cast<int>(ev.size())) {
            row.e_grid = ev[static_cast<std::size_t>(n)];
            row.residual = std::abs(*row.e_grid - row.e_formula) / std::abs(row.e_formula);
        }
        t.rows.push_back(row);
    }
    if (static_cast<int>(ev.size()) < count)
        t.note = "grid holds " + std::to_string(ev.size()) + " bound states below the continuum; table truncated";
    return t;
}

std::vector<double> direct_eigenvalues(const RadialProblem& prob, const std::vector<double>& shifts) {
    const Sector s = reduce(prob);
    const RadialGrid g = default_grid(s, static_cast<int>(shifts.size()));
    const double a = (static_cast<double>(prob.N) - 2.0) / 2.0;
    const double c = s.l * s.l - a * a;
    const std::size_t n = g.size();
    const Ghost left = Ghost::mirror(s.l - a);
    const Ghost right = s.k > 0 ? Ghost::mirror(-s.l - a) : Ghost::zero();
    const GridOperator D2 = stencil(n, kD2, 1.0 / (g.h * g.h), g.h, left, right);
    const GridOperator D1 = stencil(n, kD1, 1.0 / g.h, g.h, left, right);
    const GridFunction w = kinetic_weight(s, g);
    const GridFunction b = w.cwiseInverse();
    GridOperator A = 0.5 * s.hbar * s.hbar * (GridOperator(-D2) - 2 * a * D1 + c * identity(n));
    A += diag(potential(s, g).cwiseProduct(b));
    const GridOperator B = diag(b);

    std::vector<double> out;
    for (double sigma : shifts) {
        Eigen::SparseLU<GridOperator> lu;
        lu.compute(A - sigma * B);
        if (lu.info() != Eigen::Success) throw Error("shift-invert factorization failed");
        GridFunction x = GridFunction::Ones(static_cast<Eigen::Index>(n));
        double lambda = sigma;
        for (int it = 0; it < 100; ++it) {
            const GridFunction y = lu.solve(B * x);
            const double nu = x.dot(y) / x.dot(x);
            const double next = sigma + 1.0 / nu;
            x = y / y.norm();
            const bool done = std::abs(next - lambda) < 1e-15 * std::max(1.0, std::abs(next));
            lambda = next;
            if (done && it > 2) break;
        }
        out.push_back(lambda);
    }
    return out;
}

void write_csv(std::ostream& os, const SpectrumTable& t) {
    os << "n,l,E_formula,E_grid,residual\n";
    char buf[160];
    for (const auto& r : t.rows) {
        if (r.e_grid)
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g\n", r.n, r.l, r.e_formula, *r.e_grid, r.residual);
        else
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,,\n", r.n, r.l, r.e_formula);
        os << buf;
    }
}

std::string to_json(const SpectrumTable& t) {
    nlohmann::json j;
    j["k"] = t.problem.k;
    j["mu"] = t.problem.mu;
    j["hbar"] = t.problem.hbar;
    j["beta"] = t.problem.beta.str();
    j["N"] = t.problem.N;
    j["l"] = t.problem.l;
    j["l_tilde"] = t.problem.l_tilde();
    j["rows"] = nlohmann::json::array();
    for (const auto& r : t.rows) {
        nlohmann::json row{{"n", r.n}, {"l", r.l}, {"E_formula", r.e_formula}};
        row["E_grid"] = r.e_grid ? nlohmann::json(*r.e_grid) : nlohmann::json(nullptr);
        row["residual"] = r.e_grid ? nlohmann::json(r.residual) : nlohmann::json(nullptr);
        j["rows"].push_back(row);
    }
    j["max_residual"] = t.max_residual();
    if (!t.note.empty()) j["note"] = t.note;
    return j.dump(2);
}

std::vector<std::vector<std::pair<int, int>>> degeneracy(const RadialProblem& prob, double e_lo, double e_hi, int n_max,
                                                         int l_max) {
    prob.validate();
    const long m2 = prob.beta.m, m1 = prob.beta.n;
    const long extra = m1 * (static_cast<long>(prob.N) - 2);
    // equal energies <=> equal nu <=> equal 2 m2 n + 2 m1 l + m1 (N - 2)
    std::map<long, std::vector<std::pair<int, int>>> groups;
    for (int n = 0; n <= n_max; ++n)
        for (int l = 0; l <= l_max; ++l) {
            RadialProblem p = prob;
            p.l = l;
            const double E = energy(n, p);
            if (E < e_lo || E > e_hi) continue;
            groups[2 * m2 * n + 2 * m1 * l + extra].push_back({n, l});
        }
    std::vector<std::vector<std::pair<int, int>>> out;
    for (auto& [key, g] : groups) {
        if (g.size() < 2) continue;
        std::sort(g.begin(), g.end());
        out.push_back(g);
    }
    return out;
}

// --- quantization equivalence ---------------------------------------------------

double direct_metric_curvature(std::size_t N, double beta, double k, double r) {
    const double a = std::pow(r, -beta) + k * std::pow(r, beta);
    const double da = -beta * std::pow(r, -beta - 1) + k * beta * std::pow(r, beta - 1);
    const double dda = beta * (beta + 1) * std::pow(r, -beta - 2) + k * beta * (beta - 1) * std::pow(r, beta - 2);
    const double f = beta * beta / (r * r * a * a);
    // f = exp(2 phi)
    const double p1 = -1.0 / r - da / a;
    const double p2 = 1.0 / (r * r) - dda / a + (da / a) * (da / a);
    const double n = static_cast<double>(N);
    const double lap = p2 + (n - 1) * p1 / r;
    return -(2 * (n - 1) * lap + (n - 2) * (n - 1) * p1 * p1) / f;
}

double laplace_beltrami_residual(const RadialProblem& prob, const RadialGrid& g, const GridFunction& u) {
    prob.validate();
    const double b = prob.beta.value(), k = prob.k, h2 = prob.hbar * prob.hbar;
    const double n = static_cast<double>(prob.N);
    const double ang = prob.l * (prob.l + n - 2);
    const std::size_t sz = g.size();
    const GridOperator D1 = stencil(sz, kD1, 1.0 / g.h, g.h, Ghost::zero(), Ghost::zero());
    const GridOperator D2 = stencil(sz, kD2, 1.0 / (g.h * g.h), g.h, Ghost::zero(), Ghost::zero());
    const GridFunction r = g.sample([](double x) { return x; });
    const GridFunction f = g.sample([&](double x) {
        const double a = std::pow(x, -b) + k * std::pow(x, b);
        return b * b / (x * x * a * a);
    });
    const GridFunction V = g.sample([&](double x) { return -prob.mu * (std::pow(x, -b) - k * std::pow(x, b)); });
    const GridFunction R = g.sample([&](double x) { return direct_metric_curvature(prob.N, b, k, x); });
    const auto pw = [](const GridFunction& x, double e) { return GridFunction(x.array().pow(e)); };

    // Laplace-Beltrami side
    const GridFunction flux = pw(f, n / 2 - 1).cwiseProduct(pw(r, n - 2)).cwiseProduct(D1 * u);
    const GridFunction lap_g = pw(f, -n / 2).cwiseProduct(pw(r, -n)).cwiseProduct(D1 * flux) -
                               ang * u.cwiseQuotient(f.cwiseProduct(r.cwiseProduct(r)));
    const double curv = n > 1 ? h2 * (n - 2) / (8 * (n - 1)) : 0.0;
    const GridFunction lb = -0.5 * h2 * lap_g + V.cwiseProduct(u) + curv * R.cwiseProduct(u);

    // conjugated direct side
    const GridFunction v = pw(f, (n - 2) / 4).cwiseProduct(u);
    const GridFunction lap_flat = (D2 * v + (n - 2) * (D1 * v) - ang * v).cwiseQuotient(r.cwiseProduct(r));
    const GridFunction hd = -0.5 * h2 * lap_flat.cwiseQuotient(f) + V.cwiseProduct(v);
    const GridFunction rhs = pw(f, (2 - n) / 4).cwiseProduct(hd);

    const GridFunction wts = g.h * pw(r, n).cwiseProduct(pw(f, n / 2));
    const std::size_t margin = 12;
    return norm(lb - rhs, wts, margin) / norm(u, wts, margin);
}

// --- reduced TTW ----------------------------------------------------------------

double ttw_coupling(double l, double beta) { return (1 - 4 * l * l) / (4 * beta * beta); }

TtwOperator ttw_quantum_build(double k, double mu, double beta, double b1, double b2, const RadialGrid& g,
                              std::size_t num_theta, double hbar) {
    if (b1 < 0 || b2 < 0) throw DomainError("b1, b2 must be non-negative");
    if (!(beta > 0) || !(hbar > 0) || num_theta < 9) throw DomainError("bad TTW grid parameters");
    TtwOperator op;
    op.k = k;
    op.mu = mu;
    op.beta = beta;
    op.b1 = b1;
    op.b2 = b2;
    op.hbar = hbar;
    op.grid = g;
    const std::size_t nt = g.size(), M = num_theta;
    const double width = beta * std::numbers::pi / 2, dth = width / static_cast<double>(M);
    for (std::size_t j = 0; j < M; ++j) op.theta.push_back((static_cast<double>(j) + 0.5) * dth);

    const GridOperator Dt = stencil(nt, kD2, 1.0 / (g.h * g.h), g.h, Ghost::mirror(), Ghost::mirror());
    const GridOperator Dth = stencil(M, kD2, 1.0 / (dth * dth), dth, Ghost::odd_mirror(), Ghost::odd_mirror());
    const Sector s{k, mu, hbar, 0.0};
    const GridFunction w = kinetic_weight(s, g), V = potential(s, g);

    Triplets tr;
    tr.reserve(nt * M * 18);
    for (int o = 0; o < Dt.outerSize(); ++o)
        for (GridOperator::InnerIterator it(Dt, o); it; ++it)
            for (std::size_t j = 0; j < M; ++j)
                tr.emplace_back(it.row() * M + j, it.col() * M + j, -0.5 * hbar * hbar * w(it.row()) * it.value());
    for (std::size_t i = 0; i < nt; ++i) {
        for (int o = 0; o < Dth.outerSize(); ++o)
            for (GridOperator::InnerIterator it(Dth, o); it; ++it)
                tr.emplace_back(i * M + it.row(), i * M + it.col(), -0.5 * hbar * hbar * w(i) * it.value());
        for (std::size_t j = 0; j < M; ++j) {
            const double c = std::cos(op.theta[j] / beta), sn = std::sin(op.theta[j] / beta);
            tr.emplace_back(i * M + j, i * M + j, 0.5 * w(i) * (b1 / (c * c) + b2 / (sn * sn)) + V(i));
        }
    }
    op.H.resize(static_cast<Eigen::Index>(nt * M), static_cast<Eigen::Index>(nt * M));
    op.H.setFromTriplets(tr.begin(), tr.end());
    op.weights.resize(static_cast<Eigen::Index>(nt * M));
    const GridFunction m = g.measure(k);
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < M; ++j) op.weights(static_cast<Eigen::Index>(i * M + j)) = m(i) * dth;
    return op;
}

double ttw_asymmetry(const TtwOperator& op) {
    const GridOperator WH = diag(op.weights) * op.H;
    const GridOperator WHt = WH.transpose();
    const GridOperator d = WH - WHt;
    double num = 0.0, den = 0.0;
    for (int o = 0; o < d.outerSize(); ++o)
        for (GridOperator::InnerIterator it(d, o); it; ++it) num = std::max(num, std::abs(it.value()));
    for (int o = 0; o < WH.outerSize(); ++o)
        for (GridOperator::InnerIterator it(WH, o); it; ++it) den = std::max(den, std::abs(it.value()));
    return den > 0 ? num / den : 0.0;
}

double ttw_reduction_residual(const TtwOperator& op, int m, const GridFunction& phi) {
    if (op.b1 != 0.0 || op.b2 != 0.0) throw DomainError("reduction identity needs b1 = b2 = 0");
    if (m < 1) throw DomainError("m must be positive");
    const double lambda = 2.0 * m / op.beta;
    const std::size_t nt = op.grid.size(), M = op.num_theta();
    const Sector s{op.k, op.mu, op.hbar, lambda};
    const GridFunction radial = sector_hamiltonian(s, op.grid, Ghost::mirror(), Ghost::mirror()) * phi;
    GridFunction psi(static_cast<Eigen::Index>(nt * M)), expect(static_cast<Eigen::Index>(nt * M));
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < M; ++j) {
            const double sn = std::sin(lambda * op.theta[j]);
            psi(static_cast<Eigen::Index>(i * M + j)) = phi(i) * sn;
            expect(static_cast<Eigen::Index>(i * M + j)) = radial(i) * sn;
        }
    return norm(op.H * psi - expect, op.weights) / norm(psi, op.weights);
}

}  // namespace superint
