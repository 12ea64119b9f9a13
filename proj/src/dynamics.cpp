#include "superint/dynamics.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace superint {

namespace odeint = boost::numeric::odeint;
using State = std::vector<double>;

namespace {

struct HamiltonFlow {
    Observable H;
    void operator()(const State& s, State& ds, double /*t*/) const {
        const std::size_t N = s.size() / 2;
        const Jet j = H.jet(PhasePoint::from_state(s), 1);
        ds.resize(s.size());
        for (std::size_t i = 0; i < N; ++i) {
            ds[i] = j.grad[N + i].real();
            ds[N + i] = -j.grad[i].real();
        }
    }
};

double radius_of(const State& s) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < s.size() / 2; ++i) r2 += s[i] * s[i];
    return std::sqrt(r2);
}

// Golden-section/Brent minimum of f on [a, b].
std::pair<double, double> minimize(const std::function<double(double)>& f, double a, double b) {
    const auto res = boost::math::tools::brent_find_minima(f, a, b, 40);
    return {res.first, res.second};
}

}  // namespace

std::vector<double> Trajectory::dense_state(double t) const {
    if (times.empty()) throw DomainError("empty trajectory");
    const bool forward = times.back() >= times.front();
    const double lo = std::min(times.front(), times.back()), hi = std::max(times.front(), times.back());
    if (t < lo || t > hi) throw DomainError("dense output outside the integrated interval");
    std::size_t k;
    if (forward) {
        k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin());
    } else {
        k = static_cast<std::size_t>(
            std::upper_bound(times.begin(), times.end(), t, [](double a, double b) { return a > b; }) - times.begin());
    }
    k = k == 0 ? 0 : k - 1;
    if (times[k] == t) return states[k];
    State s = states[k];
    odeint::runge_kutta_fehlberg78<State> rk;
    rk.do_step(HamiltonFlow{hamiltonian}, s, times[k], t - times[k]);
    return s;
}

const std::vector<double>& Trajectory::log(const std::string& name) const {
    for (const auto& [n, v] : logs)
        if (n == name) return v;
    throw DomainError("no logged series '" + name + "'");
}

Trajectory integrate(const HamiltonianObservable& H, const PhasePoint& init, double t_final, const IntegrateOptions& opts) {
    if (!(opts.tol >= 1e-14 && opts.tol <= 1e-6)) throw DomainError("tolerance must lie in [1e-14, 1e-6]");
    if (init.dim() != H.spec.N) throw DimensionError("initial point dimension does not match the system");
    const double r0 = radius_of(init.state());
    if (!H.region.contains(r0)) throw DomainError("initial point outside the admissible region");

    Trajectory traj;
    traj.hamiltonian = H.H;
    traj.stats.tol = opts.tol;
    for (const auto& inv : opts.invariants) traj.logs.push_back({inv.name, {}});

    auto record = [&](double t, const State& s) {
        const PhasePoint pt = PhasePoint::from_state(s);
        traj.times.push_back(t);
        traj.states.push_back(s);
        traj.energy.push_back(H.H.real_value(pt));
        for (std::size_t i = 0; i < opts.invariants.size(); ++i)
            traj.logs[i].second.push_back(opts.invariants[i].f.real_value(pt));
    };

    HamiltonFlow flow{H.H};
    auto stepper = odeint::make_controlled(opts.tol, opts.tol, odeint::runge_kutta_fehlberg78<State>());
    State s = init.state();
    double t = 0.0;
    const double dir = t_final >= 0 ? 1.0 : -1.0;
    double dt = dir * std::min(1e-3, std::abs(t_final) + 1e-300);
    record(t, s);

    auto near_singular = [&](const State& st) -> std::optional<std::string> {
        const double r = radius_of(st);
        if (r < opts.singular_margin) return "origin";
        for (double rs : H.region.singular_radii)
            if (std::abs(r - rs) < opts.singular_margin) return "r = " + std::to_string(rs);
        if (std::isfinite(H.region.r_max) && r > H.region.r_max - opts.singular_margin) return "admissible boundary";
        return std::nullopt;
    };

    std::size_t pericentres = 0;
    while (dir * (t_final - t) > 0) {
        if (traj.stats.steps >= opts.max_steps) throw IntegrationError("step limit reached", PhasePoint::from_state(s), t);
        if (dir * (t + dt - t_final) > 0) dt = t_final - t;
        bool ok = false;
        try {
            ok = stepper.try_step(flow, s, t, dt) == odeint::success;
        } catch (const Error& e) {
            dt *= 0.25;
            ++traj.stats.rejected;
            if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t))) {
                traj.event = IntegrationEvent{"evaluation-failure", t, e.what()};
                break;
            }
            continue;
        }
        if (!ok) {
            ++traj.stats.rejected;
            if (std::abs(dt) < 1e-14 * std::max(1.0, std::abs(t))) {
                if (auto where = near_singular(s)) {
                    traj.event = IntegrationEvent{"singular-approach", t, *where};
                    break;
                }
                throw IntegrationError("step size underflow", PhasePoint::from_state(s), t);
            }
            continue;
        }
        ++traj.stats.steps;
        record(t, s);
        if (auto where = near_singular(s)) {
            traj.event = IntegrationEvent{"singular-approach", t, *where};
            break;
        }
        if (radius_of(s) > opts.escape_radius) {
            traj.event = IntegrationEvent{"escaped", t, ""};
            break;
        }
        if (opts.stop_after_pericentres > 0 && traj.states.size() >= 3) {
            const std::size_t k = traj.states.size() - 1;
            const double a = radius_of(traj.states[k - 2]), b = radius_of(traj.states[k - 1]), c = radius_of(traj.states[k]);
            if (a > b && b <= c && ++pericentres >= opts.stop_after_pericentres) break;
        }
    }
    return traj;
}

double energy_drift(const Trajectory& traj) {
    const double e0 = traj.energy.front();
    double worst = 0.0;
    for (double e : traj.energy) worst = std::max(worst, std::abs(e - e0));
    return worst / std::max(std::abs(e0), 1e-300);
}

double relative_drift(const std::vector<double>& series, double scale) {
    if (series.empty()) return 0.0;
    const double s = scale > 0 ? scale : std::max(std::abs(series.front()), 1e-300);
    double worst = 0.0;
    for (double v : series) worst = std::max(worst, std::abs(v - series.front()));
    return worst / s;
}

std::vector<double> pericentre_times(const Trajectory& traj) {
    std::vector<double> out;
    const auto& T = traj.times;
    for (std::size_t k = 1; k + 1 < T.size(); ++k) {
        const double a = radius_of(traj.states[k - 1]), b = radius_of(traj.states[k]), c = radius_of(traj.states[k + 1]);
        if (!(a > b && b <= c)) continue;
        const auto r_of = [&](double t) { return radius_of(traj.dense_state(t)); };
        const double lo = std::min(T[k - 1], T[k + 1]), hi = std::max(T[k - 1], T[k + 1]);
        out.push_back(minimize(r_of, lo, hi).first);
    }
    return out;
}

std::optional<double> radial_period(const Trajectory& traj) {
    const auto p = pericentre_times(traj);
    if (p.size() < 2) return std::nullopt;
    return (p.back() - p.front()) / static_cast<double>(p.size() - 1);
}

ClosureResult detect_closure(const Trajectory& traj, double tol) {
    ClosureResult out;
    out.miss_distance = std::numeric_limits<double>::infinity();
    if (traj.states.size() < 3) return out;
    out.bounded = !(traj.event && traj.event->kind == "escaped");
    if (!out.bounded) return out;

    const State& s0 = traj.states.front();
    const std::size_t N = s0.size() / 2;
    const double E = traj.energy.front();
    const double scale = std::abs(E) > 0 ? std::sqrt(2.0 * std::abs(E)) : 1.0;
    auto d2 = [&](const State& s) {
        double acc = 0.0;
        for (std::size_t i = 0; i < N; ++i) acc += (s[i] - s0[i]) * (s[i] - s0[i]);
        for (std::size_t i = N; i < 2 * N; ++i) acc += (s[i] - s0[i]) * (s[i] - s0[i]) / (scale * scale);
        return acc;
    };
    std::vector<double> d(traj.states.size());
    double dmax = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) dmax = std::max(dmax, d[k] = d2(traj.states[k]));
    std::size_t start = 0;
    while (start < d.size() && d[start] < 1e-2 * dmax) ++start;

    const auto& T = traj.times;
    for (std::size_t k = std::max<std::size_t>(start, 1); k + 1 < d.size(); ++k) {
        if (!(d[k - 1] > d[k] && d[k] <= d[k + 1])) continue;
        const auto f = [&](double t) { return d2(traj.dense_state(t)); };
        const double lo = std::min(T[k - 1], T[k + 1]), hi = std::max(T[k - 1], T[k + 1]);
        const auto [tm, fm] = minimize(f, lo, hi);
        const double miss = std::sqrt(std::max(fm, 0.0));
        ++out.minima_examined;
        out.miss_distance = std::min(out.miss_distance, miss);
        if (miss < tol) {
            out.closed = true;
            out.period = tm;
            out.miss_distance = miss;
            return out;
        }
    }
    return out;
}

std::optional<std::pair<double, double>> radial_interval(const HamiltonianObservable& H, double E, double L, double r0) {
    if (H.spec.N != 2) throw DimensionError("radial_interval works on planar systems");
    double limit = H.region.r_max;
    for (double rs : H.region.singular_radii)
        if (rs > r0) limit = std::min(limit, rs);
    limit = std::min(limit, 1e3);
    auto veff = [&](double r) { return H.H.real_value(from_polar(r, 0.0, 0.0, L)); };
    if (veff(r0) > E * (1 + 1e-12) + 1e-12) return std::nullopt;
    const int n = 4000;
    auto walk = [&](double from, double to) -> std::optional<double> {
        // first point where veff exceeds E, on a geometric grid
        const double ratio = std::pow(to / from, 1.0 / n);
        double prev = from;
        for (int i = 1; i <= n; ++i) {
            const double r = from * std::pow(ratio, i);
            double v;
            try {
                v = veff(r);
            } catch (const Error&) {
                return std::nullopt;
            }
            if (v > E) {
                double a = prev, b = r;
                for (int it = 0; it < 100; ++it) {
                    const double m = 0.5 * (a + b);
                    (veff(m) > E ? b : a) = m;
                }
                return 0.5 * (a + b);
            }
            prev = r;
        }
        return std::nullopt;
    };
    const auto lo = walk(r0, 1e-8);
    const auto hi = walk(r0, limit * (1 - 1e-9));
    if (!lo || !hi) return std::nullopt;
    return std::make_pair(*lo, *hi);
}

double orbit_equation_residual(const SystemSpec& spec, const Trajectory& traj) {
    if (spec.family != Family::KeplerCurved || spec.N != 2) throw DomainError("orbit equation is for planar KeplerCurved");
    const double k = spec.k, mu = spec.mu, delta = spec.delta;
    const double E = traj.energy.front();
    auto parts = [&](const State& s) {
        const Polar q = to_polar(PhasePoint::from_state(s));
        const double u = (1 - k * q.r * q.r) / q.r;
        const double L = q.ptheta;
        return std::array<double, 4>{q.theta, L * L * u - mu, (1 + k * q.r * q.r) * L * q.pr, L};
    };
    const auto p0 = parts(traj.states.front());
    const double theta0 = p0[0] - std::atan2(p0[2], p0[1]);
    double worst = 0.0;
    for (const auto& s : traj.states) {
        const auto p = parts(s);
        const double L = p[3];
        const double K = std::sqrt(2 * E * L * L - 8 * mu * delta * L * L - 4 * k * L * L * L * L + mu * mu);
        worst = std::max(worst, std::abs(std::cos(p[0] - theta0) * K - p[1]));
    }
    return worst;
}

void write_csv(std::ostream& os, const Trajectory& traj) {
    const std::size_t N = traj.dim();
    os << "t";
    for (std::size_t i = 1; i <= N; ++i) os << ",x" << i;
    for (std::size_t i = 1; i <= N; ++i) os << ",p" << i;
    os << ",H";
    for (const auto& [name, _] : traj.logs) os << "," << name;
    os << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
    };
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        put(traj.times[k]);
        for (double v : traj.states[k]) {
            os << ",";
            put(v);
        }
        os << ",";
        put(traj.energy[k]);
        for (const auto& [_, series] : traj.logs) {
            os << ",";
            put(series[k]);
        }
        os << "\n";
    }
}

// --- curvature ------------------------------------------------------------------

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct MetricDerivatives {
    Mat g;
    std::vector<Mat> d;                // d[m] = dg/dx_m
    std::vector<std::vector<Mat>> dd;  // dd[m][n]
};

MetricDerivatives differentiate(const MetricFn& g, const Vec& x, double h) {
    const auto n = static_cast<std::size_t>(x.size());
    const double c1[5] = {1, -8, 0, 8, -1};
    const double c2[5] = {-1, 16, -30, 16, -1};
    auto at = [&](std::size_t a, double sa, std::size_t b, double sb) {
        Vec y = x;
        y(a) += sa;
        y(b) += sb;
        return g(y);
    };
    MetricDerivatives md;
    md.g = g(x);
    md.d.assign(n, Mat::Zero(n, n));
    md.dd.assign(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    for (std::size_t m = 0; m < n; ++m) {
        for (int i = 0; i < 5; ++i) {
            if (c1[i] != 0) md.d[m] += c1[i] * at(m, (i - 2) * h, m, 0.0);
            md.dd[m][m] += c2[i] * at(m, (i - 2) * h, m, 0.0);
        }
        md.d[m] /= 12 * h;
        md.dd[m][m] /= 12 * h * h;
        for (std::size_t q = 0; q < m; ++q) {
            for (int i = 0; i < 5; ++i)
                for (int j = 0; j < 5; ++j)
                    if (c1[i] != 0 && c1[j] != 0) md.dd[m][q] += c1[i] * c1[j] * at(m, (i - 2) * h, q, (j - 2) * h);
            md.dd[m][q] /= 144 * h * h;
            md.dd[q][m] = md.dd[m][q];
        }
    }
    return md;
}

MetricDerivatives richardson(const MetricFn& g, const Vec& x, double h) {
    const auto a = differentiate(g, x, h), b = differentiate(g, x, h / 2);
    MetricDerivatives out = b;
    for (std::size_t m = 0; m < a.d.size(); ++m) {
        out.d[m] = (16 * b.d[m] - a.d[m]) / 15;
        for (std::size_t q = 0; q < a.d.size(); ++q) out.dd[m][q] = (16 * b.dd[m][q] - a.dd[m][q]) / 15;
    }
    return out;
}

}  // namespace

double scalar_curvature(const MetricFn& gfn, const Eigen::VectorXd& x, double h) {
    const auto md = richardson(gfn, x, h);
    const auto n = static_cast<std::size_t>(x.size());
    const Mat gi = md.g.inverse();
    // Gamma[k](i,j) and its derivatives dGamma[m][k](i,j)
    std::vector<Mat> Gam(n, Mat::Zero(n, n));
    std::vector<std::vector<Mat>> dGam(n, std::vector<Mat>(n, Mat::Zero(n, n)));
    std::vector<Mat> dgi(n);
    for (std::size_t m = 0; m < n; ++m) dgi[m] = -gi * md.d[m] * gi;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0;
                for (std::size_t l = 0; l < n; ++l) s += gi(k, l) * (md.d[i](j, l) + md.d[j](i, l) - md.d[l](i, j));
                Gam[k](i, j) = 0.5 * s;
                for (std::size_t m = 0; m < n; ++m) {
                    double t = 0;
                    for (std::size_t l = 0; l < n; ++l) {
                        t += dgi[m](k, l) * (md.d[i](j, l) + md.d[j](i, l) - md.d[l](i, j));
                        t += gi(k, l) * (md.dd[m][i](j, l) + md.dd[m][j](i, l) - md.dd[m][l](i, j));
                    }
                    dGam[m][k](i, j) = 0.5 * t;
                }
            }
    double R = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double Rij = 0;
            for (std::size_t k = 0; k < n; ++k) {
                Rij += dGam[k][k](i, j) - dGam[j][k](i, k);
                for (std::size_t l = 0; l < n; ++l) Rij += Gam[k](k, l) * Gam[l](i, j) - Gam[k](j, l) * Gam[l](i, k);
            }
            R += gi(i, j) * Rij;
        }
    return R;
}

MetricFn perlick_i_metric(std::size_t dim, double beta, double k) {
    return [dim, beta, k](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
        const double r = x.norm();
        const double a = std::pow(r, -beta) + k * std::pow(r, beta);
        return Eigen::MatrixXd::Identity(dim, dim) / (r * r * a * a);
    };
}

CurvatureReport curvature_check(const SystemSpec& spec, const std::vector<double>& radii) {
    if (spec.family != Family::PerlickI) throw DomainError("curvature_check needs a PerlickI spec");
    const double b = spec.beta.value(), k = spec.k;
    const auto g3 = perlick_i_metric(3, b, k), g2 = perlick_i_metric(2, b, k);
    Eigen::Vector3d u3(1.0, 2.0, 2.0);
    u3 /= 3.0;
    Eigen::Vector2d u2(3.0, 4.0);
    u2 /= 5.0;
    CurvatureReport rep;
    for (double r : radii) {
        CurvatureSample s;
        s.r = r;
        const double a = std::pow(r, -b) + k * std::pow(r, b);
        if (!(r > 0) || std::abs(a) < 1e-6 * std::pow(r, -b)) {
            s.skipped = true;
            s.note = "conformal factor singular";
            rep.samples.push_back(s);
            continue;
        }
        s.closed_3d = 2 * (1 - b * b) * a * a + 24 * b * b * k;
        s.closed_2d = 8 * b * b * k;
        const double h = 1e-2 * r;
        s.numeric_3d = scalar_curvature(g3, r * Eigen::VectorXd(u3), h);
        s.numeric_2d = scalar_curvature(g2, r * Eigen::VectorXd(u2), h);
        rep.max_deviation = std::max({rep.max_deviation, std::abs(s.numeric_3d - s.closed_3d) / std::max(1.0, std::abs(s.closed_3d)),
                                      std::abs(s.numeric_2d - s.closed_2d) / std::max(1.0, std::abs(s.closed_2d))});
        rep.samples.push_back(s);
    }
    return rep;
}

}  // namespace superint
