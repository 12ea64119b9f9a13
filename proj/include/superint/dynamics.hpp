#pragma once

// Hamilton's equations from analytic gradients, integrated with an adaptive
// Runge-Kutta-Fehlberg 7(8) pair; closure detection, radial periods, drift
// logs and numerical scalar curvature of the conformally flat metrics.

#include "superint/systems.hpp"

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace superint {

/// Step-size underflow away from any known singular radius.
class IntegrationError : public Error {
public:
    IntegrationError(const std::string& what, PhasePoint last, double t) : Error(what), last_(std::move(last)), t_(t) {}
    const PhasePoint& last_state() const noexcept { return last_; }
    double time() const noexcept { return t_; }

private:
    PhasePoint last_;
    double t_;
};

struct NamedObservable {
    std::string name;
    Observable f;  // logged through its real part
};

struct IntegrateOptions {
    double tol = 1e-12;
    std::vector<NamedObservable> invariants;
    std::size_t max_steps = 5'000'000;
    double singular_margin = 1e-6;
    double escape_radius = 1e6;
    /// Stop at the first accepted step after this many pericentre passages (0 = off).
    std::size_t stop_after_pericentres = 0;
};

struct IntegrationEvent {
    std::string kind;  // "singular-approach", "escaped", "evaluation-failure"
    double t = 0.0;
    std::string detail;
};

struct IntegratorStats {
    std::size_t steps = 0;
    std::size_t rejected = 0;
    double tol = 0.0;
};

struct Trajectory {
    Observable hamiltonian;
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // (x, p)
    std::vector<double> energy;
    std::vector<std::pair<std::string, std::vector<double>>> logs;
    IntegratorStats stats;
    std::optional<IntegrationEvent> event;

    std::size_t dim() const { return states.empty() ? 0 : states.front().size() / 2; }
    PhasePoint point(std::size_t k) const { return PhasePoint::from_state(states[k]); }
    /// State at time t in [times.front(), times.back()] by one step from the
    /// preceding stored state.
    std::vector<double> dense_state(double t) const;
    const std::vector<double>& log(const std::string& name) const;
};

Trajectory integrate(const HamiltonianObservable& H, const PhasePoint& init, double t_final,
                     const IntegrateOptions& opts = {});

/// max_k |H_k - H_0| / max(|H_0|, 1e-300).
double energy_drift(const Trajectory& traj);
/// max_k |f_k - f_0| / scale for a logged series; scale defaults to |f_0|.
double relative_drift(const std::vector<double>& series, double scale = 0.0);

/// Times of refined pericentres (minima of |x|).
std::vector<double> pericentre_times(const Trajectory& traj);
/// Mean spacing of successive pericentres; nullopt if fewer than two.
std::optional<double> radial_period(const Trajectory& traj);

struct ClosureResult {
    bool bounded = false;
    bool closed = false;
    std::optional<double> period;
    double miss_distance = 0.0;  // smallest refined local minimum examined
    std::size_t minima_examined = 0;
};

/// Earliest refined local minimum of the normalized phase-space distance to
/// the initial state below tol. Momenta are scaled by sqrt(2 |E|).
ClosureResult detect_closure(const Trajectory& traj, double tol);

/// For a planar radial Hamiltonian: the connected interval of
/// {r : H(r, p_r = 0, L) <= E} containing r0, if it is compact and inside
/// the admissible region.
std::optional<std::pair<double, double>> radial_interval(const HamiltonianObservable& H, double E, double L, double r0);

/// Residual of cos(theta - theta0) K - (L^2 (1 - k r^2)/r - mu) along a planar
/// KeplerCurved trajectory, K = sqrt(2 E L^2 - 8 mu delta L^2 - 4 k L^4 + mu^2),
/// theta0 fitted from the initial state.
double orbit_equation_residual(const SystemSpec& spec, const Trajectory& traj);

void write_csv(std::ostream& os, const Trajectory& traj);

// --- curvature ------------------------------------------------------------------

using MetricFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Scalar curvature from the metric and finite-difference derivatives
/// (five-point stencils, step h, one Richardson level). Sphere is positive.
double scalar_curvature(const MetricFn& g, const Eigen::VectorXd& x, double h);

/// Conformal metric f(r) delta_ij with f = 1 / (r^2 (r^-beta + k r^beta)^2).
MetricFn perlick_i_metric(std::size_t dim, double beta, double k);

struct CurvatureSample {
    double r = 0.0;
    double closed_3d = 0.0, numeric_3d = 0.0;
    double closed_2d = 0.0, numeric_2d = 0.0;
    bool skipped = false;
    std::string note;
};

struct CurvatureReport {
    std::vector<CurvatureSample> samples;
    double max_deviation = 0.0;  // |numeric - closed| / max(1, |closed|)
};

/// R_I = 2 (1 - beta^2)(r^-beta + k r^beta)^2 + 24 beta^2 k and R_Ir = 8 beta^2 k.
CurvatureReport curvature_check(const SystemSpec& spec, const std::vector<double>& radii);

}  // namespace superint
