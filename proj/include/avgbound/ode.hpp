#pragma once

// Explicit embedded Runge-Kutta 5(4) integrator (Dormand-Prince coefficients)
// with proportional-integral step control, cubic Hermite dense output and a
// stop-predicate hook.

#include "avgbound/linalg.hpp"

#include <chrono>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace avgbound::ode {

using Rhs = std::function<Vector(double t, const Vector& y)>;
using StopPredicate = std::function<bool(double t, const Vector& y)>;

struct IvpProblem {
    std::size_t dimension = 0;
    Rhs rhs;
    double t0 = 0.0;
    Vector y0;
    double t_end = 0.0;
};

enum class Status { completed, stopped_by_predicate, step_failure };

enum class Failure { none, step_underflow, max_steps, budget_exceeded, non_finite };

struct IntegrateOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    StopPredicate stop;
    std::size_t max_steps = 50'000'000;
    double max_step = std::numeric_limits<double>::infinity();
    /// Wall-clock deadline; exceeding it ends the run with Failure::budget_exceeded.
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<Vector> derivatives;
    Status status = Status::completed;
    Failure failure = Failure::none;
    std::optional<double> stop_time;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;

    bool empty() const { return times.empty(); }
    double front_time() const { return times.front(); }
    double back_time() const { return times.back(); }
};

/// Integrates `problem` from t0 towards t_end. Evaluations of the right-hand
/// side that throw DomainError or return non-finite values reject the trial
/// step and shrink it. Throws std::invalid_argument on malformed problems or if
/// stop(t0, y0) already holds.
Trajectory integrate(const IvpProblem& problem, const IntegrateOptions& options);

Trajectory integrate(const IvpProblem& problem, double rtol, double atol, const StopPredicate& stop,
                     std::size_t max_steps);

/// Dense output at time t (cubic Hermite on the stored states and
/// derivatives). Throws std::out_of_range outside the trajectory span.
Vector sample(const Trajectory& traj, double t);

/// Derivative of the Hermite interpolant at time t.
Vector sample_derivative(const Trajectory& traj, double t);

std::string to_string(Status status);
std::string to_string(Failure failure);

}  // namespace avgbound::ode
