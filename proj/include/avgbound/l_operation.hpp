#pragma once

// Direct fast-time integration of L(t) = (I(t) - J(eps t))/eps and the angle
// lift Theta(t), with J taken from the dense output of a slow-time run.

#include "avgbound/linalg.hpp"
#include "avgbound/n_operation.hpp"
#include "avgbound/ode.hpp"
#include "avgbound/system.hpp"

#include <functional>
#include <vector>

namespace avgbound {

/// Averaged flow J(tau).
using SlowFlow = std::function<Vector(double tau)>;

/// J(tau) from the dense output of an estimator run.
SlowFlow slow_flow_from(const EstimatorTrajectory& est);

struct DirectTrajectory {
    std::size_t d = 1;
    double epsilon = 0.0;
    std::vector<double> t;
    std::vector<Vector> L;
    /// Unreduced angle lift.
    std::vector<double> theta;
    ode::Status status = ode::Status::completed;
    ode::Failure failure = ode::Failure::none;
    double wall_time_s = 0.0;
    /// Integrator output, state [L, Theta]; used for dense output.
    ode::Trajectory raw;

    bool budget_exceeded() const { return failure == ode::Failure::budget_exceeded; }
    double end_tau() const { return t.empty() ? 0.0 : epsilon * t.back(); }
};

struct DirectOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    /// Wall-clock budget in seconds.
    double time_budget_s = 240.0;
    std::size_t max_steps = 200'000'000;
};

/// Integrates dL/dt = f(J + eps L, Theta) - fbar(J),
/// dTheta/dt = omega(J + eps L) + eps g(J + eps L, Theta), with J = J(eps t),
/// from L = 0, Theta = theta0 up to t = U/eps. States with J + eps L outside
/// Lambda are refused, so leaving the domain ends in step failure.
DirectTrajectory run_l_operation(const SystemSpec& spec, const AuxiliaryBundle& aux, const SlowFlow& J, double U,
                                 const DirectOptions& options = {});

struct EnvelopePoint {
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    /// Slow time of the peak within the window.
    double tau_peak = 0.0;
    double peak = 0.0;
};

/// Windowed maxima of |L| over consecutive slow-time windows of width
/// `window`. Throws std::invalid_argument on an empty trajectory or window <= 0.
std::vector<EnvelopePoint> envelope(const DirectTrajectory& traj, double window);

}  // namespace avgbound
