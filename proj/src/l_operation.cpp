#include "avgbound/l_operation.hpp"

#include "avgbound/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace avgbound {

SlowFlow slow_flow_from(const EstimatorTrajectory& est) {
    const PackedLayout layout{est.d};
    const ode::Trajectory* raw = &est.raw;
    return [layout, raw](double tau) {
        const double end = raw->back_time();
        if (tau > end && tau <= end + 1e-12 * std::max(1.0, std::abs(end))) tau = end;
        return layout.J(ode::sample(*raw, tau));
    };
}

DirectTrajectory run_l_operation(const SystemSpec& spec, const AuxiliaryBundle& aux, const SlowFlow& J, double U,
                                 const DirectOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    validate_system(spec);
    if (!(U > 0.0) || !std::isfinite(U)) throw ConfigError("U must be positive");
    if (!J) throw ConfigError("slow flow missing");

    const std::size_t d = spec.d;
    const double eps = spec.epsilon;
    const auto dd = static_cast<Eigen::Index>(d);

    ode::IvpProblem problem;
    problem.dimension = d + 1;
    problem.t0 = 0.0;
    problem.t_end = U / eps;
    problem.y0 = Vector::Zero(dd + 1);
    problem.y0(dd) = spec.theta0;
    problem.rhs = [&spec, &aux, &J, eps, d, dd](double t, const Vector& y) {
        const Vector Jt = J(eps * t);
        const Vector L = y.head(dd);
        const double theta = y(dd);
        const Vector I = Jt + eps * L;
        if (!spec.in_domain(I)) throw DomainError("actions left the domain");
        Vector out(static_cast<Eigen::Index>(d + 1));
        out.head(dd) = spec.f(I, theta) - aux.fbar(Jt);
        out(dd) = spec.omega(I) + eps * spec.g(I, theta);
        return out;
    };

    ode::IntegrateOptions io;
    io.rtol = options.rtol;
    io.atol = options.atol;
    io.max_steps = options.max_steps;
    io.deadline = start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                              std::chrono::duration<double>(options.time_budget_s));

    DirectTrajectory out;
    out.d = d;
    out.epsilon = eps;
    out.raw = ode::integrate(problem, io);
    out.status = out.raw.status;
    out.failure = out.raw.failure;

    const std::size_t count = out.raw.times.size();
    out.t = out.raw.times;
    out.L.reserve(count);
    out.theta.reserve(count);
    for (const auto& y : out.raw.states) {
        out.L.push_back(y.head(dd));
        out.theta.push_back(y(dd));
    }
    out.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

std::vector<EnvelopePoint> envelope(const DirectTrajectory& traj, double window) {
    if (traj.t.empty()) throw std::invalid_argument("envelope of an empty trajectory");
    if (!(window > 0.0)) throw std::invalid_argument("envelope window must be positive");

    std::vector<EnvelopePoint> out;
    const double eps = traj.epsilon;
    // A final point sitting exactly on a window edge joins the previous window.
    const long last = std::max(0L, static_cast<long>(std::ceil(eps * traj.t.back() / window)) - 1);
    long current = -1;
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double tau = eps * traj.t[i];
        const long k = std::min(last, static_cast<long>(std::floor(tau / window)));
        const double absL = traj.L[i].norm();
        if (k != current) {
            current = k;
            out.push_back({k * window, (k + 1) * window, tau, absL});
        } else if (absL > out.back().peak) {
            out.back().peak = absL;
            out.back().tau_peak = tau;
        }
    }
    return out;
}

}  // namespace avgbound
