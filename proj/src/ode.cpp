#include "avgbound/ode.hpp"

#include "avgbound/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace avgbound::ode {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kSafety = 0.9;
constexpr double kFacMin = 0.2;
constexpr double kFacMax = 10.0;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - 0.75 * kBeta;
constexpr double kRejectShrink = 0.25;
constexpr int kMaxBisections = 40;

bool all_finite(const Vector& v) { return v.allFinite(); }

// Returns false when the right-hand side refused the point.
bool eval(const Rhs& rhs, double t, const Vector& y, Vector& out, std::size_t& counter) {
    ++counter;
    try {
        out = rhs(t, y);
    } catch (const DomainError&) {
        return false;
    }
    return all_finite(out);
}

double scaled_max(const Vector& err, const Vector& y0, const Vector& y1, double rtol, double atol) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        worst = std::max(worst, std::abs(err(i)) / sc);
    }
    return worst;
}

double initial_step(const Rhs& rhs, double t0, const Vector& y0, const Vector& f0, double span, double rtol,
                    double atol, std::size_t& counter) {
    auto rms = [&](const Vector& v) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i) {
            const double sc = atol + rtol * std::abs(y0(i));
            s += (v(i) / sc) * (v(i) / sc);
        }
        return std::sqrt(s / static_cast<double>(v.size()));
    };
    const double d0 = rms(y0);
    const double d1 = rms(f0);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    Vector f1;
    if (!eval(rhs, t0 + h0, y0 + h0 * f0, f1, counter)) return std::min(h0, 1e-3 * span);
    const double d2 = rms(f1 - f0) / h0;
    const double dm = std::max(d1, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, span});
}

Vector hermite(double t0, const Vector& y0, const Vector& f0, double t1, const Vector& y1, const Vector& f1,
               double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1;
}

Vector hermite_derivative(double t0, const Vector& y0, const Vector& f0, double t1, const Vector& y1,
                          const Vector& f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double s2 = s * s;
    const double d00 = (6 * s2 - 6 * s) / h;
    const double d10 = 3 * s2 - 4 * s + 1;
    const double d01 = (-6 * s2 + 6 * s) / h;
    const double d11 = 3 * s2 - 2 * s;
    return d00 * y0 + d10 * f0 + d01 * y1 + d11 * f1;
}

bool stop_holds(const StopPredicate& stop, double t, const Vector& y) {
    if (!stop) return false;
    try {
        return stop(t, y);
    } catch (const DomainError&) {
        return true;
    }
}

std::size_t locate(const Trajectory& traj, double t) {
    if (traj.empty()) throw std::out_of_range("sample on empty trajectory");
    const double lo = traj.times.front(), hi = traj.times.back();
    if (!(t >= lo && t <= hi))
        throw std::out_of_range("time " + std::to_string(t) + " outside trajectory span [" + std::to_string(lo) +
                                ", " + std::to_string(hi) + "]");
    auto it = std::upper_bound(traj.times.begin(), traj.times.end(), t);
    std::size_t idx = static_cast<std::size_t>(it - traj.times.begin());
    if (idx == 0) idx = 1;
    if (idx >= traj.times.size()) idx = traj.times.size() - 1;
    return idx - 1;
}

}  // namespace

Trajectory integrate(const IvpProblem& problem, const IntegrateOptions& options) {
    const std::size_t n = problem.dimension;
    if (n == 0 || static_cast<std::size_t>(problem.y0.size()) != n)
        throw std::invalid_argument("initial state has wrong dimension");
    if (!problem.rhs) throw std::invalid_argument("right-hand side missing");
    if (!(problem.t_end > problem.t0)) throw std::invalid_argument("t_end must exceed t0");
    if (!(options.rtol > 0.0) || !(options.atol > 0.0)) throw std::invalid_argument("tolerances must be positive");
    if (!all_finite(problem.y0)) throw std::invalid_argument("initial state is not finite");

    Trajectory traj;
    const Rhs& rhs = problem.rhs;
    const double t0 = problem.t0, t_end = problem.t_end;
    const double span = t_end - t0;
    const double h_min = 1e-14 * span;

    if (stop_holds(options.stop, t0, problem.y0))
        throw std::invalid_argument("stop predicate already holds at the initial point");

    Vector y = problem.y0;
    Vector k1;
    if (!eval(rhs, t0, y, k1, traj.rhs_evaluations))
        throw DomainError("right-hand side is undefined at the initial point");

    traj.times.push_back(t0);
    traj.states.push_back(y);
    traj.derivatives.push_back(k1);

    double t = t0;
    double h = std::min(options.max_step,
                        initial_step(rhs, t0, y, k1, span, options.rtol, options.atol, traj.rhs_evaluations));
    double err_old = 1e-4;
    bool last_rejected = false;
    std::size_t steps = 0;

    Vector k2, k3, k4, k5, k6, k7, y_new, y_stage;

    while (t < t_end) {
        if (steps++ >= options.max_steps) {
            traj.status = Status::step_failure;
            traj.failure = Failure::max_steps;
            return traj;
        }
        if (options.deadline && (steps & 63u) == 0 && std::chrono::steady_clock::now() > *options.deadline) {
            traj.status = Status::step_failure;
            traj.failure = Failure::budget_exceeded;
            return traj;
        }
        if (h < h_min) {
            traj.status = Status::step_failure;
            traj.failure = Failure::step_underflow;
            return traj;
        }
        bool final_step = false;
        if (t + h >= t_end) {
            h = t_end - t;
            final_step = true;
        }

        auto& cnt = traj.rhs_evaluations;
        bool ok = eval(rhs, t + c2 * h, y + h * (a21 * k1), k2, cnt);
        ok = ok && eval(rhs, t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3, cnt);
        ok = ok && eval(rhs, t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4, cnt);
        ok = ok && eval(rhs, t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5, cnt);
        if (ok) {
            y_stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            ok = eval(rhs, final_step ? t_end : t + h, y_stage, k6, cnt);
        }
        if (ok) {
            y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            ok = all_finite(y_new) && eval(rhs, final_step ? t_end : t + h, y_new, k7, cnt);
        }
        if (!ok) {
            ++traj.rejected_steps;
            h *= kRejectShrink;
            last_rejected = true;
            continue;
        }

        const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double en = scaled_max(err, y, y_new, options.rtol, options.atol);
        if (!std::isfinite(en)) {
            ++traj.rejected_steps;
            h *= kRejectShrink;
            last_rejected = true;
            continue;
        }

        if (en > 1.0) {
            ++traj.rejected_steps;
            const double fac = std::max(kFacMin, kSafety * std::pow(en, -kExpo));
            h *= std::min(1.0, fac);
            last_rejected = true;
            continue;
        }

        const double t_new = final_step ? t_end : t + h;

        if (stop_holds(options.stop, t_new, y_new)) {
            double lo = t, hi = t_new;
            Vector y_lo = y;
            for (int it = 0; it < kMaxBisections; ++it) {
                if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) break;
                const double mid = 0.5 * (lo + hi);
                const Vector ym = hermite(t, y, k1, t_new, y_new, k7, mid);
                if (stop_holds(options.stop, mid, ym)) {
                    hi = mid;
                } else {
                    lo = mid;
                    y_lo = ym;
                }
            }
            if (lo > t) {
                Vector f_lo;
                if (!eval(rhs, lo, y_lo, f_lo, traj.rhs_evaluations))
                    f_lo = hermite_derivative(t, y, k1, t_new, y_new, k7, lo);
                traj.times.push_back(lo);
                traj.states.push_back(y_lo);
                traj.derivatives.push_back(f_lo);
            }
            traj.status = Status::stopped_by_predicate;
            traj.stop_time = hi;
            return traj;
        }

        t = t_new;
        y = y_new;
        k1 = k7;
        traj.times.push_back(t);
        traj.states.push_back(y);
        traj.derivatives.push_back(k1);

        double fac = kSafety * std::pow(std::max(en, 1e-10), -kExpo) * std::pow(err_old, kBeta);
        fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
        h = std::min(h * fac, options.max_step);
        err_old = std::max(en, 1e-4);
        last_rejected = false;
    }

    traj.status = Status::completed;
    return traj;
}

Trajectory integrate(const IvpProblem& problem, double rtol, double atol, const StopPredicate& stop,
                     std::size_t max_steps) {
    IntegrateOptions opts;
    opts.rtol = rtol;
    opts.atol = atol;
    opts.stop = stop;
    opts.max_steps = max_steps;
    return integrate(problem, opts);
}

Vector sample(const Trajectory& traj, double t) {
    const std::size_t i = locate(traj, t);
    if (traj.times.size() == 1 || t == traj.times[i]) return traj.states[i];
    if (t == traj.times[i + 1]) return traj.states[i + 1];
    return hermite(traj.times[i], traj.states[i], traj.derivatives[i], traj.times[i + 1], traj.states[i + 1],
                   traj.derivatives[i + 1], t);
}

Vector sample_derivative(const Trajectory& traj, double t) {
    const std::size_t i = locate(traj, t);
    if (traj.times.size() == 1 || t == traj.times[i]) return traj.derivatives[i];
    if (t == traj.times[i + 1]) return traj.derivatives[i + 1];
    return hermite_derivative(traj.times[i], traj.states[i], traj.derivatives[i], traj.times[i + 1],
                              traj.states[i + 1], traj.derivatives[i + 1], t);
}

std::string to_string(Status status) {
    switch (status) {
        case Status::completed: return "completed";
        case Status::stopped_by_predicate: return "stopped_by_predicate";
        case Status::step_failure: return "step_failure";
    }
    return "unknown";
}

std::string to_string(Failure failure) {
    switch (failure) {
        case Failure::none: return "none";
        case Failure::step_underflow: return "step_underflow";
        case Failure::max_steps: return "max_steps";
        case Failure::budget_exceeded: return "budget_exceeded";
        case Failure::non_finite: return "non_finite";
    }
    return "unknown";
}

}  // namespace avgbound::ode
