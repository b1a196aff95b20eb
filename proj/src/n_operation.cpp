#include "avgbound/n_operation.hpp"

#include "avgbound/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

namespace avgbound {

Matrix PackedLayout::R(const Vector& y) const {
    Matrix out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i, j) = y(static_cast<Eigen::Index>(r_offset() + i * d + j));
    return out;
}

Vector PackedLayout::pack(const Vector& J, const Matrix& R, const Vector& K, double m, double n) const {
    Vector y(size());
    for (std::size_t i = 0; i < d; ++i) {
        y(static_cast<Eigen::Index>(i)) = J(i);
        y(static_cast<Eigen::Index>(k_offset() + i)) = K(i);
        for (std::size_t j = 0; j < d; ++j) y(static_cast<Eigen::Index>(r_offset() + i * d + j)) = R(i, j);
    }
    y(static_cast<Eigen::Index>(m_index())) = m;
    y(static_cast<Eigen::Index>(n_index())) = n;
    return y;
}

std::string to_string(EstimatorStatus status) {
    switch (status) {
        case EstimatorStatus::completed: return "completed";
        case EstimatorStatus::domain_violation: return "domain_violation";
        case EstimatorStatus::step_failure: return "step_failure";
    }
    return "unknown";
}

std::string to_string(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::n_nonpositive: return "n_nonpositive";
        case ViolationKind::n_exceeds_rho_over_eps: return "n_exceeds_rho_over_eps";
        case ViolationKind::dalpha_dr_exceeds_inv_eps: return "dalpha_dr_exceeds_inv_eps";
    }
    return "unknown";
}

Vector EstimatorTrajectory::state_at(double t) const { return ode::sample(raw, t); }

namespace {

double alpha_hat(const BoundBundle& b, const Vector& J, const Matrix& R, const Vector& K, double r, double eps) {
    return b.a_hat(J, R, K, r) + eps * b.b_hat(J, r);
}

double fd_scale(double x, double fd_step) { return fd_step * std::max(1.0, std::abs(x)); }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(10);
    os << x;
    return os.str();
}

Matrix identity_like(std::size_t d) { return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)); }

}  // namespace

double alpha_dr(const BoundBundle& bounds, const Vector& J, const Matrix& R, const Vector& K, double r,
                double epsilon, double fd_step) {
    if (bounds.a_hat_dr && bounds.b_hat_dr) return bounds.a_hat_dr(J, R, K, r) + epsilon * bounds.b_hat_dr(J, r);
    const double h = fd_scale(r, fd_step);
    auto f = [&](double x) { return alpha_hat(bounds, J, R, K, x, epsilon); };
    if (r - h < 0.0) return (-3.0 * f(r) + 4.0 * f(r + h) - f(r + 2.0 * h)) / (2.0 * h);
    return (f(r + h) - f(r - h)) / (2.0 * h);
}

AlphaGradient alpha_gradient(const BoundBundle& bounds, const Vector& J, const Matrix& R, const Vector& K, double r,
                             double epsilon, double fd_step) {
    const auto d = J.size();
    AlphaGradient g{Vector::Zero(d), Matrix::Zero(d, d), Vector::Zero(d)};

    if (bounds.a_hat_grad) {
        const BoundGradient ga = bounds.a_hat_grad(J, R, K, r);
        g.dJ = ga.dJ;
        g.dR = ga.dR;
        g.dK = ga.dK;
    } else {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double h = fd_scale(J(i), fd_step);
            Vector jp = J, jm = J;
            jp(i) += h;
            jm(i) -= h;
            g.dJ(i) = (bounds.a_hat(jp, R, K, r) - bounds.a_hat(jm, R, K, r)) / (2.0 * h);

            const double hk = fd_scale(K(i), fd_step);
            Vector kp = K, km = K;
            kp(i) += hk;
            km(i) -= hk;
            g.dK(i) = (bounds.a_hat(J, R, kp, r) - bounds.a_hat(J, R, km, r)) / (2.0 * hk);

            for (Eigen::Index j = 0; j < d; ++j) {
                const double hr = fd_scale(R(i, j), fd_step);
                Matrix rp = R, rm = R;
                rp(i, j) += hr;
                rm(i, j) -= hr;
                g.dR(i, j) = (bounds.a_hat(J, rp, K, r) - bounds.a_hat(J, rm, K, r)) / (2.0 * hr);
            }
        }
    }

    if (bounds.b_hat_dJ) {
        g.dJ += epsilon * bounds.b_hat_dJ(J, r);
    } else {
        for (Eigen::Index i = 0; i < d; ++i) {
            const double h = fd_scale(J(i), fd_step);
            Vector jp = J, jm = J;
            jp(i) += h;
            jm(i) -= h;
            g.dJ(i) += epsilon * (bounds.b_hat(jp, r) - bounds.b_hat(jm, r)) / (2.0 * h);
        }
    }
    return g;
}

void check_window(const SystemSpec& spec, const BoundBundle& bounds, const ContractionWindow& w, double fd_step) {
    const double eps = spec.epsilon;
    const Vector& J0 = spec.i0;
    const Matrix R0 = identity_like(spec.d);
    const Vector K0 = Vector::Zero(static_cast<Eigen::Index>(spec.d));
    const double ceiling = bounds.rho_hat(J0) / eps;

    if (!(w.sigma > 0.0)) throw ContractionViolation("window sigma must be positive");
    if (!(w.ell_star - w.sigma > 0.0) || !(w.ell_star + w.sigma < ceiling))
        throw ContractionViolation("window [" + fmt(w.ell_star - w.sigma) + ", " + fmt(w.ell_star + w.sigma) +
                                   "] not inside (0, rho(0)/eps) = (0, " + fmt(ceiling) + ")");
    if (!(w.M >= 0.0) || !(w.M < 1.0 / eps))
        throw ContractionViolation("M = " + fmt(w.M) + " must lie in [0, 1/eps)");

    constexpr int kSamples = 101;
    for (int k = 0; k < kSamples; ++k) {
        const double ell = w.ell_star - w.sigma + 2.0 * w.sigma * k / (kSamples - 1);
        const double slope = std::abs(alpha_dr(bounds, J0, R0, K0, eps * ell, eps, fd_step));
        if (!(slope <= w.M + 1e-12))
            throw ContractionViolation("sampled |d alpha/d r| = " + fmt(slope) + " at ell = " + fmt(ell) +
                                       " exceeds M = " + fmt(w.M));
    }
    const double drift = std::abs(alpha(bounds, J0, R0, K0, eps * w.ell_star, eps) - w.ell_star);
    if (!(drift + eps * w.M * w.sigma < w.sigma))
        throw ContractionViolation("self-map condition fails: |alpha(0, eps ell*) - ell*| + eps M sigma = " +
                                   fmt(drift + eps * w.M * w.sigma) + " >= sigma = " + fmt(w.sigma));
}

ContractionWindow auto_window(const SystemSpec& spec, const BoundBundle& bounds, double fd_step) {
    const double eps = spec.epsilon;
    const Vector& J0 = spec.i0;
    const Matrix R0 = identity_like(spec.d);
    const Vector K0 = Vector::Zero(static_cast<Eigen::Index>(spec.d));
    const double ceiling = bounds.rho_hat(J0) / eps;

    double centre = alpha(bounds, J0, R0, K0, 0.0, eps);
    std::string last_error = "no candidate window";
    for (int recentre = 0; recentre < 20; ++recentre) {
        if (!(centre > 0.0) || !(centre < ceiling)) break;
        double sigma = centre / 2.0;
        for (int shrink = 0; shrink < 12; ++shrink, sigma /= 2.0) {
            const double room = std::min(centre, ceiling - centre);
            ContractionWindow w{centre, std::min(sigma, 0.999 * room), 0.0};
            double worst = 0.0;
            for (int k = 0; k < 101; ++k) {
                const double ell = w.ell_star - w.sigma + 2.0 * w.sigma * k / 100.0;
                worst = std::max(worst, std::abs(alpha_dr(bounds, J0, R0, K0, eps * ell, eps, fd_step)));
            }
            w.M = worst;
            try {
                check_window(spec, bounds, w, fd_step);
                return w;
            } catch (const ContractionViolation& e) {
                last_error = e.what();
            }
        }
        centre = alpha(bounds, J0, R0, K0, eps * centre, eps);
    }
    throw ContractionViolation("automatic window search failed: " + last_error);
}

FixedPointResult find_fixed_point(const SystemSpec& spec, const BoundBundle& bounds, const ContractionWindow& window,
                                  double tol, int max_iter) {
    check_window(spec, bounds, window);
    const double eps = spec.epsilon;
    const Vector& J0 = spec.i0;
    const Matrix R0 = identity_like(spec.d);
    const Vector K0 = Vector::Zero(static_cast<Eigen::Index>(spec.d));
    auto map = [&](double ell) { return alpha(bounds, J0, R0, K0, eps * ell, eps); };

    const double q = eps * window.M;
    const double l1 = window.ell_star;
    const double l2 = map(l1);
    double l = l2;
    for (int n = 2; n <= max_iter; ++n) {
        const double next = map(l);
        const double residual = std::abs(next - l);
        const double bound = std::pow(q, n - 1) * std::abs(l2 - l1) / (1.0 - q);
        if (residual <= tol && bound <= tol) return {l, n, residual, bound};
        l = next;
    }
    throw NoConvergence("fixed-point iteration did not converge in " + std::to_string(max_iter) + " iterations");
}

ode::Rhs assemble_slow_rhs(const SystemSpec& spec, const AuxiliaryBundle& aux, const BoundBundle& bounds,
                           double fd_step) {
    const PackedLayout layout{spec.d};
    const double eps = spec.epsilon;
    return [layout, eps, aux, bounds, fd_step](double, const Vector& y) {
        const Vector J = layout.J(y);
        const Matrix R = layout.R(y);
        const Vector K = layout.K(y);
        const double m = layout.m(y);
        const double n = layout.n(y);
        const double r = eps * n;
        if (!(n > 0.0)) throw DomainError("estimator n is not positive");
        require_in_tube(bounds, J, r);

        const Matrix Df = aux.dfbar(J);
        const Vector dJ = aux.fbar(J);
        const Matrix dR = Df * R;
        const Vector dK = Df * K + aux.pbar(J);

        const Matrix Rinv = checked_inverse(R);
        const double normR = frobenius_norm(R);
        const double normRinv = frobenius_norm(Rinv);
        const double gam = gamma(bounds, J, r, n);

        const double slope = alpha_dr(bounds, J, R, K, r, eps, fd_step);
        const double denom = 1.0 - eps * slope;
        if (!(denom > 0.0)) throw DomainError("eps * d alpha/d r reached 1");
        const AlphaGradient grad = alpha_gradient(bounds, J, R, K, r, eps, fd_step);
        const double dalpha_dtau = grad.dJ.dot(dJ) + inner(grad.dR, dR) + grad.dK.dot(dK);

        const double dm = normRinv * gam;
        const double dn = (dalpha_dtau + eps * normR * normRinv * gam + eps / normR * inner(R, dR) * m) / denom;
        return layout.pack(dJ, dR, dK, dm, dn);
    };
}

EstimatorTrajectory run_n_operation(const SystemSpec& spec, const AuxiliaryBundle& aux, const BoundBundle& bounds,
                                    double U, const EstimatorOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    validate_system(spec);
    if (!(U > 0.0) || !std::isfinite(U)) throw ConfigError("U must be positive");

    EstimatorTrajectory est;
    est.d = spec.d;
    est.epsilon = spec.epsilon;
    est.U = U;
    if (options.window) {
        est.window = *options.window;
    } else {
        est.window = auto_window(spec, bounds, options.fd_step);
        est.window_auto = true;
    }
    est.fixed_point = find_fixed_point(spec, bounds, est.window, options.fixed_point_tol);
    est.ell0 = est.fixed_point.ell0;

    const PackedLayout layout{spec.d};
    const double eps = spec.epsilon;
    const double fd_step = options.fd_step;

    // Returns the violated condition, if any.
    auto classify = [layout, eps, bounds, fd_step](const Vector& y) -> std::optional<ViolationKind> {
        const double n = layout.n(y);
        if (!(n > 0.0)) return ViolationKind::n_nonpositive;
        const Vector J = layout.J(y);
        if (!(eps * n < bounds.rho_hat(J))) return ViolationKind::n_exceeds_rho_over_eps;
        const double slope = alpha_dr(bounds, J, layout.R(y), layout.K(y), eps * n, eps, fd_step);
        if (!(eps * slope < 1.0)) return ViolationKind::dalpha_dr_exceeds_inv_eps;
        return std::nullopt;
    };

    auto last_kind = std::make_shared<std::optional<ViolationKind>>();
    ode::IntegrateOptions io;
    io.rtol = options.rtol;
    io.atol = options.atol;
    io.max_steps = options.max_steps;
    io.stop = [classify, last_kind](double, const Vector& y) {
        const auto kind = classify(y);
        if (kind) *last_kind = kind;
        return kind.has_value();
    };

    ode::IvpProblem problem;
    problem.dimension = layout.size();
    problem.rhs = assemble_slow_rhs(spec, aux, bounds, fd_step);
    problem.t0 = 0.0;
    problem.t_end = U;
    problem.y0 = layout.pack(spec.i0, identity_like(spec.d), Vector::Zero(static_cast<Eigen::Index>(spec.d)), 0.0,
                             est.ell0);

    est.raw = ode::integrate(problem, io);
    est.failure = est.raw.failure;

    switch (est.raw.status) {
        case ode::Status::completed: est.status = EstimatorStatus::completed; break;
        case ode::Status::stopped_by_predicate:
            est.status = EstimatorStatus::domain_violation;
            est.violation_kind = *last_kind;
            break;
        case ode::Status::step_failure: {
            // The right-hand side refuses states outside the domain, so a
            // boundary approach ends in step underflow; attribute it when the
            // last state sits on the boundary.
            est.status = EstimatorStatus::step_failure;
            const Vector& y = est.raw.states.back();
            const double n = layout.n(y);
            const Vector J = layout.J(y);
            const double slope = alpha_dr(bounds, J, layout.R(y), layout.K(y), eps * n, eps, fd_step);
            constexpr double kNear = 1e-6;
            if (est.raw.failure == ode::Failure::step_underflow) {
                if (n < kNear * est.ell0) {
                    est.status = EstimatorStatus::domain_violation;
                    est.violation_kind = ViolationKind::n_nonpositive;
                } else if (eps * n > (1.0 - kNear) * bounds.rho_hat(J)) {
                    est.status = EstimatorStatus::domain_violation;
                    est.violation_kind = ViolationKind::n_exceeds_rho_over_eps;
                } else if (eps * slope > 1.0 - kNear) {
                    est.status = EstimatorStatus::domain_violation;
                    est.violation_kind = ViolationKind::dalpha_dr_exceeds_inv_eps;
                }
            }
            break;
        }
    }

    const std::size_t count = est.raw.times.size();
    est.tau.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const Vector& y = est.raw.states[i];
        est.tau.push_back(est.raw.times[i]);
        est.J.push_back(layout.J(y));
        est.R.push_back(layout.R(y));
        est.K.push_back(layout.K(y));
        est.m.push_back(layout.m(y));
        est.n.push_back(layout.n(y));
    }
    est.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return est;
}

}  // namespace avgbound
