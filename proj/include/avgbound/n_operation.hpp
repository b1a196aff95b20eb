#pragma once

// Slow-time estimator: the contraction fixed point ell0 and the coupled system
// for J, R, K, m, n with monitoring of the domain conditions
//
//     0 < n < rho(J)/eps,    d alpha/d r (., eps n) < 1/eps.

#include "avgbound/linalg.hpp"
#include "avgbound/ode.hpp"
#include "avgbound/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace avgbound {

struct ContractionWindow {
    double ell_star = 0.0;
    double sigma = 0.0;
    double M = 0.0;
};

struct FixedPointResult {
    double ell0 = 0.0;
    int iterations = 0;
    double residual = 0.0;
    /// (eps M)^(N-1) |l2 - l1| / (1 - eps M)
    double a_posteriori = 0.0;
};

/// Packed slow state [J (d), R (d*d, row-major), K (d), m, n].
struct PackedLayout {
    std::size_t d = 1;
    std::size_t size() const { return d + d * d + d + 2; }
    std::size_t r_offset() const { return d; }
    std::size_t k_offset() const { return d + d * d; }
    std::size_t m_index() const { return 2 * d + d * d; }
    std::size_t n_index() const { return 2 * d + d * d + 1; }

    Vector J(const Vector& y) const { return y.segment(0, static_cast<Eigen::Index>(d)); }
    Matrix R(const Vector& y) const;
    Vector K(const Vector& y) const {
        return y.segment(static_cast<Eigen::Index>(k_offset()), static_cast<Eigen::Index>(d));
    }
    double m(const Vector& y) const { return y(static_cast<Eigen::Index>(m_index())); }
    double n(const Vector& y) const { return y(static_cast<Eigen::Index>(n_index())); }
    Vector pack(const Vector& J, const Matrix& R, const Vector& K, double m, double n) const;
};

enum class EstimatorStatus { completed, domain_violation, step_failure };

enum class ViolationKind { n_nonpositive, n_exceeds_rho_over_eps, dalpha_dr_exceeds_inv_eps };

std::string to_string(EstimatorStatus status);
std::string to_string(ViolationKind kind);

struct EstimatorTrajectory {
    std::size_t d = 1;
    double epsilon = 0.0;
    double U = 0.0;
    std::vector<double> tau;
    std::vector<Vector> J;
    std::vector<Matrix> R;
    std::vector<Vector> K;
    std::vector<double> m;
    std::vector<double> n;
    double ell0 = 0.0;
    FixedPointResult fixed_point;
    ContractionWindow window;
    bool window_auto = false;
    EstimatorStatus status = EstimatorStatus::completed;
    std::optional<ViolationKind> violation_kind;
    ode::Failure failure = ode::Failure::none;
    /// Integrator output in packed layout; used for dense output.
    ode::Trajectory raw;
    double wall_time_s = 0.0;

    double end_tau() const { return tau.empty() ? 0.0 : tau.back(); }
    /// Packed state at slow time t via dense output.
    Vector state_at(double t) const;
};

/// d alpha / d r at (J, R, K, r): analytic partials when the bundle supplies
/// both a_hat_dr and b_hat_dr, otherwise a central difference with step
/// fd_step * max(1, r) (second-order one-sided near r = 0).
double alpha_dr(const BoundBundle& bounds, const Vector& J, const Matrix& R, const Vector& K, double r,
                double epsilon, double fd_step = 1e-6);

struct AlphaGradient {
    Vector dJ;
    Matrix dR;
    Vector dK;
};

/// Partials of alpha_hat = a_hat + eps b_hat with respect to J, R, K.
AlphaGradient alpha_gradient(const BoundBundle& bounds, const Vector& J, const Matrix& R, const Vector& K, double r,
                             double epsilon, double fd_step = 1e-6);

/// Throws ContractionViolation if the window fails Sigma in (0, rho(0)/eps),
/// M < 1/eps, the sampled bound |d alpha/d r| <= M over 101 points of Sigma,
/// or the self-map condition.
void check_window(const SystemSpec& spec, const BoundBundle& bounds, const ContractionWindow& window,
                  double fd_step = 1e-6);

/// Proposes ell* = alpha(0, 0), sigma = ell*/2 and M from sampling; shrinks or
/// recenters the window if needed. Throws ContractionViolation if no candidate
/// passes check_window.
ContractionWindow auto_window(const SystemSpec& spec, const BoundBundle& bounds, double fd_step = 1e-6);

/// Iterates l_n = alpha(0, eps l_{n-1}) from l_1 = ell*. Throws
/// ContractionViolation or NoConvergence.
FixedPointResult find_fixed_point(const SystemSpec& spec, const BoundBundle& bounds, const ContractionWindow& window,
                                  double tol = 1e-12, int max_iter = 1000);

/// Right-hand side of the packed slow system. Throws DomainError outside the
/// tube or when eps * d alpha/d r >= 1; SingularMatrixError if R is singular.
ode::Rhs assemble_slow_rhs(const SystemSpec& spec, const AuxiliaryBundle& aux, const BoundBundle& bounds,
                           double fd_step = 1e-6);

struct EstimatorOptions {
    std::optional<ContractionWindow> window;
    double rtol = 1e-9;
    double atol = 1e-12;
    double fd_step = 1e-6;
    double fixed_point_tol = 1e-12;
    std::size_t max_steps = 5'000'000;
};

EstimatorTrajectory run_n_operation(const SystemSpec& spec, const AuxiliaryBundle& aux, const BoundBundle& bounds,
                                    double U, const EstimatorOptions& options = {});

}  // namespace avgbound
