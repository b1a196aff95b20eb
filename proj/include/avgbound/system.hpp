#pragma once

// Domain model for a perturbed one-frequency system
//
//     dI/dt = eps f(I, theta),   dtheta/dt = omega(I) + eps g(I, theta),
//
// its averaged flow dJ/dtau = fbar(J), the auxiliary functions entering the
// exact integral equation for L = (I - J)/eps, and the bound functions that
// dominate them on a tube around J.

#include "avgbound/linalg.hpp"

#include <cstddef>
#include <functional>
#include <optional>

namespace avgbound {

using ScalarField = std::function<double(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using MatrixField = std::function<Matrix(const Vector&)>;
using AngleScalarField = std::function<double(const Vector&, double)>;
using AngleVectorField = std::function<Vector(const Vector&, double)>;
using ActionPredicate = std::function<bool(const Vector&)>;

struct SystemSpec {
    std::size_t d = 1;
    double epsilon = 0.0;
    ScalarField omega;
    AngleVectorField f;
    AngleScalarField g;
    ActionPredicate in_domain;
    Vector i0;
    double theta0 = 0.0;
};

/// Checks the structural invariants: positive eps, dimensions, I0 in Lambda,
/// omega(I0) != 0, and 2pi-periodicity of f and g at I0 on a few angles.
/// Throws ConfigError.
void validate_system(const SystemSpec& spec);

struct AuxiliaryBundle {
    VectorField fbar;
    MatrixField dfbar;
    AngleVectorField s, v, p, q, w, u;
    VectorField pbar;
    MatrixField m_script;
    std::function<Matrix(const Vector&, const Vector&)> g_script;
    std::function<Tensor3(const Vector&, const Vector&)> h_script;
};

/// Partials of a_hat (or b_hat) with respect to J, R and K.
struct BoundGradient {
    Vector dJ;
    Matrix dR;
    Vector dK;
};

/// rho, a..e in the structured form a(tau, r) = a_hat(J(tau), R(tau), K(tau), r),
/// b(tau, r) = b_hat(J(tau), r), ... Optional analytic partials take precedence
/// over finite differences in the slow-time solver.
struct BoundBundle {
    ScalarField rho_hat;
    std::function<double(const Vector& J, const Matrix& R, const Vector& K, double r)> a_hat;
    std::function<double(const Vector& J, double r)> b_hat, c_hat, d_hat, e_hat;

    std::function<double(const Vector&, const Matrix&, const Vector&, double)> a_hat_dr;
    std::function<double(const Vector&, double)> b_hat_dr;
    std::function<BoundGradient(const Vector&, const Matrix&, const Vector&, double)> a_hat_grad;
    std::function<Vector(const Vector&, double)> b_hat_dJ;
};

/// Base point I and increment dI of a Taylor remainder.
struct TaylorPair {
    Vector base;
    Vector increment;
};

/// Whether the segment [I, I + dI] lies in Lambda, sampled at `samples`
/// equispaced points.
bool in_lambda_dagger(const SystemSpec& spec, const TaylorPair& pair, int samples = 17);

/// Throws DomainError unless 0 <= r < rho_hat(J).
void require_in_tube(const BoundBundle& bounds, const Vector& J, double r);

/// alpha = a_hat(J, R, K, r) + eps * b_hat(J, r)
double alpha(const BoundBundle& bounds, const Vector& J, const Matrix& R, const Vector& K, double r,
             double epsilon);

/// gamma = c_hat(J, r) + d_hat(J, r) ell + e_hat(J, r) ell^2 / 2
double gamma(const BoundBundle& bounds, const Vector& J, double r, double ell);

}  // namespace avgbound
