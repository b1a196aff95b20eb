#include "avgbound/system.hpp"

#include "avgbound/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace avgbound {

void validate_system(const SystemSpec& spec) {
    if (spec.d == 0) throw ConfigError("dimension must be positive");
    if (!(spec.epsilon > 0.0) || !std::isfinite(spec.epsilon)) throw ConfigError("eps must be positive");
    if (!spec.omega || !spec.f || !spec.g || !spec.in_domain) throw ConfigError("system callables missing");
    if (static_cast<std::size_t>(spec.i0.size()) != spec.d)
        throw ConfigError("initial actions have dimension " + std::to_string(spec.i0.size()) + ", expected " +
                          std::to_string(spec.d));
    if (!spec.in_domain(spec.i0)) throw ConfigError("initial actions lie outside the action domain");
    if (spec.omega(spec.i0) == 0.0) throw ConfigError("omega vanishes at the initial actions");

    constexpr double two_pi = 2.0 * std::numbers::pi;
    for (int k = 0; k < 8; ++k) {
        const double th = two_pi * k / 8.0 + 0.1;
        const Vector df = spec.f(spec.i0, th) - spec.f(spec.i0, th + two_pi);
        const double dg = spec.g(spec.i0, th) - spec.g(spec.i0, th + two_pi);
        const double scale = 1.0 + spec.f(spec.i0, th).norm() + std::abs(spec.g(spec.i0, th));
        if (df.norm() > 1e-12 * scale || std::abs(dg) > 1e-12 * scale)
            throw ConfigError("f or g is not 2pi-periodic in the angle");
    }
}

bool in_lambda_dagger(const SystemSpec& spec, const TaylorPair& pair, int samples) {
    if (samples < 2) samples = 2;
    for (int k = 0; k < samples; ++k) {
        const double x = static_cast<double>(k) / (samples - 1);
        if (!spec.in_domain(pair.base + x * pair.increment)) return false;
    }
    return true;
}

void require_in_tube(const BoundBundle& bounds, const Vector& J, double r) {
    const double rho = bounds.rho_hat(J);
    if (!(r >= 0.0) || !(r < rho))
        throw DomainError("radius " + std::to_string(r) + " outside [0, rho) with rho = " + std::to_string(rho));
}

double alpha(const BoundBundle& bounds, const Vector& J, const Matrix& R, const Vector& K, double r,
             double epsilon) {
    require_in_tube(bounds, J, r);
    return bounds.a_hat(J, R, K, r) + epsilon * bounds.b_hat(J, r);
}

double gamma(const BoundBundle& bounds, const Vector& J, double r, double ell) {
    require_in_tube(bounds, J, r);
    return bounds.c_hat(J, r) + bounds.d_hat(J, r) * ell + 0.5 * bounds.e_hat(J, r) * ell * ell;
}

}  // namespace avgbound
