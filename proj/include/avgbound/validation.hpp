#pragma once

// Numerical cross-checks: auxiliary identities, domination of the auxiliary
// terms by the bound functions, the exact integral identity for L along
// computed trajectories, the headline bound |L| <= n and closed-form J, R, K.

#include "avgbound/examples.hpp"
#include "avgbound/l_operation.hpp"
#include "avgbound/n_operation.hpp"
#include "avgbound/system.hpp"

#include <json.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace avgbound {

struct ValidationReport {
    std::string check;
    std::size_t samples = 0;
    double max_residual = 0.0;
    std::size_t violations = 0;
    double tolerance = 0.0;
    /// Counting checks pass on zero violations; residual checks on max_residual <= tolerance.
    bool counts_violations = false;
    bool pass = false;
    nlohmann::json details = nlohmann::json::object();

    void finalize();
    nlohmann::json to_json() const;
};

struct ValidationSuite {
    std::string name;
    std::vector<ValidationReport> reports;

    bool pass() const;
    /// Throws std::out_of_range if no report carries this name.
    const ValidationReport& find(const std::string& check) const;
    nlohmann::json to_json() const;
};

struct IdentityGrid {
    examples::SamplingBox box;
    /// Actions per axis (d = 1) or per axis of the d = 2 lattice.
    int actions_per_axis = 12;
    int angles = 12;
    /// Residual tolerance for each identity.
    double tolerance = 1e-8;
};

/// Residuals of every auxiliary-bundle identity, scaled by max(1, size of the
/// terms involved). Derivatives are fourth-order central differences with
/// step 1e-6 * max(1, |argument|); averages use a 256-point trapezoid rule.
/// Throws DomainError if a grid point lies outside Lambda.
ValidationSuite verify_identities(const SystemSpec& spec, const AuxiliaryBundle& aux, const IdentityGrid& grid);

struct DominationOptions {
    std::size_t min_samples = 10000;
    int radii = 8;
    int angles = 32;
    /// Radii are sampled as fractions of rho in [0, max_radius_fraction].
    double max_radius_fraction = 0.99;
};

/// Sampled check of (fa)-(fe) along the estimator trajectory plus a
/// monotonicity check of c, d, e in r. A violation is lhs > bound (1 + 1e-10) + 1e-14.
ValidationSuite verify_bound_domination(const SystemSpec& spec, const AuxiliaryBundle& aux, const BoundBundle& bounds,
                                        const EstimatorTrajectory& est, const DominationOptions& options = {});

struct IntegralIdentityResult {
    /// Residual with trapezoid quadrature on the accepted fast grid.
    ValidationReport coarse;
    /// Same residual after inserting the dense-output midpoint of every step.
    ValidationReport refined;
    /// Richardson combination (4 refined - coarse) / 3 at every grid point;
    /// removes the leading quadrature error and leaves the identity defect.
    ValidationReport extrapolated;
    /// coarse.max_residual / refined.max_residual
    double refinement_ratio = 0.0;
};

/// Residual of the exact integral identity for L at every accepted fast grid point.
IntegralIdentityResult verify_integral_identity(const SystemSpec& spec, const AuxiliaryBundle& aux,
                                                const EstimatorTrajectory& est, const DirectTrajectory& dir,
                                                double tolerance = 1e-4);

struct HeadlineResult {
    ValidationReport report;
    std::vector<EnvelopePoint> envelope;
    std::vector<double> envelope_n;
    /// max over windows of peak |L| / n at the peak
    double tightness_max = 0.0;
    /// peak |L| / n in the last window
    double tightness_final = 0.0;
};

/// Violations of |L(t)| <= n(eps t) over the fast grid, counted beyond 1e-12 n.
HeadlineResult verify_headline_bound(const EstimatorTrajectory& est, const DirectTrajectory& dir,
                                     double envelope_window);

/// Max over the estimator grid of |numeric - analytic| / max(1, |analytic|)
/// for J, R and K.
ValidationSuite analytic_crosscheck(const examples::ExampleDefinition& ex, const Vector& i0,
                                    const EstimatorTrajectory& est, double tolerance = 1e-8);

}  // namespace avgbound
