#pragma once

// End-to-end runs on registered systems: estimator, direct integration,
// estimator-vs-direct comparison and the full validation suite.

#include "avgbound/examples.hpp"
#include "avgbound/l_operation.hpp"
#include "avgbound/n_operation.hpp"
#include "avgbound/validation.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace avgbound {

using SystemFactory = std::function<examples::ExampleDefinition(const examples::ExampleParams&)>;

/// Registers a system under `name`; the four built-in examples are always
/// present. Re-registering a name replaces the factory.
void register_system(const std::string& name, SystemFactory factory);
/// Throws ConfigError for unknown names.
examples::ExampleDefinition make_system(const std::string& name, const examples::ExampleParams& params);
std::vector<std::string> registered_systems();

struct RunRequest {
    std::string system = "vdp";
    examples::ExampleParams params;
    Vector i0;
    double theta0 = 0.0;
    double epsilon = 0.0;
    double U = 0.0;
    double rtol = 1e-9;
    double atol = 1e-12;
    std::optional<ContractionWindow> window;
    double budget_s = 240.0;
    /// Preset label, empty for explicit runs.
    std::string figure;
};

RunRequest request_from_preset(const examples::FigurePreset& preset);

/// Throws ConfigError on non-positive eps, U, tolerances or budget, or an
/// initial action of the wrong dimension.
void validate_request(const RunRequest& request);

struct PreparedSystem {
    examples::ExampleDefinition definition;
    SystemSpec spec;
};

PreparedSystem prepare(const RunRequest& request);

/// Estimator at the requested tolerances.
EstimatorTrajectory estimate(const PreparedSystem& sys, const RunRequest& request);

struct DirectRun {
    /// Averaged flow dJ/dtau = fbar(J) alone, at tolerances tightened 10x.
    ode::Trajectory averaged;
    DirectTrajectory direct;
};

/// Direct run against the averaged flow; the span is cut short if J leaves Lambda.
DirectRun run_direct(const PreparedSystem& sys, const RunRequest& request);

struct CompareResult {
    EstimatorTrajectory estimator;
    DirectTrajectory direct;
    /// Absent if the direct run stopped before producing a usable grid.
    std::optional<HeadlineResult> headline;
    double envelope_window = 0.0;
    double t_n = 0.0;
    double t_l = 0.0;

    double timing_ratio() const { return t_l > 0 ? t_n / t_l : 0.0; }
    nlohmann::json summary() const;
};

/// Estimator with tolerances tightened 10x (its wall time is T_N), then the
/// direct run on [0, min(U, end of estimator)) against its dense output.
/// Envelope windows are U/100 wide.
CompareResult compare(const PreparedSystem& sys, const RunRequest& request);

struct VerifyOptions {
    IdentityGrid grid;
    DominationOptions domination;
    /// Tolerance on the extrapolated integral-identity residual of the U = 1 runs.
    double integral_tolerance = 1e-4;
    double analytic_tolerance = 1e-8;
};

/// Identities, domination along every preset trajectory of the system (or a
/// single explicit run if it has none), the integral identity on a U = 1 run
/// and the closed-form crosscheck on every preset grid.
std::vector<ValidationSuite> verify_system(const std::string& system, const examples::ExampleParams& params,
                                           const VerifyOptions& options = {});

}  // namespace avgbound
