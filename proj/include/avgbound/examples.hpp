#pragma once

// The four reference systems (van der Pol, action-dependent frequency,
// resonant, damped Euler top) with their auxiliary and bound bundles, closed
// forms for the averaged flow and the figure presets.

#include "avgbound/system.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace avgbound::examples {

enum class ExampleId { vdp, action_freq, resonant, euler_top };

std::string to_string(ExampleId id);
/// Accepts "vdp", "action-freq", "resonant", "euler-top". Throws ConfigError.
ExampleId parse_example_id(const std::string& name);

struct ExampleParams {
    double kappa = 1.0;
    double mu = 1.0;
    double lambda1 = 2.0;
    double lambda2 = -1.0;
};

struct ClosedForms {
    std::function<Vector(double tau)> J;
    std::function<Matrix(double tau)> R;
    std::function<Vector(double tau)> K;
};

struct FigurePreset {
    std::string figure;
    ExampleId example = ExampleId::vdp;
    Vector i0;
    double theta0 = 0.0;
    double epsilon = 0.0;
    double U = 0.0;
    ExampleParams params;
    /// Zoomed tau range shown in the figure, if any.
    std::optional<std::pair<double, double>> view;
};

/// Box of actions used for identity sampling.
struct SamplingBox {
    Vector lo;
    Vector hi;
};

struct ExampleDefinition {
    ExampleId id = ExampleId::vdp;
    ExampleParams params;
    std::size_t d = 1;
    std::function<SystemSpec(const Vector& i0, double theta0, double epsilon)> make_spec;
    AuxiliaryBundle aux;
    BoundBundle bounds;
    std::function<ClosedForms(const Vector& i0)> closed_forms;
    std::vector<FigurePreset> presets;
    SamplingBox box;
};

ExampleDefinition make_vdp();
/// Throws ConfigError unless kappa is +1 or -1.
ExampleDefinition make_action_freq(double kappa);
ExampleDefinition make_resonant();
/// Throws ConfigError unless lambda1 > 0, -lambda1 < mu < lambda1, lambda2 > -lambda1.
ExampleDefinition make_euler_top(double mu, double lambda1, double lambda2);

ExampleDefinition make_example(ExampleId id, const ExampleParams& params = {});

const std::vector<FigurePreset>& all_presets();
/// Preset by figure label ("1a" ... "4d"). Throws ConfigError.
const FigurePreset& find_preset(const std::string& figure);

/// Physical coordinates: vdp -> (x, v); euler-top -> (p, q, r) with unit
/// inertia prefactor. Throws ConfigError for other examples.
Vector angle_to_physical(ExampleId id, const Vector& I, double theta);

}  // namespace avgbound::examples
