#include "avgbound/pipeline.hpp"

#include "avgbound/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>

namespace avgbound {

using nlohmann::json;

namespace {

struct Registry {
    std::mutex lock;
    std::map<std::string, SystemFactory> factories;

    Registry() {
        for (auto id : {examples::ExampleId::vdp, examples::ExampleId::action_freq, examples::ExampleId::resonant,
                        examples::ExampleId::euler_top})
            factories[examples::to_string(id)] = [id](const examples::ExampleParams& p) {
                return examples::make_example(id, p);
            };
    }
};

Registry& registry() {
    static Registry r;
    return r;
}

bool same_params(const examples::ExampleParams& a, const examples::ExampleParams& b) {
    return a.kappa == b.kappa && a.mu == b.mu && a.lambda1 == b.lambda1 && a.lambda2 == b.lambda2;
}

// Presets of this definition whose parameters match the ones it was built with.
std::vector<examples::FigurePreset> matching_presets(const examples::ExampleDefinition& def) {
    std::vector<examples::FigurePreset> out;
    for (const auto& p : def.presets) {
        const bool relevant = def.id == examples::ExampleId::euler_top   ? same_params(p.params, def.params)
                              : def.id == examples::ExampleId::action_freq ? p.params.kappa == def.params.kappa
                                                                           : true;
        if (relevant) out.push_back(p);
    }
    return out;
}

}  // namespace

void register_system(const std::string& name, SystemFactory factory) {
    if (name.empty() || !factory) throw ConfigError("system registration needs a name and a factory");
    auto& r = registry();
    std::lock_guard<std::mutex> guard(r.lock);
    r.factories[name] = std::move(factory);
}

examples::ExampleDefinition make_system(const std::string& name, const examples::ExampleParams& params) {
    SystemFactory factory;
    {
        auto& r = registry();
        std::lock_guard<std::mutex> guard(r.lock);
        auto it = r.factories.find(name);
        if (it == r.factories.end()) throw ConfigError("unknown system '" + name + "'");
        factory = it->second;
    }
    auto def = factory(params);
    def.params = params;
    return def;
}

std::vector<std::string> registered_systems() {
    auto& r = registry();
    std::lock_guard<std::mutex> guard(r.lock);
    std::vector<std::string> names;
    for (const auto& [name, _] : r.factories) names.push_back(name);
    return names;
}

RunRequest request_from_preset(const examples::FigurePreset& preset) {
    RunRequest r;
    r.system = examples::to_string(preset.example);
    r.params = preset.params;
    r.i0 = preset.i0;
    r.theta0 = preset.theta0;
    r.epsilon = preset.epsilon;
    r.U = preset.U;
    r.figure = preset.figure;
    return r;
}

void validate_request(const RunRequest& r) {
    if (!(r.epsilon > 0) || !std::isfinite(r.epsilon)) throw ConfigError("eps must be positive");
    if (!(r.U > 0) || !std::isfinite(r.U)) throw ConfigError("U must be positive");
    if (!(r.rtol > 0) || !(r.atol > 0)) throw ConfigError("tolerances must be positive");
    if (!(r.budget_s > 0)) throw ConfigError("budget must be positive");
    if (r.i0.size() == 0) throw ConfigError("initial action missing");
    if (!std::isfinite(r.theta0)) throw ConfigError("theta0 must be finite");
}

PreparedSystem prepare(const RunRequest& request) {
    validate_request(request);
    PreparedSystem sys{make_system(request.system, request.params), {}};
    if (static_cast<std::size_t>(request.i0.size()) != sys.definition.d)
        throw ConfigError("i0 has " + std::to_string(request.i0.size()) + " components, system '" + request.system +
                          "' needs " + std::to_string(sys.definition.d));
    sys.spec = sys.definition.make_spec(request.i0, request.theta0, request.epsilon);
    validate_system(sys.spec);
    return sys;
}

EstimatorTrajectory estimate(const PreparedSystem& sys, const RunRequest& request) {
    EstimatorOptions o;
    o.window = request.window;
    o.rtol = request.rtol;
    o.atol = request.atol;
    return run_n_operation(sys.spec, sys.definition.aux, sys.definition.bounds, request.U, o);
}

DirectRun run_direct(const PreparedSystem& sys, const RunRequest& request) {
    const auto& spec = sys.spec;
    const auto& aux = sys.definition.aux;
    ode::IvpProblem slow;
    slow.dimension = spec.d;
    slow.t0 = 0.0;
    slow.t_end = request.U;
    slow.y0 = spec.i0;
    slow.rhs = [&spec, &aux](double, const Vector& J) {
        if (!spec.in_domain(J)) throw DomainError("averaged flow left the action domain");
        return aux.fbar(J);
    };
    ode::IntegrateOptions o;
    o.rtol = request.rtol / 10;
    o.atol = request.atol / 10;

    DirectRun out;
    out.averaged = ode::integrate(slow, o);
    const ode::Trajectory* avg = &out.averaged;
    SlowFlow J = [avg](double tau) {
        const double end = avg->back_time();
        return ode::sample(*avg, std::min(tau, end));
    };
    DirectOptions d;
    d.rtol = request.rtol;
    d.atol = request.atol;
    d.time_budget_s = request.budget_s;
    out.direct = run_l_operation(spec, aux, J, out.averaged.back_time(), d);
    return out;
}

json CompareResult::summary() const {
    json j;
    j["estimator_status"] = to_string(estimator.status);
    j["violation_kind"] = estimator.violation_kind ? json(to_string(*estimator.violation_kind)) : json(nullptr);
    j["estimator_end_tau"] = estimator.end_tau();
    j["ell0"] = estimator.ell0;
    j["direct_status"] = ode::to_string(direct.status);
    j["direct_failure"] = ode::to_string(direct.failure);
    j["direct_end_tau"] = direct.end_tau();
    j["t_n_s"] = t_n;
    j["t_l_s"] = t_l;
    j["timing_ratio"] = timing_ratio();
    j["envelope_window"] = envelope_window;
    if (headline) {
        j["headline"] = headline->report.to_json();
        j["violations"] = headline->report.violations;
        j["tightness_max"] = headline->tightness_max;
        j["tightness_final"] = headline->tightness_final;
    }
    return j;
}

CompareResult compare(const PreparedSystem& sys, const RunRequest& request) {
    RunRequest slow = request;
    slow.rtol = request.rtol / 10;
    slow.atol = request.atol / 10;

    CompareResult out;
    out.estimator = estimate(sys, slow);
    out.t_n = out.estimator.wall_time_s;

    const double span = std::min(request.U, out.estimator.end_tau());
    if (!(span > 0)) return out;
    DirectOptions d;
    d.rtol = request.rtol;
    d.atol = request.atol;
    d.time_budget_s = request.budget_s;
    out.direct = run_l_operation(sys.spec, sys.definition.aux, slow_flow_from(out.estimator), span, d);
    out.t_l = out.direct.wall_time_s;
    out.envelope_window = request.U / 100;
    if (out.direct.t.size() >= 2) out.headline = verify_headline_bound(out.estimator, out.direct, out.envelope_window);
    return out;
}

std::vector<ValidationSuite> verify_system(const std::string& system, const examples::ExampleParams& params,
                                           const VerifyOptions& options) {
    const auto def = make_system(system, params);
    std::vector<ValidationSuite> out;

    IdentityGrid grid = options.grid;
    if (grid.box.lo.size() == 0) grid.box = def.box;

    std::vector<RunRequest> runs;
    for (const auto& p : matching_presets(def)) runs.push_back(request_from_preset(p));
    if (runs.empty()) {
        RunRequest r;
        r.system = system;
        r.params = params;
        r.i0 = Vector::Constant(static_cast<Eigen::Index>(def.d), 1.0);
        if (!def.presets.empty()) r.i0 = def.presets.front().i0;
        r.epsilon = 1e-2;
        r.U = 1.0;
        runs.push_back(r);
    }

    {
        const PreparedSystem sys = prepare(runs.front());
        out.push_back(verify_identities(sys.spec, def.aux, grid));
        out.back().name = "identities";
    }

    for (const auto& r : runs) {
        const std::string tag = r.figure.empty() ? "explicit" : r.figure;
        const PreparedSystem sys = prepare(r);
        const auto est = estimate(sys, r);
        auto dom = verify_bound_domination(sys.spec, def.aux, def.bounds, est, options.domination);
        dom.name = "bound_domination:" + tag;
        out.push_back(std::move(dom));
        if (def.closed_forms) {
            auto cross = analytic_crosscheck(def, r.i0, est, options.analytic_tolerance);
            cross.name = "analytic_crosscheck:" + tag;
            out.push_back(std::move(cross));
        }
    }

    // Integral identity on U = 1 runs at each distinct (I0, eps).
    std::vector<RunRequest> short_runs;
    for (const auto& r : runs) {
        const bool seen = std::any_of(short_runs.begin(), short_runs.end(), [&](const RunRequest& s) {
            return s.epsilon == r.epsilon && s.i0 == r.i0;
        });
        if (seen) continue;
        RunRequest s = r;
        s.U = std::min(1.0, r.U);
        short_runs.push_back(s);
    }
    for (const auto& r : short_runs) {
        const PreparedSystem sys = prepare(r);
        const auto cmp = compare(sys, r);
        ValidationSuite suite;
        suite.name = "integral_identity:" + (r.figure.empty() ? std::string("explicit") : r.figure);
        if (cmp.direct.t.size() < 2) {
            ValidationReport fail;
            fail.check = "integral_identity";
            fail.max_residual = INFINITY;
            fail.tolerance = options.integral_tolerance;
            fail.details["error"] = "direct run produced no grid";
            fail.finalize();
            suite.reports.push_back(fail);
        } else {
            auto res = verify_integral_identity(sys.spec, def.aux, cmp.estimator, cmp.direct,
                                                options.integral_tolerance);
            res.extrapolated.details["U"] = cmp.direct.end_tau();
            suite.reports = {res.extrapolated};
        }
        out.push_back(std::move(suite));
    }
    return out;
}

}  // namespace avgbound
