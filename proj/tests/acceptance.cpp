// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "avgbound/examples.hpp"
#include "avgbound/n_operation.hpp"
#include "avgbound/pipeline.hpp"
#include "avgbound/validation.hpp"
#include "oracles.hpp"

#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <sstream>
#include <string>

using namespace avgbound;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::map<std::string, CompareResult>& compare_cache() {
    static std::map<std::string, CompareResult> cache;
    return cache;
}

const CompareResult& compared(const std::string& figure) {
    auto& cache = compare_cache();
    auto it = cache.find(figure);
    if (it == cache.end()) {
        const auto req = request_from_preset(examples::find_preset(figure));
        it = cache.emplace(figure, compare(prepare(req), req)).first;
    }
    return it->second;
}

Outcome headline_bound() {
    std::ostringstream s;
    bool ok = true;
    for (const char* fig : {"1a", "1b", "1c", "2a", "2d", "3a", "3c", "3e", "4a", "4b", "4c", "4d"}) {
        const auto& c = compared(fig);
        const bool full = c.headline && c.direct.status == ode::Status::completed &&
                          c.estimator.status == EstimatorStatus::completed;
        const std::size_t v = c.headline ? c.headline->report.violations : 0;
        ok = ok && full && v == 0;
        s << fig << ":" << (full ? std::to_string(v) : "incomplete") << " ";
    }
    return {ok, "violations " + s.str()};
}

Outcome tightness() {
    std::ostringstream s;
    bool ok = true;
    for (const char* fig : {"1a", "3c"}) {
        const auto& c = compared(fig);
        const double t = c.headline ? c.headline->tightness_final : 0.0;
        ok = ok && t >= 0.5;
        s << fig << " final peak|L|/n = " << fmt(t) << "  ";
    }
    return {ok, s.str()};
}

Outcome analytic() {
    std::ostringstream s;
    bool ok = true;
    double worst = 0;
    for (const char* fig : {"1a", "1b", "1c", "2a", "2d", "3a", "3c", "3e", "4a", "4b", "4c", "4d"}) {
        const auto req = request_from_preset(examples::find_preset(fig));
        const auto sys = prepare(req);
        const auto est = estimate(sys, req);
        const auto suite = analytic_crosscheck(sys.definition, req.i0, est, 1e-8);
        ok = ok && suite.pass();
        for (const auto& r : suite.reports) worst = std::max(worst, r.max_residual);
    }
    auto req = request_from_preset(examples::find_preset("2a"));
    req.U = 0.5;
    const auto sys = prepare(req);
    const auto est = estimate(sys, req);
    const double K = PackedLayout{1}.K(est.state_at(0.5))(0);
    const bool k_ok = std::abs(K - (-1.386294)) < 5e-7;
    ok = ok && k_ok;
    s << "max residual " << fmt(worst) << ", K(0.5) = " << fmt(K);
    return {ok, s.str()};
}

Outcome fixed_point() {
    const auto ex = examples::make_resonant();
    const auto spec = ex.make_spec(Vector::Constant(1, 2.0), 0.0, 1e-2);
    const auto window = auto_window(spec, ex.bounds);
    check_window(spec, ex.bounds, window);
    const auto fp = find_fixed_point(spec, ex.bounds, window);
    const double oracle_value = oracle::resonant_fixed_point(2.0, 1e-2);
    const double err = std::abs(fp.ell0 - oracle_value);
    char buf[160];
    std::snprintf(buf, sizeof buf, "ell0 = %.10f, oracle = %.10f, |diff| = %.2g, window (%.4g, %.4g, %.4g)", fp.ell0,
                  oracle_value, err, window.ell_star, window.sigma, window.M);
    return {err < 1e-9, buf};
}

Outcome identities() {
    bool ok = true;
    double worst = 0;
    bool faults_caught = true;
    for (auto id : {examples::ExampleId::vdp, examples::ExampleId::action_freq, examples::ExampleId::resonant,
                    examples::ExampleId::euler_top}) {
        const auto ex = examples::make_example(id);
        const auto spec = ex.make_spec(ex.presets.front().i0, 0.0, 1e-2);
        IdentityGrid grid;
        grid.box = ex.box;
        grid.tolerance = 1e-8;
        const auto suite = verify_identities(spec, ex.aux, grid);
        ok = ok && suite.pass();
        for (const auto& r : suite.reports) worst = std::max(worst, r.max_residual);

        auto faulty = ex.aux;
        const auto s = faulty.s;
        faulty.s = [s](const Vector& I, double th) { return Vector((s(I, th).array() + 1e-3 * std::sin(th)).matrix()); };
        faults_caught = faults_caught && !verify_identities(spec, faulty, grid).pass();
    }
    return {ok && faults_caught,
            "max residual " + fmt(worst) + ", injected fault " + (faults_caught ? "detected" : "missed")};
}

Outcome domination() {
    std::ostringstream s;
    bool ok = true;
    std::size_t fewest = SIZE_MAX;
    std::size_t total_violations = 0;
    for (const auto& p : examples::all_presets()) {
        const auto req = request_from_preset(p);
        const auto sys = prepare(req);
        const auto est = estimate(sys, req);
        const auto suite = verify_bound_domination(sys.spec, sys.definition.aux, sys.definition.bounds, est);
        ok = ok && suite.pass();
        for (const char* name : {"domination_a", "domination_b", "domination_c"})
            fewest = std::min(fewest, suite.find(name).samples);
        for (const auto& r : suite.reports) total_violations += r.violations;
    }
    ok = ok && fewest >= 10000;
    s << examples::all_presets().size() << " presets, " << total_violations << " violations, fewest samples "
      << fewest;
    return {ok, s.str()};
}

Outcome integral_identity() {
    auto req = request_from_preset(examples::find_preset("3a"));
    req.U = 1.0;
    const auto sys = prepare(req);
    const auto cmp = compare(sys, req);
    const auto res = verify_integral_identity(sys.spec, sys.definition.aux, cmp.estimator, cmp.direct, 1e-4);
    const bool ok = res.coarse.max_residual < 1e-4 && res.refinement_ratio > 3.0 && res.refinement_ratio < 5.0;
    return {ok, "max residual " + fmt(res.coarse.max_residual) + ", halved-step residual " +
                    fmt(res.refined.max_residual) + ", ratio " + fmt(res.refinement_ratio)};
}

Outcome speed() {
    std::ostringstream s;
    bool ok = true;
    for (const char* fig : {"1c", "4d"}) {
        const auto& c = compared(fig);
        ok = ok && c.t_l > 0 && c.timing_ratio() <= 0.2;
        s << fig << " T_N/T_L = " << fmt(c.timing_ratio()) << " (" << fmt(c.t_n) << " s / " << fmt(c.t_l) << " s)  ";
    }
    return {ok, s.str()};
}

Outcome blow_up() {
    auto req = request_from_preset(examples::find_preset("2a"));
    req.U = 0.9;
    const auto short_run = estimate(prepare(req), req);
    req.U = 1.0;
    const auto long_run = estimate(prepare(req), req);
    const bool ok = short_run.status == EstimatorStatus::completed && long_run.status != EstimatorStatus::completed &&
                    long_run.end_tau() < 1.0;
    return {ok, "U = 0.9: " + to_string(short_run.status) + "; U = 1.0: " + to_string(long_run.status) +
                    (long_run.violation_kind ? " (" + to_string(*long_run.violation_kind) + ")" : "") +
                    " at tau = " + fmt(long_run.end_tau())};
}

Outcome resonance_growth() {
    const auto& c = compared("4a");
    const auto& est = c.estimator;
    bool increasing = est.status == EstimatorStatus::completed && std::abs(est.end_tau() - 1.0) < 1e-12;
    for (std::size_t k = 1; k < est.n.size(); ++k) increasing = increasing && est.n[k] > est.n[k - 1];
    const std::size_t v = c.headline ? c.headline->report.violations : 1;
    return {increasing && v == 0 && c.direct.status == ode::Status::completed,
            std::string("n ") + (increasing ? "strictly increasing" : "not increasing") + " from " +
                fmt(est.n.front()) + " to " + fmt(est.n.back()) + ", violations " + std::to_string(v)};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"headline bound on all presets", headline_bound},
        {"tightness of the estimator", tightness},
        {"slow flow matches closed forms", analytic},
        {"fixed point against scalar iteration", fixed_point},
        {"auxiliary identities", identities},
        {"bound domination", domination},
        {"integral identity", integral_identity},
        {"estimator is faster than direct integration", speed},
        {"finite-time blow-up", blow_up},
        {"growth near resonance", resonance_growth},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, fn] : criteria) {
        ++index;
        Outcome out;
        try {
            out = fn();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failed;
        std::printf("%s  %2d %s: %s\n", out.pass ? "PASS" : "FAIL", index, name, out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %d criteria passed\n", index - failed, index);
    return failed == 0 ? 0 : 1;
}
