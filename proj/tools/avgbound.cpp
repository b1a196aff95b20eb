// avgbound: estimator, direct integration, comparison and validation runs on
// the built-in systems or a key = value configuration file.
//
// Exit codes: 0 ok, 1 usage or configuration error, 2 domain violation,
// 3 time budget exceeded, 4 a validation check failed.

#include "avgbound/errors.hpp"
#include "avgbound/io.hpp"
#include "avgbound/pipeline.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

using namespace avgbound;
using nlohmann::json;

enum Exit { ok = 0, config_error = 1, domain_violation = 2, budget_exceeded = 3, check_failed = 4 };

struct Args {
    std::optional<std::string> example, figure, i0, window, out, config;
    std::optional<double> theta0, eps, u, kappa, mu, l1, l2, rtol, atol, budget;
    std::string format = "csv";
};

void add_run_options(CLI::App& cmd, Args& a) {
    auto* ex = cmd.add_option("--example", a.example, "vdp, action-freq, resonant, euler-top");
    auto* fig = cmd.add_option("--figure", a.figure, "figure preset label, 1a ... 4d");
    auto* cfg = cmd.add_option("--config", a.config, "key = value configuration file");
    std::vector<CLI::Option*> explicit_opts{
        ex,
        cmd.add_option("--i0", a.i0, "initial actions, comma separated"),
        cmd.add_option("--theta0", a.theta0, "initial angle"),
        cmd.add_option("--eps", a.eps, "perturbation parameter"),
        cmd.add_option("--u", a.u, "slow-time horizon U"),
        cmd.add_option("--kappa", a.kappa, "action-freq sign"),
        cmd.add_option("--mu", a.mu, "euler-top mu"),
        cmd.add_option("--l1", a.l1, "euler-top lambda1"),
        cmd.add_option("--l2", a.l2, "euler-top lambda2"),
    };
    for (auto* o : explicit_opts) {
        o->excludes(fig);
        o->excludes(cfg);
    }
    fig->excludes(cfg);
    cmd.add_option("--rtol", a.rtol, "relative tolerance (default 1e-9)");
    cmd.add_option("--atol", a.atol, "absolute tolerance (default 1e-12)");
    cmd.add_option("--budget", a.budget, "wall-clock budget of the direct run in seconds (default 240)");
    cmd.add_option("--window", a.window, "contraction window 'lstar,sigma,M'");
    cmd.add_option("--out", a.out, "output file; the JSON sidecar goes next to it");
    cmd.add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

examples::ExampleParams params_from(const Args& a) {
    examples::ExampleParams p;
    if (a.kappa) p.kappa = *a.kappa;
    if (a.mu) p.mu = *a.mu;
    if (a.l1) p.lambda1 = *a.l1;
    if (a.l2) p.lambda2 = *a.l2;
    return p;
}

RunRequest request_from(const Args& a) {
    RunRequest r;
    if (a.config) {
        r = io::request_from_config(io::load_config(*a.config));
    } else if (a.figure) {
        r = request_from_preset(examples::find_preset(*a.figure));
    } else {
        if (!a.example) throw ConfigError("one of --figure, --config or --example is required");
        if (!a.i0 || !a.eps || !a.u) throw ConfigError("--example needs --i0, --eps and --u");
        r.system = *a.example;
        r.params = params_from(a);
        const auto i0 = io::parse_list(*a.i0, "--i0");
        r.i0 = Eigen::Map<const Vector>(i0.data(), static_cast<Eigen::Index>(i0.size()));
        r.theta0 = a.theta0.value_or(0.0);
        r.epsilon = *a.eps;
        r.U = *a.u;
    }
    if (a.rtol) r.rtol = *a.rtol;
    if (a.atol) r.atol = *a.atol;
    if (a.budget) r.budget_s = *a.budget;
    if (a.window) r.window = io::parse_window(*a.window);
    validate_request(r);
    return r;
}

std::string sidecar_path(const std::string& out) {
    std::filesystem::path p(out);
    if (p.extension() == ".json") return out + ".meta.json";
    return p.replace_extension(".json").string();
}

json table_json(const io::CsvTable& t) {
    json cols = json::object();
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        json col = json::array();
        for (const auto& row : t.rows) col.push_back(row[c]);
        cols[t.header[c]] = std::move(col);
    }
    return cols;
}

// Table and metadata: CSV + sidecar, a single JSON document, or stdout.
void emit(const Args& a, const io::CsvTable& table, json meta) {
    if (a.format == "json") {
        meta["data"] = table_json(table);
        if (a.out) io::write_json(*a.out, meta);
        else std::cout << meta.dump(2) << '\n';
        return;
    }
    if (a.out) {
        io::write_csv(*a.out, table);
        io::write_json(sidecar_path(*a.out), meta);
        std::cout << meta.dump(2) << '\n';
    } else {
        io::write_csv(std::cout, table);
        std::cerr << meta.dump(2) << '\n';
    }
}

int exit_for(const EstimatorTrajectory& est) {
    return est.status == EstimatorStatus::completed ? ok : est.status == EstimatorStatus::domain_violation
                                                              ? domain_violation
                                                              : config_error;
}

int cmd_estimate(const Args& a) {
    const auto req = request_from(a);
    const auto sys = prepare(req);
    const auto est = estimate(sys, req);
    auto meta = io::estimator_sidecar(est);
    meta["figure"] = req.figure;
    emit(a, io::estimator_table(est), meta);
    return exit_for(est);
}

int cmd_direct(const Args& a) {
    const auto req = request_from(a);
    const auto sys = prepare(req);
    const auto run = run_direct(sys, req);
    auto meta = io::direct_sidecar(run.direct);
    meta["figure"] = req.figure;
    meta["averaged_end_tau"] = run.averaged.back_time();
    emit(a, io::direct_table(run.direct), meta);
    if (run.direct.budget_exceeded()) return budget_exceeded;
    if (run.averaged.status != ode::Status::completed || run.direct.status != ode::Status::completed)
        return domain_violation;
    return ok;
}

int cmd_compare(const Args& a) {
    const auto req = request_from(a);
    const auto sys = prepare(req);
    const auto cmp = compare(sys, req);
    auto meta = cmp.summary();
    meta["figure"] = req.figure;
    emit(a, cmp.headline ? io::compare_table(*cmp.headline) : io::CsvTable{{"tau_lo", "tau_hi", "tau", "n",
                                                                             "envelope_absL"}, {}},
         meta);
    if (cmp.direct.budget_exceeded()) return budget_exceeded;
    if (cmp.headline && cmp.headline->report.violations > 0) return check_failed;
    if (cmp.estimator.status != EstimatorStatus::completed) return exit_for(cmp.estimator);
    return cmp.direct.status == ode::Status::completed ? ok : domain_violation;
}

int cmd_verify(const Args& a) {
    std::string system;
    examples::ExampleParams params;
    if (a.figure) {
        const auto& p = examples::find_preset(*a.figure);
        system = examples::to_string(p.example);
        params = p.params;
    } else if (a.config) {
        const auto r = io::request_from_config(io::load_config(*a.config));
        system = r.system;
        params = r.params;
    } else {
        if (!a.example) throw ConfigError("verify needs --example, --figure or --config");
        system = *a.example;
        params = params_from(a);
    }
    const auto suites = verify_system(system, params);
    json report;
    report["system"] = system;
    report["suites"] = json::array();
    bool all = true;
    for (const auto& s : suites) {
        report["suites"].push_back(s.to_json());
        all = all && s.pass();
        std::cerr << (s.pass() ? "PASS " : "FAIL ") << s.name << '\n';
    }
    report["pass"] = all;
    if (a.out) io::write_json(*a.out, report);
    else std::cout << report.dump(2) << '\n';
    return all ? ok : check_failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rigorous error bounds for one-frequency averaging"};
    app.require_subcommand(1);
    Args args;
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const Args&);
    };
    const Command commands[] = {
        {"estimate", "slow-time estimator n(tau)", cmd_estimate},
        {"direct", "direct fast-time integration of L(t)", cmd_direct},
        {"compare", "estimator against the envelope of |L|", cmd_compare},
        {"verify", "identity, domination, integral-identity and closed-form checks", cmd_verify},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& c : commands) {
        auto* sub = app.add_subcommand(c.name, c.help);
        add_run_options(*sub, args);
        subs.emplace_back(sub, &c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }

    try {
        for (const auto& [sub, cmd] : subs)
            if (sub->parsed()) return cmd->run(args);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    } catch (const ContractionViolation& e) {
        std::cerr << "error: contraction window: " << e.what() << '\n';
        return config_error;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return domain_violation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return config_error;
    }
    return config_error;
}
