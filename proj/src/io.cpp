#include "avgbound/io.hpp"

#include "avgbound/errors.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

namespace avgbound::io {

using nlohmann::json;

std::size_t CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return i;
    throw std::out_of_range("no column '" + name + "'");
}

void write_csv(std::ostream& out, const CsvTable& table) {
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    out << std::setprecision(17);
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

void write_csv(const std::string& path, const CsvTable& table) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out.imbue(std::locale::classic());
    write_csv(out, table);
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& value) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    std::istringstream ss(t);
    ss.imbue(std::locale::classic());
    ss >> value;
    if (ss.fail()) {
        // istream rejects inf/nan spellings.
        if (t == "inf" || t == "+inf") value = INFINITY;
        else if (t == "-inf") value = -INFINITY;
        else if (t == "nan" || t == "-nan") value = NAN;
        else return false;
        return true;
    }
    return ss.eof() || (ss >> std::ws).eof();
}

}  // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: missing header");
    for (auto& h : split(trim(line), ',')) table.header.push_back(trim(h));
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(trim(line), ',');
        if (fields.size() != table.header.size())
            throw ConfigError("csv:" + std::to_string(lineno) + ": expected " + std::to_string(table.header.size()) +
                              " fields, got " + std::to_string(fields.size()));
        std::vector<double> row(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i)
            if (!parse_double(fields[i], row[i]))
                throw ConfigError("csv:" + std::to_string(lineno) + ": bad number '" + fields[i] + "'");
        table.rows.push_back(std::move(row));
    }
    return table;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    return read_csv(in);
}

namespace {

std::vector<std::string> estimator_header(std::size_t d) {
    std::vector<std::string> h{"tau"};
    for (std::size_t i = 1; i <= d; ++i) h.push_back("J_" + std::to_string(i));
    for (std::size_t i = 1; i <= d; ++i)
        for (std::size_t j = 1; j <= d; ++j) h.push_back("R_" + std::to_string(i) + std::to_string(j));
    for (std::size_t i = 1; i <= d; ++i) h.push_back("K_" + std::to_string(i));
    h.push_back("m");
    h.push_back("n");
    return h;
}

std::vector<double> estimator_row(double tau, const Vector& J, const Matrix& R, const Vector& K, double m, double n) {
    std::vector<double> row{tau};
    for (Eigen::Index i = 0; i < J.size(); ++i) row.push_back(J(i));
    for (Eigen::Index i = 0; i < R.rows(); ++i)
        for (Eigen::Index j = 0; j < R.cols(); ++j) row.push_back(R(i, j));
    for (Eigen::Index i = 0; i < K.size(); ++i) row.push_back(K(i));
    row.push_back(m);
    row.push_back(n);
    return row;
}

}  // namespace

CsvTable estimator_table(const EstimatorTrajectory& est) {
    CsvTable t{estimator_header(est.d), {}};
    for (std::size_t k = 0; k < est.tau.size(); ++k)
        t.rows.push_back(estimator_row(est.tau[k], est.J[k], est.R[k], est.K[k], est.m[k], est.n[k]));
    return t;
}

CsvTable estimator_table_uniform(const EstimatorTrajectory& est, std::size_t points) {
    if (points < 2) throw std::invalid_argument("need at least two points");
    CsvTable t{estimator_header(est.d), {}};
    if (est.tau.empty()) return t;
    const PackedLayout layout{est.d};
    const double end = est.end_tau();
    for (std::size_t k = 0; k < points; ++k) {
        const double tau = k + 1 == points ? end : end * static_cast<double>(k) / static_cast<double>(points - 1);
        const Vector y = est.state_at(tau);
        t.rows.push_back(estimator_row(tau, layout.J(y), layout.R(y), layout.K(y), layout.m(y), layout.n(y)));
    }
    return t;
}

CsvTable direct_table(const DirectTrajectory& dir) {
    CsvTable t;
    t.header = {"t", "tau"};
    for (std::size_t i = 1; i <= dir.d; ++i) t.header.push_back("L_" + std::to_string(i));
    t.header.push_back("absL");
    t.header.push_back("theta_mod_2pi");
    constexpr double two_pi = 2 * std::numbers::pi;
    for (std::size_t k = 0; k < dir.t.size(); ++k) {
        std::vector<double> row{dir.t[k], dir.epsilon * dir.t[k]};
        for (Eigen::Index i = 0; i < dir.L[k].size(); ++i) row.push_back(dir.L[k](i));
        row.push_back(dir.L[k].norm());
        double th = std::fmod(dir.theta[k], two_pi);
        if (th < 0) th += two_pi;
        row.push_back(th);
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable compare_table(const HeadlineResult& headline) {
    CsvTable t;
    t.header = {"tau_lo", "tau_hi", "tau", "n", "envelope_absL"};
    for (std::size_t k = 0; k < headline.envelope.size(); ++k) {
        const auto& e = headline.envelope[k];
        t.rows.push_back({e.tau_lo, e.tau_hi, e.tau_peak, headline.envelope_n[k], e.peak});
    }
    return t;
}

json estimator_sidecar(const EstimatorTrajectory& est) {
    json j;
    j["ell0"] = est.ell0;
    j["status"] = to_string(est.status);
    j["violation_kind"] = est.violation_kind ? json(to_string(*est.violation_kind)) : json(nullptr);
    j["wall_time_s"] = est.wall_time_s;
    j["end_tau"] = est.end_tau();
    j["U"] = est.U;
    j["epsilon"] = est.epsilon;
    j["window"] = {{"ell_star", est.window.ell_star}, {"sigma", est.window.sigma}, {"M", est.window.M},
                   {"auto", est.window_auto}};
    j["fixed_point"] = {{"iterations", est.fixed_point.iterations},
                        {"residual", est.fixed_point.residual},
                        {"a_posteriori", est.fixed_point.a_posteriori}};
    j["integrator_failure"] = ode::to_string(est.failure);
    return j;
}

json direct_sidecar(const DirectTrajectory& dir) {
    json j;
    j["status"] = dir.budget_exceeded() ? std::string("budget_exceeded") : ode::to_string(dir.status);
    j["failure"] = ode::to_string(dir.failure);
    j["wall_time_s"] = dir.wall_time_s;
    j["end_tau"] = dir.end_tau();
    j["epsilon"] = dir.epsilon;
    j["points"] = dir.t.size();
    return j;
}

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

ConfigFile parse_config(std::istream& in, const std::string& path) {
    ConfigFile cfg;
    cfg.path = path;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = path + ":" + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(where + "missing key");
        if (value.empty()) throw ConfigError(where + "missing value for '" + key + "'");
        if (cfg.values.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
        cfg.values[key] = value;
        cfg.lines[key] = lineno;
    }
    if (cfg.values.empty()) throw ConfigError(path + ": empty configuration");
    return cfg;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    return parse_config(in, path);
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& field : split(text, ',')) {
        double v = 0;
        if (!parse_double(field, v) || !std::isfinite(v))
            throw ConfigError(what + ": bad number '" + trim(field) + "'");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError(what + ": empty list");
    return out;
}

double parse_real(const std::string& text, const std::string& what) {
    const auto v = parse_list(text, what);
    if (v.size() != 1) throw ConfigError(what + ": expected a single number");
    return v.front();
}

ContractionWindow parse_window(const std::string& text) {
    const auto v = parse_list(text, "window");
    if (v.size() != 3) throw ConfigError("window: expected 'lstar,sigma,M'");
    return {v[0], v[1], v[2]};
}

RunRequest request_from_config(const ConfigFile& config) {
    static const std::set<std::string> known{"system", "figure", "i0",  "theta0", "eps",    "u",     "kappa",
                                             "mu",     "l1",     "l2",  "rtol",   "atol",   "budget", "window"};
    static const std::set<std::string> explicit_keys{"system", "i0", "theta0", "eps", "u", "kappa", "mu", "l1", "l2"};
    auto where = [&](const std::string& key) {
        return config.path + ":" + std::to_string(config.lines.at(key)) + ": ";
    };
    for (const auto& [key, _] : config.values)
        if (!known.count(key)) throw ConfigError(where(key) + "unknown key '" + key + "'");

    auto real = [&](const std::string& key) {
        try {
            return parse_real(config.values.at(key), key);
        } catch (const ConfigError& e) {
            throw ConfigError(where(key) + e.what());
        }
    };

    RunRequest r;
    if (config.values.count("figure")) {
        for (const auto& key : explicit_keys)
            if (config.values.count(key))
                throw ConfigError(where(key) + "'" + key + "' cannot be combined with 'figure'");
        try {
            r = request_from_preset(examples::find_preset(config.values.at("figure")));
        } catch (const ConfigError& e) {
            throw ConfigError(where("figure") + e.what());
        }
    } else {
        for (const char* key : {"system", "i0", "eps", "u"})
            if (!config.values.count(key)) throw ConfigError(config.path + ": missing key '" + key + "'");
        r.system = config.values.at("system");
        try {
            (void)make_system(r.system, r.params);
        } catch (const ConfigError& e) {
            // Parameter errors surface after all keys are read; only the name matters here.
            if (std::string(e.what()).rfind("unknown system", 0) == 0) throw ConfigError(where("system") + e.what());
        }
        try {
            const auto i0 = parse_list(config.values.at("i0"), "i0");
            r.i0 = Eigen::Map<const Vector>(i0.data(), static_cast<Eigen::Index>(i0.size()));
        } catch (const ConfigError& e) {
            throw ConfigError(where("i0") + e.what());
        }
        if (config.values.count("theta0")) r.theta0 = real("theta0");
        r.epsilon = real("eps");
        if (!(r.epsilon > 0)) throw ConfigError(where("eps") + "eps must be positive");
        r.U = real("u");
        if (!(r.U > 0)) throw ConfigError(where("u") + "U must be positive");
        if (config.values.count("kappa")) r.params.kappa = real("kappa");
        if (config.values.count("mu")) r.params.mu = real("mu");
        if (config.values.count("l1")) r.params.lambda1 = real("l1");
        if (config.values.count("l2")) r.params.lambda2 = real("l2");
    }
    if (config.values.count("rtol")) r.rtol = real("rtol");
    if (config.values.count("atol")) r.atol = real("atol");
    if (config.values.count("budget")) r.budget_s = real("budget");
    if (config.values.count("window")) {
        try {
            r.window = parse_window(config.values.at("window"));
        } catch (const ConfigError& e) {
            throw ConfigError(where("window") + e.what());
        }
    }
    validate_request(r);
    return r;
}

}  // namespace avgbound::io
