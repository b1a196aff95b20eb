#pragma once

// CSV tables for trajectories, JSON sidecars, and the key = value run
// configuration format.

#include "avgbound/l_operation.hpp"
#include "avgbound/n_operation.hpp"
#include "avgbound/pipeline.hpp"

#include <json.hpp>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace avgbound::io {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    /// Column index by name; throws std::out_of_range.
    std::size_t column(const std::string& name) const;
};

/// One header line, comma separated, 17 significant digits.
void write_csv(std::ostream& out, const CsvTable& table);
void write_csv(const std::string& path, const CsvTable& table);
/// Throws ConfigError with the line number on a malformed row.
CsvTable read_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// tau, J_1..J_d, R_11..R_dd, K_1..K_d, m, n on the accepted grid.
CsvTable estimator_table(const EstimatorTrajectory& est);
/// Same columns on `points` uniform slow times over [0, end] via dense output.
CsvTable estimator_table_uniform(const EstimatorTrajectory& est, std::size_t points = 2048);
/// t, tau, L_1..L_d, absL, theta_mod_2pi on the accepted fast grid.
CsvTable direct_table(const DirectTrajectory& dir);
/// tau_lo, tau_hi, tau_peak, n, envelope_absL per envelope window.
CsvTable compare_table(const HeadlineResult& headline);

nlohmann::json estimator_sidecar(const EstimatorTrajectory& est);
nlohmann::json direct_sidecar(const DirectTrajectory& dir);

void write_json(const std::string& path, const nlohmann::json& j);

/// Parsed key = value file. '#' starts a comment; blank lines are skipped.
struct ConfigFile {
    std::string path;
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;
};

/// Throws ConfigError ("path:line: message") on syntax errors, duplicate
/// keys or an empty file.
ConfigFile parse_config(std::istream& in, const std::string& path = "<config>");
ConfigFile load_config(const std::string& path);

/// Keys: system, figure, i0, theta0, eps, u, kappa, mu, l1, l2, rtol, atol,
/// budget, window. `figure` excludes system, i0, theta0, eps, u and the
/// system parameters. Throws ConfigError naming the offending key and line.
RunRequest request_from_config(const ConfigFile& config);

/// Comma-separated reals ("4,4"). Throws ConfigError naming `what`.
std::vector<double> parse_list(const std::string& text, const std::string& what);
double parse_real(const std::string& text, const std::string& what);
/// "lstar,sigma,M"
ContractionWindow parse_window(const std::string& text);

}  // namespace avgbound::io
