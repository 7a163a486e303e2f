#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace collarkit {

/// count equally spaced values from start to stop inclusive.
struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  int count = 1;

  std::vector<double> values() const;
};

/// Everything a subcommand needs. Defaults are overridden by a JSON config
/// file, which is in turn overridden by command-line flags.
struct RunConfig {
  std::vector<std::string> metrics;
  std::string out_dir;  // empty: write to standard output
  std::string format = "json";
  int lmax = 32;
  int n_samples = 32;
  int t_resolution = 33;
  std::string family = "best";  // best, conformal or linear

  std::optional<double> m;
  std::optional<double> H_o;
  std::optional<double> k;
  std::optional<double> horizon_area;
  std::optional<SweepRange> H_sweep;
  std::optional<SweepRange> m_sweep;

  // closed-form minimizers
  std::optional<double> kappa;
  std::optional<double> b;
  std::optional<double> alpha;
  std::optional<double> W;
  double r_o = 1.0;
  int grid_n = 100000;

  // verify
  std::string golden;
  bool update_golden = false;
  std::vector<std::string> only;
  unsigned seed = 2024;
  double fd_step = 1e-2;
};

/// Throws ParseError on unknown keys, wrong types or invalid values.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& c);

/// Makes metric, golden and output paths absolute against base and checks
/// that every metric file exists.
void resolve_paths(RunConfig& c, const std::filesystem::path& base);

enum ExitCode : int { kExitSuccess = 0, kExitError = 1, kExitInapplicable = 2 };

/// Subcommands: analyze, collar, bounds, appendix, sweep, verify. Reports go to
/// files under out_dir when set, otherwise to out. Errors propagate.
int run_command(const std::string& command, const RunConfig& config, std::ostream& out);

/// Full command line handling; never throws. Inadmissible parameters and
/// unmet hypotheses exit with kExitInapplicable, other failures with kExitError.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace collarkit
