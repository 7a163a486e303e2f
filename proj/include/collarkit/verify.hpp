#pragma once

#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <vector>

namespace collarkit {

/// How pass is decided from computed, reference and tolerance.
enum class Predicate {
  Absolute,  // |computed - reference| <= tolerance
  Relative,  // |computed - reference| <= tolerance |reference|
  AtMost,    // computed <= reference + tolerance
  AtLeast,   // computed >= reference - tolerance
};

struct OracleResult {
  std::string name;
  double computed = 0.0;
  double reference = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double tolerance = 0.0;
  Predicate predicate = Predicate::Absolute;
  bool pass = false;
  /// Informational remark, e.g. a golden value recorded for the first time.
  std::string note;
};

OracleResult make_result(std::string name, double computed, double reference, double tolerance, Predicate p);

struct VerifyConfig {
  int lmax = 32;
  int n_samples = 32;
  double fd_step = 1e-2;
  unsigned seed = 2024;
  /// Golden store; empty disables golden comparisons.
  std::string golden_path;
  /// Overwrite stored golden values with the current run.
  bool update_golden = false;
  /// Run only oracles whose name starts with one of these prefixes.
  std::vector<std::string> only;
};

/// Names of all oracles in suite order.
std::vector<std::string> oracle_names();

/// Runs every oracle (in parallel) and returns their results in suite order.
/// A golden value absent from the store passes with a note and is persisted.
/// A stored value whose metadata (lmax, n_samples, step, tolerance) differs
/// from this run fails, so tolerance or resolution changes cannot go unnoticed.
std::vector<OracleResult> run_suite(const VerifyConfig& config);

nlohmann::json to_json(const OracleResult& r);
/// One JSON object per line.
void write_jsonl(std::ostream& os, const std::vector<OracleResult>& results);
bool all_pass(const std::vector<OracleResult>& results);

}  // namespace collarkit
