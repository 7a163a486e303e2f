#pragma once

#include <limits>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "collarkit/sphere_ops.hpp"

namespace collarkit {

enum class PathFamily { Conformal, Linear };

std::string family_name(PathFamily family);
PathFamily parse_family(const std::string& name);

/// One point of an area-normalized path: h = a^-1 h_tilde.
struct PathState {
  double t = 0.0;
  ConformalMetric h;
  SymTensorField hprime;
  double a = 1.0;
  double aprime = 0.0;
};

/// Path of metrics from g (t = 0) to a round metric (t = 1) with constant area.
///
/// Conformal: h_tilde = c^2 exp(2(1-t)v) g_round.
/// Linear: h_tilde = c^2 [g_round + (1-t)(exp(2v) - 1) g_round], i.e. the
/// straight line from g to the round metric of the same scale, stored through
/// its band-limited conformal factor.
class MetricPath {
 public:
  MetricPath(ConformalMetric g, PathFamily family, int n_samples = 32);

  PathFamily family() const { return family_; }
  const ConformalMetric& base() const { return g_; }
  int n_samples() const { return n_samples_; }
  double base_area() const { return area_; }

  /// Throws NotRepresentable when the linear family leaves the band limit.
  PathState at(double t) const;

  /// Chebyshev nodes on (0, 1) plus both endpoints, ascending.
  std::vector<double> sample_times() const;

 private:
  ConformalMetric g_;
  PathFamily family_;
  int n_samples_;
  double area_;
};

inline constexpr double kRepresentationTolerance = 1e-6;

/// Builds the path and checks K > 0 at every sampled (t, node).
MetricPath make_path(const ConformalMetric& g, PathFamily family, int n_samples = 32);

struct CorrectedDerivative {
  SymTensorField H;
  ScalarField u;
  double residual = 0.0;
};

/// H = h' + 2 Hess_h u with Lap_h u = -tr_h(h')/2, so that tr_h H = 0.
CorrectedDerivative trace_free_correct(const ConformalMetric& h, const SymTensorField& hprime);

struct PathInvariants {
  std::string family;
  int n_samples = 0;
  double alpha = 0.0;
  double beta = 1.0;
  double r_o = 1.0;
  double eta_lb = std::numeric_limits<double>::infinity();
  double kappa_lb = 1.0;
  double area_drift = 0.0;
  double max_trace_residual = 0.0;
  double t_alpha = 0.0;  // where the extrema were attained
  double t_beta = 0.0;
};

struct InvariantOptions {
  /// Golden-section refinement of the t-extremum between neighbouring samples.
  bool refine = true;
  double refine_tolerance = 1e-7;
};

/// alpha = max 1/4 |H|_h^2, beta = |g|/(4 pi) min K(h) over sampled (t, node).
PathInvariants compute_invariants(const MetricPath& path, const InvariantOptions& options = {});

/// Invariant pair for every implemented family; families that cannot be built
/// for g are skipped. Throws the last failure when none succeeds.
std::vector<PathInvariants> invariants_per_family(const ConformalMetric& g, int n_samples = 32,
                                                  const InvariantOptions& options = {});

/// Element-wise best over families: max eta_lb and max kappa_lb. The (alpha,
/// beta) pair is the one of the family with the largest kappa_lb. These are
/// lower bounds for the supremum over all paths.
PathInvariants eta_kappa_best(const ConformalMetric& g, int n_samples = 32, const InvariantOptions& options = {});
PathInvariants best_of(const std::vector<PathInvariants>& per_family);

nlohmann::json to_json(const PathInvariants& inv);
PathInvariants path_invariants_from_json(const nlohmann::json& j);

}  // namespace collarkit
