#pragma once

#include <functional>
#include <limits>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "collarkit/path.hpp"

namespace collarkit {

/// Boundary sphere data for a CMC surface with induced metric g.
struct SurfaceData {
  ConformalMetric g;
  double H_o = 0.0;
  double area = 4.0 * 3.14159265358979323846;
  double r_o = 1.0;
  double W = 0.0;    // H_o^2 area / 16 pi = H_o^2 r_o^2 / 4
  double m_H = 0.5;  // Hawking mass r_o (1 - W) / 2
};

/// Throws DomainError for H_o < 0. H_o = 0 is accepted as the W -> 0 limit.
SurfaceData surface_data(const ConformalMetric& g, double H_o);
/// Round sphere of area radius r_o.
SurfaceData surface_data(double r_o, double H_o);

enum class Theorem { T11, T12, T14, T44, T31family, T32family, A31prime, A32prime };

std::string theorem_tag(Theorem t);

struct BoundReport {
  Theorem theorem = Theorem::T11;
  bool applicable = false;
  std::string reason;
  /// Upper bound for sqrt(|horizon| / 16 pi); for T12 the certificate that
  /// must be nonnegative. NaN when not applicable.
  double rhs = std::numeric_limits<double>::quiet_NaN();
  double H_o = 0.0;
  double W = 0.0;
  double r_o = 0.0;
  double m_H = 0.0;
  std::optional<double> m, k, x, alpha, beta, eta, kappa, b;
  /// T32family: the same bound with alpha/(1+alpha) replaced by 1.
  std::optional<double> weakened_rhs;
  /// Closed-form minimizers: case tag of the analysis.
  std::string case_tag;
  /// sqrt(area / 16 pi) of a supplied horizon area, and whether it obeys the
  /// bound. For T12, holds means certificate >= 0.
  std::optional<double> horizon_radius;
  std::optional<bool> holds;
};

BoundReport thm11_rhs(const SurfaceData& sd, double eta);
BoundReport thm12_check(const SurfaceData& sd, double eta);
/// DomainError unless 0 < beta_g <= 1 and alpha_g >= 0.
BoundReport thm14_rhs(const SurfaceData& sd, double alpha_g, double beta_g);
/// DomainError unless 0 < kappa <= 1.
BoundReport thm44_rhs(const SurfaceData& sd, double kappa);

/// Bound for one m < 0; m = -inf gives the k -> 0 limit. Throws Inadmissible
/// when beta - W alpha - W (1 - 2m/r_o)^-1 <= 0 and DomainError for m >= 0.
BoundReport thm31_family(const SurfaceData& sd, const PathInvariants& inv, double m);
/// Bound for one m in [0, r_o/2). Throws Inadmissible when
/// W >= beta (1 - 2m/r_o) / (1 + alpha) and DomainError for m outside the range.
BoundReport thm32_family(const SurfaceData& sd, const PathInvariants& inv, double m);

/// Phi(x) = r_o/2 (alpha/(1+alpha))^(1/2) (x/(kappa-x))^(1/2) (1-x). The
/// endpoints return the limits 0 and +inf; DomainError outside [0, kappa].
double phi(double x, double kappa, double alpha, double r_o);
/// Psi(x) = r_o/2 (alpha W)^(1/2) (b-x)^(-1/2) (1-x). x = b returns +inf;
/// DomainError outside [0, b] or for b <= 0.
double psi(double x, double b, double alpha, double W, double r_o);

/// Where an infimum over an open interval sits when it is not attained.
enum class LimitSide { Attained, FromAbove, FromBelow };

struct MinimizerResult {
  double x_star = 0.0;
  double value = 0.0;
  std::string case_tag;
  LimitSide limit = LimitSide::Attained;
  /// Roots of 2x^2 - 3 kappa x + kappa when real (Phi only).
  std::optional<double> x1, x2;
  /// Both candidates of Phi case c, as (x, value).
  std::vector<std::pair<double, double>> candidates;
  /// Interval searched: [W, kappa) for Phi, (0, b) or (0, W) for Psi.
  double lo = 0.0, hi = 0.0;
};

/// min over W <= x < kappa of Phi. HypothesisFailed if W >= kappa.
MinimizerResult minimize_phi(double kappa, double alpha, double r_o, double W);
/// inf over the admissible x-interval of Psi, b = beta - alpha W.
MinimizerResult minimize_psi(double b, double alpha, double W, double r_o);

struct GridMinimum {
  double x = 0.0;  // after polishing
  double value = 0.0;
  double grid_x = 0.0;  // best raw sample
  double grid_value = 0.0;
};

/// Minimum of f over n equally spaced interior points lo + i (hi-lo)/(n+1),
/// then a golden-section polish inside the neighbouring cells of the best
/// sample. The raw grid misses an endpoint infimum by slope * spacing; the
/// polish removes that without knowing where the minimum is expected.
GridMinimum grid_search_min(const std::function<double(double)>& f, double lo, double hi, int n);

/// Closed-form minimizations as reports. Inapplicable when b <= 0 resp. W >= kappa.
BoundReport appendix31(const SurfaceData& sd, const PathInvariants& inv);
BoundReport appendix32(const SurfaceData& sd, const PathInvariants& inv);

/// T11, T12, T14, T44, T31family (m -> -inf), T32family (m = 0), A31prime,
/// A32prime, with eta, kappa, alpha, beta taken from inv.
std::vector<BoundReport> evaluate_all(const SurfaceData& sd, const PathInvariants& inv);

/// evaluate_all for each H_o in turn, in parallel; rows keep input order.
std::vector<BoundReport> sweep_mean_curvature(const ConformalMetric& g, const PathInvariants& inv,
                                              const std::vector<double>& H_values);
/// One family row per m: T31family for m < 0, T32family otherwise.
/// Inadmissible m give inapplicable rows.
std::vector<BoundReport> sweep_mass(const SurfaceData& sd, const PathInvariants& inv, const std::vector<double>& m_values);

/// Fills horizon_radius and holds on every applicable report.
void compare_horizon(std::vector<BoundReport>& reports, double horizon_area);

nlohmann::json to_json(const BoundReport& r);
nlohmann::json to_json(const MinimizerResult& r);
nlohmann::json reports_to_json(const std::vector<BoundReport>& reports);
/// Columns theorem,applicable,H_o,W,alpha,beta,eta,kappa,m,k,rhs,horizon_radius,holds;
/// absent values are empty cells.
void write_bounds_csv(std::ostream& os, const std::vector<BoundReport>& reports);

}  // namespace collarkit
