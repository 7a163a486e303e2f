#pragma once

#include <array>
#include <functional>
#include <nlohmann/json.hpp>
#include <optional>
#include <ostream>
#include <vector>

#include "collarkit/path.hpp"
#include "collarkit/profile.hpp"

namespace collarkit {

/// Collar metric gamma = A^2 dt^2 + r_o^-2 u_m(Akt)^2 g(t) on [0,1] x S^2, with
/// g(t) the trace-free reparametrization of the path.
struct CollarSpec {
  MetricPath path;
  PathInvariants inv;
  double m = 0.0;
  double k = 0.0;
  double H_o = 0.0;  // H(0); derived from k when the collar is built from k
  double A = 0.0;
  double A_o = 0.0;
  double r_o = 1.0;
  SchwarzschildProfile profile;
};

struct CollarSample {
  double t = 0.0;
  double E = 1.0;
  double H_t = 0.0;
  double hawking = 0.0;
  /// Hawking mass from its increment form, (u - r_o)(1 - k^2)/2 + hawking(0).
  double hawking_increment_form = 0.0;
  double R_min = 0.0;
};

/// k = H_o r_o (1 - 2m/r_o)^(-1/2) / 2.
double k_of(double m, double H_o, double r_o);
/// Inverse of k_of: H(0) = 2k r_o^-1 (1 - 2m/r_o)^(1/2).
double mean_curvature_at_start(double m, double k, double r_o);

/// Smallest admissible A. Zero for a constant path (alpha = 0), where only
/// beta >= k^2 is needed. Throws Inadmissible when the sign-dependent
/// inequality on (m, k, alpha, beta) fails.
double A_o_of(double m, double k, const PathInvariants& inv);

/// A = max(A_override, A_o), or A_o without override. When A_o is zero and no
/// override is given, A = r_o.
CollarSpec build_collar(const MetricPath& path, const PathInvariants& inv, double m, double H_o,
                        std::optional<double> A_override = {});
CollarSpec build_collar(const MetricPath& path, double m, double H_o, std::optional<double> A_override = {});
/// Same with k given directly; needed at m = r_o/2, where H_o = 0 for every k.
CollarSpec build_collar_with_k(const MetricPath& path, const PathInvariants& inv, double m, double k,
                               std::optional<double> A_override = {});

/// u_m(Akt).
double collar_radius(const CollarSpec& spec, double t);

CollarSample slice_quantities(const CollarSpec& spec, double t);

/// R(gamma) = 2u^-2 [r_o^2 K(g) - k^2 - u^2 A^-2 |g'|_g^2 / 8] node-wise on the
/// t-slice, with K and |g'|^2 read off h(t) and its corrected derivative.
ScalarField scalar_curvature(const CollarSpec& spec, double t);

/// Slices at t = i/(n_t - 1), evaluated in parallel.
std::vector<CollarSample> collar_table(const CollarSpec& spec, int n_t);

using Point3 = std::array<double, 3>;
using Metric3 = std::array<std::array<double, 3>, 3>;

/// Scalar curvature of a 3-metric given in coordinates, by centered
/// differences of step h for the metric and then for its Christoffel symbols.
double fd_scalar_curvature(const std::function<Metric3(const Point3&)>& metric, const Point3& x, double h);

/// R(gamma) at (t, node) from the coordinate expression of gamma in slice
/// coordinates where g(t) = h(t). With X = grad_h u this reads
/// (A^2 + E|du|^2) dt^2 - 2E du dt + E h. The angular chart is rotated to put
/// the node on its equator. Throws StencilOutOfRange when the t stencil leaves
/// (0, 1).
double fd_curvature_oracle(const CollarSpec& spec, double t, std::size_t node, double step);

nlohmann::json collar_header(const CollarSpec& spec);
void write_collar_csv(std::ostream& os, const std::vector<CollarSample>& rows);
nlohmann::json to_json(const CollarSample& s);

}  // namespace collarkit
