#include "collarkit/path.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "collarkit/errors.hpp"
#include "collarkit/format.hpp"
#include "collarkit/parallel.hpp"

namespace collarkit {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;

struct SliceSummary {
  double t = 0.0;
  double min_k = 0.0;
  double max_quarter_h2 = 0.0;
  double residual = 0.0;
  double area_drift = 0.0;
};

void require_positive(const ScalarField& k, double t) {
  const std::size_t node = k.argmin();
  if (!(k[node] > 0.0) || !k.all_finite()) throw CurvaturePositivityLost(t, node, k[node]);
}

SliceSummary summarize(const MetricPath& path, double t) {
  const PathState s = path.at(t);
  const ScalarField k = gauss_curvature(s.h);
  require_positive(k, t);
  const CorrectedDerivative c = trace_free_correct(s.h, s.hprime);
  SliceSummary out;
  out.t = t;
  out.min_k = k.min();
  out.max_quarter_h2 = 0.25 * tensor_trace_and_norm(s.h, c.H).normsq.max();
  out.residual = c.residual;
  out.area_drift = std::abs(total_area(s.h) - path.base_area()) / path.base_area();
  return out;
}

// Golden-section search for the maximum of f on [lo, hi].
template <class F>
std::pair<double, double> golden_max(F f, double lo, double hi, double tol) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 >= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = f(x2);
    }
  }
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

std::string family_name(PathFamily family) { return family == PathFamily::Conformal ? "conformal" : "linear"; }

PathFamily parse_family(const std::string& name) {
  if (name == "conformal") return PathFamily::Conformal;
  if (name == "linear") return PathFamily::Linear;
  throw ParseError("unknown path family '" + name + "' (expected conformal or linear)");
}

MetricPath::MetricPath(ConformalMetric g, PathFamily family, int n_samples)
    : g_(std::move(g)), family_(family), n_samples_(n_samples), area_(total_area(g_)) {
  if (n_samples_ < 1) throw DomainError("n_samples must be positive");
}

std::vector<double> MetricPath::sample_times() const {
  std::vector<double> ts{0.0};
  for (int j = n_samples_ - 1; j >= 0; --j) {
    ts.push_back(0.5 * (1.0 + std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * n_samples_))));
  }
  ts.push_back(1.0);
  return ts;
}

PathState MetricPath::at(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("path parameter outside [0, 1]");
  const GridPtr& grid = g_.grid_ptr();
  const double c2 = g_.scale;

  ScalarField vt, vdot;
  if (family_ == PathFamily::Conformal) {
    vt = (1.0 - t) * g_.v;
    vdot = -1.0 * g_.v;
  } else {
    // exp(2 vt) = 1 + (1-t)(exp(2v) - 1), a convex combination of positives
    if (t == 0.0) {
      vt = g_.v;
    } else {
      const ScalarField exact =
          g_.v.map([t](double v) { return 0.5 * std::log1p((1.0 - t) * std::expm1(2.0 * v)); });
      vt = exact.band_limited();
      const double residual = (exact - vt).max_abs();
      if (residual > kRepresentationTolerance) throw NotRepresentable(t, residual);
    }
    vdot = g_.v.map([t](double v) {
      const double e = std::expm1(2.0 * v);
      return -0.5 * e / (1.0 + (1.0 - t) * e);
    });
    vdot = vdot.band_limited();
  }

  // a(t) = |h_tilde| / |g|. For the conformal family a' is the t-derivative of
  // the quadrature; for the linear family it is -(1/2|g|) int tr(tau) dsigma
  // with tr_{h_tilde} tau = -4 vdot, which is the same expression.
  const ConformalMetric tilde{vt, c2};
  const double a = total_area(tilde) / area_;
  const double aprime = 2.0 * integrate(tilde, vdot) / area_;

  PathState s;
  s.t = t;
  s.a = a;
  s.aprime = aprime;
  s.h = ConformalMetric{vt, c2 / a};  // a(0) = 1 exactly, so h(0) = g
  ScalarField factor = 2.0 * vdot + (-aprime / a);
  const SymTensorField m = metric_tensor(s.h);
  s.hprime = SymTensorField(factor * m.tt, ScalarField(grid, 0.0), factor * m.pp);
  return s;
}

MetricPath make_path(const ConformalMetric& g, PathFamily family, int n_samples) {
  MetricPath path(g, family, n_samples);
  require_positive(gauss_curvature(g), 0.0);
  const std::vector<double> ts = path.sample_times();
  parallel_for(ts.size(), [&](std::size_t i) { require_positive(gauss_curvature(path.at(ts[i]).h), ts[i]); });
  return path;
}

CorrectedDerivative trace_free_correct(const ConformalMetric& h, const SymTensorField& hprime) {
  const TraceAndNorm tn = tensor_trace_and_norm(h, hprime);
  const ScalarField u = laplace_solve(h, -0.5 * tn.trace, 1e-9);
  CorrectedDerivative out{hprime + 2.0 * hessian(h, u), u, 0.0};
  out.residual = tensor_trace_and_norm(h, out.H).trace.max_abs();
  return out;
}

PathInvariants compute_invariants(const MetricPath& path, const InvariantOptions& options) {
  const std::vector<double> ts = path.sample_times();
  std::vector<SliceSummary> slices(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { slices[i] = summarize(path, ts[i]); });

  std::size_t imax = 0, imin = 0;
  PathInvariants inv;
  for (std::size_t i = 0; i < slices.size(); ++i) {
    if (slices[i].max_quarter_h2 > slices[imax].max_quarter_h2) imax = i;
    if (slices[i].min_k < slices[imin].min_k) imin = i;
    inv.area_drift = std::max(inv.area_drift, slices[i].area_drift);
    inv.max_trace_residual = std::max(inv.max_trace_residual, slices[i].residual);
  }
  double alpha = slices[imax].max_quarter_h2, t_alpha = ts[imax];
  double min_k = slices[imin].min_k, t_beta = ts[imin];

  if (options.refine) {
    const std::size_t last = ts.size() - 1;
    auto absorb = [&](const SliceSummary& s) {
      inv.area_drift = std::max(inv.area_drift, s.area_drift);
      inv.max_trace_residual = std::max(inv.max_trace_residual, s.residual);
      return s;
    };
    if (alpha > 0.0 && imax > 0 && imax < last) {
      const auto [t, v] = golden_max([&](double t) { return absorb(summarize(path, t)).max_quarter_h2; },
                                     ts[imax - 1], ts[imax + 1], options.refine_tolerance);
      if (v > alpha) alpha = v, t_alpha = t;
    }
    if (imin > 0 && imin < last) {
      const auto [t, v] = golden_max([&](double t) { return -absorb(summarize(path, t)).min_k; }, ts[imin - 1],
                                     ts[imin + 1], options.refine_tolerance);
      if (-v < min_k) min_k = -v, t_beta = t;
    }
  }

  inv.family = family_name(path.family());
  inv.n_samples = path.n_samples();
  inv.alpha = alpha;
  inv.beta = path.base_area() / kFourPi * min_k;
  inv.r_o = std::sqrt(path.base_area() / kFourPi);
  inv.eta_lb = alpha > 0.0 ? inv.beta / alpha : std::numeric_limits<double>::infinity();
  inv.kappa_lb = inv.beta / (1.0 + alpha);
  inv.t_alpha = t_alpha;
  inv.t_beta = t_beta;
  return inv;
}

std::vector<PathInvariants> invariants_per_family(const ConformalMetric& g, int n_samples,
                                                  const InvariantOptions& options) {
  std::vector<PathInvariants> out;
  std::exception_ptr last_failure;
  for (PathFamily family : {PathFamily::Conformal, PathFamily::Linear}) {
    try {
      out.push_back(compute_invariants(make_path(g, family, n_samples), options));
    } catch (const NotRepresentable&) {
      last_failure = std::current_exception();
    } catch (const CurvaturePositivityLost&) {
      last_failure = std::current_exception();
    }
  }
  if (out.empty()) std::rethrow_exception(last_failure);
  return out;
}

PathInvariants best_of(const std::vector<PathInvariants>& per_family) {
  if (per_family.empty()) throw DomainError("no path invariants to combine");
  PathInvariants best = per_family.front();
  double eta = best.eta_lb;
  for (const auto& p : per_family) {
    eta = std::max(eta, p.eta_lb);
    if (p.kappa_lb > best.kappa_lb) best = p;
  }
  best.eta_lb = eta;
  best.family = "best";
  return best;
}

PathInvariants eta_kappa_best(const ConformalMetric& g, int n_samples, const InvariantOptions& options) {
  return best_of(invariants_per_family(g, n_samples, options));
}

nlohmann::json to_json(const PathInvariants& inv) {
  nlohmann::json j;
  j["family"] = inv.family;
  j["n_samples"] = inv.n_samples;
  j["alpha"] = json_number(inv.alpha);
  j["beta"] = json_number(inv.beta);
  j["eta_lb"] = json_number(inv.eta_lb);
  j["kappa_lb"] = json_number(inv.kappa_lb);
  j["r_o"] = json_number(inv.r_o);
  j["area_drift"] = json_number(inv.area_drift);
  j["max_trace_residual"] = json_number(inv.max_trace_residual);
  return j;
}

PathInvariants path_invariants_from_json(const nlohmann::json& j) {
  PathInvariants inv;
  inv.family = j.at("family").get<std::string>();
  inv.n_samples = j.at("n_samples").get<int>();
  inv.alpha = number_from_json(j.at("alpha"));
  inv.beta = number_from_json(j.at("beta"));
  inv.eta_lb = number_from_json(j.at("eta_lb"));
  inv.kappa_lb = number_from_json(j.at("kappa_lb"));
  inv.r_o = number_from_json(j.at("r_o"));
  inv.area_drift = number_from_json(j.at("area_drift"));
  inv.max_trace_residual = number_from_json(j.at("max_trace_residual"));
  return inv;
}

}  // namespace collarkit
