#include "collarkit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>

#include "collarkit/bounds.hpp"
#include "collarkit/collar.hpp"
#include "collarkit/errors.hpp"
#include "collarkit/format.hpp"
#include "collarkit/parallel.hpp"
#include "collarkit/path.hpp"
#include "collarkit/reference.hpp"

namespace collarkit {

namespace {

namespace ref = reference;

constexpr double kGoldenTolerance = 1e-9;

// Shared state of one suite run: grid and golden store.
class Context {
 public:
  explicit Context(const VerifyConfig& config) : config_(config), grid_(make_grid(config.lmax)) {
    if (config.golden_path.empty()) return;
    std::ifstream in(config.golden_path);
    if (!in) return;
    try {
      store_ = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError("golden store " + config.golden_path + ": " + e.what());
    }
  }

  const VerifyConfig& config() const { return config_; }
  const GridPtr& grid() const { return grid_; }

  ScalarField field(double (*f)(double, double), double amplitude) const {
    return amplitude * ScalarField::from_function(grid_, f);
  }

  OracleResult golden(const std::string& name, double computed) {
    const nlohmann::json meta = metadata();
    std::lock_guard lock(mutex_);
    nlohmann::json& entries = store_["entries"];
    if (config_.update_golden || !entries.contains(name)) {
      nlohmann::json entry = meta;
      entry["value"] = json_number(computed);
      entries[name] = entry;
      dirty_ = true;
      OracleResult r = make_result(name, computed, computed, kGoldenTolerance, Predicate::Relative);
      r.note = config_.golden_path.empty() ? "no golden store configured" : "golden value recorded";
      return r;
    }
    const nlohmann::json& entry = entries.at(name);
    OracleResult r =
        make_result(name, computed, number_from_json(entry.at("value")), kGoldenTolerance, Predicate::Relative);
    for (const char* key : {"lmax", "n_samples", "step", "tolerance"}) {
      if (!entry.contains(key) || number_from_json(entry.at(key)) != number_from_json(meta.at(key))) {
        r.pass = false;
        r.note = std::string("golden metadata mismatch: ") + key;
      }
    }
    return r;
  }

  void persist() {
    if (!dirty_ || config_.golden_path.empty()) return;
    std::ofstream out(config_.golden_path);
    if (!out) throw Error("cannot write golden store " + config_.golden_path);
    out << store_.dump(2) << '\n';
  }

 private:
  nlohmann::json metadata() const {
    return {{"lmax", config_.lmax},
            {"n_samples", config_.n_samples},
            {"step", json_number(config_.fd_step)},
            {"tolerance", json_number(kGoldenTolerance)}};
  }

  const VerifyConfig& config_;
  GridPtr grid_;
  nlohmann::json store_ = nlohmann::json::object();
  bool dirty_ = false;
  std::mutex mutex_;
};

using Results = std::vector<OracleResult>;

struct Oracle {
  const char* name;
  std::function<Results(Context&)> run;
};

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

PathInvariants params(double alpha, double beta) {
  PathInvariants inv;
  inv.alpha = alpha;
  inv.beta = beta;
  inv.kappa_lb = beta / (1 + alpha);
  return inv;
}

std::string sub(const char* base, const char* aspect) { return std::string(base) + ":" + aspect; }

// Area of exp(2 * 0.05 Y20) g_round against product Simpson quadrature of the
// closed form at several times the grid resolution.
Results area_dense_quadrature(Context& c) {
  const ConformalMetric g{c.field(ref::y20, 0.05), 1.0};
  const int n_theta = 8 * (c.config().lmax + 1) * 32;
  const double dense = ref::sphere_integral(
      [](double th, double ph) { return std::exp(0.1 * ref::y20(th, ph)); }, n_theta, 16);
  return {make_result("sphere.area_dense_quadrature", total_area(g), dense, 1e-12, Predicate::Relative)};
}

// K = 1 + 4 eps Y20 + O(eps^2) for v = eps Y20.
Results curvature_linearization(Context& c) {
  const double eps = 1e-4;
  const ScalarField y = c.field(ref::y20, 1.0);
  const ScalarField lin = ScalarField(c.grid(), 1.0) + (4 * eps) * y;
  const double err = (gauss_curvature({eps * y, 1.0}) - lin).max_abs();
  return {make_result("sphere.curvature_linearization", err, 0.0, 1e-6, Predicate::AtMost)};
}

Results laplace_residual(Context& c) {
  const ConformalMetric m{c.field(ref::y21, 0.1), 1.0};
  ScalarField f = ScalarField::from_spectrum(c.grid(), ref::random_spectrum(c.config().lmax, 8, c.config().seed));
  f += -integrate(m, f) / total_area(m);
  const ScalarField u = laplace_solve(m, f);
  return {make_result("sphere.laplace_residual", (laplacian(m, u) - f).max_abs(), 0.0, 1e-9, Predicate::AtMost)};
}

// Hessian of Y20 for exp(2 * 0.05 Y22) g_round against centered differences of
// the closed forms; second order under step halving.
Results hessian_fd(Context& c) {
  const GridPtr& g = c.grid();
  const ConformalMetric m{c.field(ref::y22, 0.05), 1.0};
  const SymTensorField hs = hessian(m, c.field(ref::y20, 1.0));
  const ref::Metric2 gm = [](double th, double ph) {
    const double e = std::exp(0.1 * ref::y22(th, ph));
    return std::array<double, 3>{e, 0.0, e * std::sin(th) * std::sin(th)};
  };
  const double h = c.config().fd_step;
  double err1 = 0.0, err2 = 0.0;
  for (int i = 2; i < g->nlat() - 2; i += 3) {
    for (int j = 0; j < g->nlon(); j += 5) {
      const std::size_t k = g->index(i, j);
      const auto a = ref::fd_hessian(gm, ref::y20, g->theta(i), g->phi(j), h);
      const auto b = ref::fd_hessian(gm, ref::y20, g->theta(i), g->phi(j), 0.5 * h);
      const double s[3] = {hs.tt[k], hs.tp[k], hs.pp[k]};
      for (int q = 0; q < 3; ++q) {
        err1 = std::max(err1, std::abs(a[q] - s[q]));
        err2 = std::max(err2, std::abs(b[q] - s[q]));
      }
    }
  }
  return {make_result(sub("sphere.hessian_fd", "error"), err1, 0.0, 10 * h * h, Predicate::AtMost),
          make_result(sub("sphere.hessian_fd", "halving_ratio"), err1 / err2, 4.0, 0.4, Predicate::Absolute)};
}

// |T|^2 on the round metric against g^ac g^bd T_ab T_cd in coordinates.
Results tensor_normsq(Context& c) {
  const GridPtr& g = c.grid();
  const unsigned s = c.config().seed;
  const int L = c.config().lmax;
  const SymTensorField t(ScalarField::from_spectrum(g, ref::random_spectrum(L, 6, s + 1)),
                         ScalarField::from_spectrum(g, ref::random_spectrum(L, 6, s + 2)),
                         ScalarField::from_spectrum(g, ref::random_spectrum(L, 6, s + 3)));
  const ScalarField n = tensor_trace_and_norm(ConformalMetric::round(g), t).normsq;
  double worst = 0.0;
  for (std::size_t k = 0; k < g->size(); ++k) {
    const double st = g->sin_theta(g->lat_of(k));
    const double brute = ref::brute_normsq({1.0, 0.0, st * st}, {t.tt[k], t.tp[k], t.pp[k]});
    worst = std::max(worst, std::abs(n[k] - brute) / std::max(1.0, std::abs(brute)));
  }
  return {make_result("sphere.tensor_normsq", worst, 0.0, 1e-12, Predicate::AtMost)};
}

Results path_area_conservation(Context& c) {
  const ConformalMetric g{c.field(ref::y20, 0.05), 1.0};
  const MetricPath path = make_path(g, PathFamily::Conformal, c.config().n_samples);
  double worst = 0.0;
  for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
    worst = std::max(worst, std::abs(total_area(path.at(t).h) / path.base_area() - 1.0));
  return {make_result("path.area_conservation", worst, 0.0, 1e-9, Predicate::AtMost)};
}

// A pure-trace derivative psi h with zero mean is removed completely.
Results path_trace_cancellation(Context& c) {
  const ConformalMetric h{c.field(ref::y21, 0.1), 1.5};
  ScalarField psi = ScalarField::from_spectrum(c.grid(), ref::random_spectrum(c.config().lmax, 6, c.config().seed));
  psi += -integrate(h, psi) / total_area(h);
  const SymTensorField mt = metric_tensor(h);
  const CorrectedDerivative cd = trace_free_correct(h, SymTensorField(psi * mt.tt, psi * mt.tp, psi * mt.pp));
  const double tr = tensor_trace_and_norm(h, cd.H).trace.max_abs();
  return {make_result("path.trace_cancellation", tr, 0.0, 1e-8, Predicate::AtMost)};
}

// alpha is quadratic and 1 - beta linear in the perturbation size.
Results path_scaling_exponents(Context& c) {
  const std::vector<double> eps{0.01, 0.02, 0.04, 0.08};
  std::vector<double> alpha(eps.size()), defect(eps.size());
  parallel_for(eps.size(), [&](std::size_t i) {
    const PathInvariants inv =
        compute_invariants(make_path({c.field(ref::y20, eps[i]), 1.0}, PathFamily::Conformal, c.config().n_samples));
    alpha[i] = inv.alpha;
    defect[i] = 1.0 - inv.beta;
  });
  return {make_result(sub("path.scaling_exponents", "alpha_slope"), loglog_slope(eps, alpha), 2.0, 0.1,
                      Predicate::Absolute),
          make_result(sub("path.scaling_exponents", "beta_defect_slope"), loglog_slope(eps, defect), 1.0, 0.15,
                      Predicate::Absolute)};
}

Results path_eta_golden(Context& c) {
  const ConformalMetric g{c.field(ref::y22, 0.05), 1.0};
  const PathInvariants best = eta_kappa_best(g, c.config().n_samples);
  Results out{make_result(sub("path.eta_lb_golden", "finite_positive"), std::isfinite(best.eta_lb) ? best.eta_lb : -1.0,
                          0.0, 0.0, Predicate::AtLeast)};
  out.push_back(c.golden("path.eta_lb_golden", best.eta_lb));
  return out;
}

// Step halving for m = -1 against the closed-form distance.
Results profile_richardson(Context&) {
  const double exact = ref::schwarzschild_radius(-1.0, 1.0, 2.0);
  const double e1 = std::abs(integrate_profile(-1.0, 1.0, 2.0, 0.2).u(2.0) - exact);
  const double e2 = std::abs(integrate_profile(-1.0, 1.0, 2.0, 0.1).u(2.0) - exact);
  const double fine = integrate_profile(-1.0, 1.0, 2.0).u(2.0);
  return {make_result(sub("profile.richardson", "halving_ratio"), e1 / e2, 16.0, 2.4, Predicate::Absolute),
          make_result(sub("profile.richardson", "u_at_2"), fine, exact, 1e-10, Predicate::Absolute),
          make_result(sub("profile.richardson", "growth_bound"), fine, 1.0 + 2.0 * std::sqrt(3.0), 0.0,
                      Predicate::AtMost)};
}

Results collar_A_o(Context&) {
  const double oracle = std::sqrt(0.01 / (0.95 - 1.01 * 0.25));
  return {make_result("collar.A_o_arithmetic", A_o_of(0.0, 0.5, params(0.01, 0.95)), oracle, 1e-14,
                      Predicate::Relative)};
}

// Hawking mass of the boundary slice equals the surface Hawking mass.
Results collar_hawking(Context& c) {
  const ConformalMetric g{c.field(ref::y20, 0.05), 1.0};
  const MetricPath path = make_path(g, PathFamily::Conformal, c.config().n_samples);
  const PathInvariants inv = compute_invariants(path);
  const double m = -0.5, W = 0.3 * inv.beta / (inv.alpha + 1.0 / (1.0 - 2.0 * m / inv.r_o));
  const double H_o = 2.0 * std::sqrt(W) / inv.r_o;
  const CollarSpec spec = build_collar(path, inv, m, H_o);
  return {make_result("collar.hawking_consistency", slice_quantities(spec, 0.0).hawking, surface_data(g, H_o).m_H,
                      1e-12, Predicate::Absolute)};
}

CollarSpec generic_collar(Context& c) {
  const ConformalMetric m{c.field(ref::y22, 0.05) + c.field(ref::y21, 0.03), 1.0};
  const MetricPath path = make_path(m, PathFamily::Conformal, c.config().n_samples);
  return build_collar(path, compute_invariants(path), -0.5, 0.5, 1.5);
}

Results collar_fd_convergence(Context& c) {
  const CollarSpec spec = generic_collar(c);
  const std::size_t node = c.grid()->index(c.grid()->nlat() * 3 / 8, c.grid()->nlon() / 3);
  const double h = c.config().fd_step, exact = scalar_curvature(spec, 0.4)[node];
  const double e1 = std::abs(fd_curvature_oracle(spec, 0.4, node, h) - exact);
  const double e2 = std::abs(fd_curvature_oracle(spec, 0.4, node, 0.5 * h) - exact);
  return {make_result("collar.fd_convergence", e1 / e2, 4.0, 0.6, Predicate::Absolute)};
}

Results collar_fd_equivalence(Context& c) {
  const CollarSpec spec = generic_collar(c);
  const GridPtr& g = c.grid();
  std::mt19937 rng(c.config().seed);
  std::uniform_real_distribution<double> ut(0.05, 0.95);
  std::uniform_int_distribution<int> ui(0, g->nlat() - 1), uj(0, g->nlon() - 1);
  double worst = 0.0;
  for (int n = 0; n < 20; ++n) {
    const double t = ut(rng);
    const std::size_t k = g->index(ui(rng), uj(rng));
    const double exact = scalar_curvature(spec, t)[k];
    worst = std::max(worst, std::abs(fd_curvature_oracle(spec, t, k, c.config().fd_step) - exact) / std::abs(exact));
  }
  return {make_result("collar.fd_equivalence", worst, 0.0, 1e-3, Predicate::AtMost)};
}

Results collar_schwarzschild(Context& c) {
  const MetricPath path = make_path(ConformalMetric::round(c.grid()), PathFamily::Conformal, c.config().n_samples);
  const CollarSpec spec = build_collar_with_k(path, compute_invariants(path), 0.3, 1.0);
  double worst = 0.0;
  for (int i = 0; i <= 16; ++i) worst = std::max(worst, scalar_curvature(spec, i / 16.0).max_abs());
  return {make_result("collar.schwarzschild_flatness", worst, 0.0, 1e-8, Predicate::AtMost)};
}

Results bounds_psi_identity(Context&) {
  const double W = 0.3, alpha = 0.05, beta = 0.9, m = -1.0;
  const SurfaceData sd = surface_data(1.0, 2.0 * std::sqrt(W));
  const BoundReport r = thm31_family(sd, params(alpha, beta), m);
  return {make_result("bounds.psi_identity", r.rhs - sd.m_H, psi(W / (1 - 2 * m), beta - alpha * W, alpha, W, 1.0),
                      1e-13, Predicate::Relative)};
}

Results bounds_phi_m_sweep(Context&) {
  const double kappa = 0.95, W = 0.3, alpha = 0.05;
  const SurfaceData sd = surface_data(1.0, 2.0 * std::sqrt(W));
  const PathInvariants inv = params(alpha, kappa * (1 + alpha));
  const double m_sup = 0.5 * (1 - W / kappa);
  const int n = 20000;
  std::vector<double> ms(n);
  for (int i = 0; i < n; ++i) ms[i] = m_sup * i / n;
  double best = std::numeric_limits<double>::infinity();
  for (const BoundReport& r : sweep_mass(sd, inv, ms))
    if (r.applicable) best = std::min(best, r.rhs - sd.m_H);
  return {make_result("bounds.phi_m_sweep", best, minimize_phi(kappa, alpha, 1.0, W).value, 1e-6,
                      Predicate::Absolute)};
}

Results grid_vs_closed(const char* name, const MinimizerResult& r, const std::function<double(double)>& f) {
  const int n = 100000;
  const GridMinimum g = grid_search_min(f, r.lo, r.hi, n);
  return {make_result(sub(name, "x"), g.grid_x, r.x_star, 2 * (r.hi - r.lo) / n, Predicate::Absolute),
          make_result(sub(name, "value"), g.value, r.value, 1e-6, Predicate::Absolute)};
}

Results bounds_phi_case_c(Context&) {
  const double kappa = 0.95, alpha = 0.1, W = 0.1;
  return grid_vs_closed("bounds.phi_grid_case_c", minimize_phi(kappa, alpha, 1.0, W),
                        [&](double x) { return phi(x, kappa, alpha, 1.0); });
}

Results bounds_grid_phi(Context&) {
  const double kappa = 0.95, alpha = 0.1, W = 0.6;
  return grid_vs_closed("bounds.grid_phi", minimize_phi(kappa, alpha, 1.0, W),
                        [&](double x) { return phi(x, kappa, alpha, 1.0); });
}

Results bounds_grid_psi(Context&) {
  const double b = 0.7, alpha = 0.1, W = 0.8;
  return grid_vs_closed("bounds.grid_psi", minimize_psi(b, alpha, W, 1.0),
                        [&](double x) { return psi(x, b, alpha, W, 1.0); });
}

// The analyze pipeline on exp(2 * 0.05 Y20) g_round, pinned as golden values.
Results pipeline_analyze(Context& c) {
  const PathInvariants best = eta_kappa_best({c.field(ref::y20, 0.05), 1.0}, c.config().n_samples);
  return {c.golden("pipeline.analyze:alpha", best.alpha), c.golden("pipeline.analyze:beta", best.beta),
          c.golden("pipeline.analyze:kappa_lb", best.kappa_lb)};
}

Results pipeline_collar(Context& c) {
  const ConformalMetric g{c.field(ref::y20, 0.05), 1.0};
  const MetricPath path = make_path(g, PathFamily::Conformal, c.config().n_samples);
  const PathInvariants inv = compute_invariants(path);
  const double W = 0.8 * inv.beta / (1 + inv.alpha);
  const CollarSpec spec = build_collar(path, inv, 0.0, 2.0 * std::sqrt(W) / inv.r_o);
  double worst = std::numeric_limits<double>::infinity();
  for (const CollarSample& s : collar_table(spec, 33)) worst = std::min(worst, s.R_min);
  return {make_result("pipeline.collar_verdict", worst, 0.0, 1e-8, Predicate::AtLeast)};
}

Results pipeline_sweep(Context& c) {
  const ConformalMetric g{c.field(ref::y22, 0.05), 1.0};
  const PathInvariants inv = compute_invariants(make_path(g, PathFamily::Conformal, c.config().n_samples));
  const std::vector<double> H{0.2, 0.5, 0.8, 1.1, 1.4};
  const auto rows = sweep_mean_curvature(g, inv, H);
  return {make_result("pipeline.sweep_rows", static_cast<double>(rows.size()), 8.0 * H.size(), 0.0,
                      Predicate::Absolute)};
}

const std::vector<Oracle>& suite() {
  static const std::vector<Oracle> oracles = {
      {"sphere.area_dense_quadrature", area_dense_quadrature},
      {"sphere.curvature_linearization", curvature_linearization},
      {"sphere.laplace_residual", laplace_residual},
      {"sphere.hessian_fd", hessian_fd},
      {"sphere.tensor_normsq", tensor_normsq},
      {"path.area_conservation", path_area_conservation},
      {"path.trace_cancellation", path_trace_cancellation},
      {"path.scaling_exponents", path_scaling_exponents},
      {"path.eta_lb_golden", path_eta_golden},
      {"profile.richardson", profile_richardson},
      {"collar.A_o_arithmetic", collar_A_o},
      {"collar.hawking_consistency", collar_hawking},
      {"collar.fd_convergence", collar_fd_convergence},
      {"collar.fd_equivalence", collar_fd_equivalence},
      {"collar.schwarzschild_flatness", collar_schwarzschild},
      {"bounds.psi_identity", bounds_psi_identity},
      {"bounds.phi_m_sweep", bounds_phi_m_sweep},
      {"bounds.phi_grid_case_c", bounds_phi_case_c},
      {"bounds.grid_phi", bounds_grid_phi},
      {"bounds.grid_psi", bounds_grid_psi},
      {"pipeline.analyze", pipeline_analyze},
      {"pipeline.collar_verdict", pipeline_collar},
      {"pipeline.sweep_rows", pipeline_sweep},
  };
  return oracles;
}

bool selected(const VerifyConfig& config, const std::string& name) {
  if (config.only.empty()) return true;
  return std::any_of(config.only.begin(), config.only.end(),
                     [&](const std::string& p) { return name.compare(0, p.size(), p) == 0; });
}

const char* predicate_name(Predicate p) {
  switch (p) {
    case Predicate::Absolute: return "abs";
    case Predicate::Relative: return "rel";
    case Predicate::AtMost: return "at_most";
    case Predicate::AtLeast: return "at_least";
  }
  return "?";
}

}  // namespace

OracleResult make_result(std::string name, double computed, double reference, double tolerance, Predicate p) {
  OracleResult r;
  r.name = std::move(name);
  r.computed = computed;
  r.reference = reference;
  r.abs_err = std::abs(computed - reference);
  r.rel_err = reference != 0.0 ? r.abs_err / std::abs(reference) : r.abs_err;
  r.tolerance = tolerance;
  r.predicate = p;
  switch (p) {
    case Predicate::Absolute: r.pass = r.abs_err <= tolerance; break;
    case Predicate::Relative: r.pass = r.abs_err <= tolerance * std::abs(reference); break;
    case Predicate::AtMost: r.pass = computed <= reference + tolerance; break;
    case Predicate::AtLeast: r.pass = computed >= reference - tolerance; break;
  }
  return r;
}

std::vector<std::string> oracle_names() {
  std::vector<std::string> names;
  for (const Oracle& o : suite()) names.emplace_back(o.name);
  return names;
}

std::vector<OracleResult> run_suite(const VerifyConfig& config) {
  Context ctx(config);
  std::vector<const Oracle*> chosen;
  for (const Oracle& o : suite())
    if (selected(config, o.name)) chosen.push_back(&o);

  std::vector<Results> per(chosen.size());
  parallel_for(chosen.size(), [&](std::size_t i) {
    try {
      per[i] = chosen[i]->run(ctx);
    } catch (const std::exception& e) {
      // an oracle that throws is a failed oracle, not a failed suite
      OracleResult r = make_result(chosen[i]->name, std::nan(""), 0.0, 0.0, Predicate::Absolute);
      r.pass = false;
      r.note = std::string("exception: ") + e.what();
      per[i] = {r};
    }
  });
  ctx.persist();

  std::vector<OracleResult> out;
  for (auto& rs : per) out.insert(out.end(), rs.begin(), rs.end());
  return out;
}

nlohmann::json to_json(const OracleResult& r) {
  nlohmann::json j;
  j["name"] = r.name;
  j["computed"] = json_number(r.computed);
  j["reference"] = json_number(r.reference);
  j["abs_err"] = json_number(r.abs_err);
  j["rel_err"] = json_number(r.rel_err);
  j["tolerance"] = json_number(r.tolerance);
  j["predicate"] = predicate_name(r.predicate);
  j["pass"] = r.pass;
  if (!r.note.empty()) j["note"] = r.note;
  return j;
}

void write_jsonl(std::ostream& os, const std::vector<OracleResult>& results) {
  for (const OracleResult& r : results) os << to_json(r).dump() << '\n';
}

bool all_pass(const std::vector<OracleResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const OracleResult& r) { return r.pass; });
}

}  // namespace collarkit
