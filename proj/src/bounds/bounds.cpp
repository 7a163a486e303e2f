#include "collarkit/bounds.hpp"

#include <cmath>
#include <limits>

#include "collarkit/errors.hpp"
#include "collarkit/format.hpp"
#include "collarkit/parallel.hpp"
#include "collarkit/sphere_ops.hpp"

namespace collarkit {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Gauss-Bonnet gives beta <= 1; quadrature may overshoot by roundoff.
constexpr double kUnitSlack = 1e-9;

BoundReport base_report(Theorem t, const SurfaceData& sd) {
  BoundReport r;
  r.theorem = t;
  r.H_o = sd.H_o;
  r.W = sd.W;
  r.r_o = sd.r_o;
  r.m_H = sd.m_H;
  return r;
}

void mark_inapplicable(BoundReport& r, std::string reason) {
  r.applicable = false;
  r.reason = std::move(reason);
  r.rhs = std::numeric_limits<double>::quiet_NaN();
}

// [W/(eta - W)]^(1/2) r_o/2 + m_H, shared by the eta theorems
BoundReport eta_bound(Theorem t, const SurfaceData& sd, double eta) {
  if (!(eta > 0.0)) throw DomainError("eta must be positive");
  BoundReport r = base_report(t, sd);
  r.eta = eta;
  if (!(sd.W < eta)) {
    mark_inapplicable(r, "W < eta fails");
    return r;
  }
  r.applicable = true;
  r.rhs = std::isinf(eta) ? sd.m_H : std::sqrt(sd.W / (eta - sd.W)) * 0.5 * sd.r_o + sd.m_H;
  return r;
}

void check_alpha_beta(double alpha, double beta) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and nonnegative");
  if (!(beta > 0.0) || beta > 1.0 + kUnitSlack) throw DomainError("beta must lie in (0, 1]");
}

std::string case_with_limit(const MinimizerResult& r) {
  switch (r.limit) {
    case LimitSide::FromAbove: return r.case_tag + " (x -> 0+)";
    case LimitSide::FromBelow: return r.case_tag + " (x -> W-)";
    default: return r.case_tag;
  }
}

std::string csv_cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

SurfaceData surface_data(const ConformalMetric& g, double H_o) {
  if (!(H_o >= 0.0) || !std::isfinite(H_o)) throw DomainError("H_o must be finite and nonnegative");
  SurfaceData sd;
  sd.g = g;
  sd.H_o = H_o;
  sd.area = total_area(g);
  sd.r_o = std::sqrt(sd.area / (4.0 * kPi));
  sd.W = H_o * H_o * sd.area / (16.0 * kPi);
  sd.m_H = 0.5 * sd.r_o * (1.0 - sd.W);
  return sd;
}

SurfaceData surface_data(double r_o, double H_o) {
  if (!(r_o > 0.0)) throw DomainError("r_o must be positive");
  if (!(H_o >= 0.0) || !std::isfinite(H_o)) throw DomainError("H_o must be finite and nonnegative");
  SurfaceData sd;
  sd.g = ConformalMetric::round(make_grid(2), r_o * r_o);
  sd.H_o = H_o;
  sd.r_o = r_o;
  sd.area = 4.0 * kPi * r_o * r_o;
  sd.W = 0.25 * H_o * H_o * r_o * r_o;
  sd.m_H = 0.5 * r_o * (1.0 - sd.W);
  return sd;
}

std::string theorem_tag(Theorem t) {
  switch (t) {
    case Theorem::T11: return "T11";
    case Theorem::T12: return "T12";
    case Theorem::T14: return "T14";
    case Theorem::T44: return "T44";
    case Theorem::T31family: return "T31family";
    case Theorem::T32family: return "T32family";
    case Theorem::A31prime: return "A31prime";
    case Theorem::A32prime: return "A32prime";
  }
  return "?";
}

BoundReport thm11_rhs(const SurfaceData& sd, double eta) { return eta_bound(Theorem::T11, sd, eta); }

BoundReport thm12_check(const SurfaceData& sd, double eta) {
  BoundReport r = eta_bound(Theorem::T12, sd, eta);
  if (r.applicable) r.holds = r.rhs >= 0.0;
  return r;
}

BoundReport thm14_rhs(const SurfaceData& sd, double alpha_g, double beta_g) {
  check_alpha_beta(alpha_g, beta_g);
  BoundReport r = base_report(Theorem::T14, sd);
  r.alpha = alpha_g;
  r.beta = beta_g;
  const double denom = beta_g - (1.0 + alpha_g) * sd.W;
  if (!(denom > 0.0)) {
    mark_inapplicable(r, "W < beta/(1 + alpha) fails");
    return r;
  }
  r.applicable = true;
  r.rhs = (std::sqrt(alpha_g * sd.W / denom) + 1.0) * sd.m_H;
  return r;
}

BoundReport thm44_rhs(const SurfaceData& sd, double kappa) {
  if (!(kappa > 0.0) || kappa > 1.0 + kUnitSlack) throw DomainError("kappa must lie in (0, 1]");
  BoundReport r = base_report(Theorem::T44, sd);
  r.kappa = kappa;
  if (!(sd.W < kappa)) {
    mark_inapplicable(r, "W < kappa fails");
    return r;
  }
  r.applicable = true;
  r.rhs = (std::sqrt(sd.W / (kappa - sd.W)) + 1.0) * sd.m_H;
  return r;
}

BoundReport thm31_family(const SurfaceData& sd, const PathInvariants& inv, double m) {
  if (!(m < 0.0)) throw DomainError("this family needs m < 0");
  check_alpha_beta(inv.alpha, inv.beta);
  BoundReport r = base_report(Theorem::T31family, sd);
  const double q = 1.0 - 2.0 * m / sd.r_o;  // +inf for m = -inf
  const double k2 = sd.W / q;
  r.m = m;
  r.k = std::sqrt(k2);
  r.alpha = inv.alpha;
  r.beta = inv.beta;
  r.b = inv.beta - inv.alpha * sd.W;
  const double margin = *r.b - k2;
  if (!(margin > 0.0)) throw Inadmissible("beta - [1 + (1 - 2m/r_o) alpha] k^2 > 0 (m < 0)", margin);
  r.applicable = true;
  r.rhs = 0.5 * sd.r_o * std::sqrt(sd.W * inv.alpha / margin) * (1.0 - k2) + sd.m_H;
  return r;
}

BoundReport thm32_family(const SurfaceData& sd, const PathInvariants& inv, double m) {
  if (!(m >= 0.0 && m < 0.5 * sd.r_o)) throw DomainError("this family needs m in [0, r_o/2)");
  check_alpha_beta(inv.alpha, inv.beta);
  BoundReport r = base_report(Theorem::T32family, sd);
  const double k2 = sd.W / (1.0 - 2.0 * m / sd.r_o);
  const double k = std::sqrt(k2);
  r.m = m;
  r.k = k;
  r.alpha = inv.alpha;
  r.beta = inv.beta;
  r.kappa = inv.beta / (1.0 + inv.alpha);
  const double margin = inv.beta - (1.0 + inv.alpha) * k2;
  if (!(margin > 0.0)) throw Inadmissible("beta - (1 + alpha) k^2 > 0 (m >= 0)", margin);
  const double A_o = sd.r_o * std::sqrt(inv.alpha / margin);
  r.applicable = true;
  r.rhs = 0.5 * A_o * k * (1.0 - k2) + sd.m_H;
  r.weakened_rhs = 0.5 * sd.r_o * std::sqrt(k2 / (*r.kappa - k2)) * (1.0 - k2) + sd.m_H;
  return r;
}

double phi(double x, double kappa, double alpha, double r_o) {
  if (!(x >= 0.0 && x <= kappa)) throw DomainError("phi needs 0 <= x <= kappa");
  if (alpha == 0.0 || x == 0.0) return 0.0;
  if (x == kappa) return kInf;
  return 0.5 * r_o * std::sqrt(alpha / (1.0 + alpha)) * std::sqrt(x / (kappa - x)) * (1.0 - x);
}

double psi(double x, double b, double alpha, double W, double r_o) {
  if (!(b > 0.0)) throw DomainError("psi needs b > 0");
  if (!(x >= 0.0 && x <= b)) throw DomainError("psi needs 0 <= x <= b");
  if (alpha * W == 0.0) return 0.0;
  if (x == b) return kInf;
  return 0.5 * r_o * std::sqrt(alpha * W / (b - x)) * (1.0 - x);
}

MinimizerResult minimize_phi(double kappa, double alpha, double r_o, double W) {
  if (!(kappa > 0.0)) throw DomainError("kappa must be positive");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");
  if (!(W >= 0.0)) throw DomainError("W must be nonnegative");
  if (!(W < kappa)) throw HypothesisFailed("W < kappa fails");

  MinimizerResult res;
  res.lo = W;
  res.hi = kappa;
  if (alpha == 0.0) {
    // Phi vanishes identically on a constant path
    res.x_star = W;
    res.case_tag = "alpha=0";
    return res;
  }
  if (!(kappa < 1.0)) throw DomainError("kappa = beta/(1 + alpha) must be below 1 when alpha > 0");

  constexpr double kEightNinths = 8.0 / 9.0;
  const double disc = 9.0 * kappa * kappa - 8.0 * kappa;
  if (std::abs(disc) <= 1e-14) {
    res.x1 = res.x2 = 0.75 * kappa;
  } else if (disc > 0.0) {
    res.x1 = (3.0 * kappa - std::sqrt(disc)) / 4.0;
    res.x2 = (3.0 * kappa + std::sqrt(disc)) / 4.0;
  }

  const double at_W = phi(W, kappa, alpha, r_o);
  if (kappa <= kEightNinths || *res.x2 <= W) {
    res.case_tag = "a";
    res.x_star = W;
    res.value = at_W;
  } else if (*res.x1 <= W) {
    res.case_tag = "b";
    res.x_star = *res.x2;
    res.value = phi(*res.x2, kappa, alpha, r_o);
  } else {
    res.case_tag = "c";
    const double at_x2 = phi(*res.x2, kappa, alpha, r_o);
    res.candidates = {{W, at_W}, {*res.x2, at_x2}};
    res.x_star = at_x2 < at_W ? *res.x2 : W;
    res.value = std::min(at_W, at_x2);
  }
  return res;
}

MinimizerResult minimize_psi(double b, double alpha, double W, double r_o) {
  if (!(b > 0.0 && b <= 1.0)) throw DomainError("b = beta - alpha W must lie in (0, 1]");
  if (!(W > 0.0)) throw DomainError("W must be positive");
  if (!(alpha >= 0.0)) throw DomainError("alpha must be nonnegative");

  MinimizerResult res;
  res.lo = 0.0;
  auto attained = [&](double x, const char* tag) {
    res.x_star = x;
    res.value = psi(x, b, alpha, W, r_o);
    res.case_tag = tag;
  };
  auto limit = [&](double x, LimitSide side, const char* tag) {
    attained(x, tag);
    res.limit = side;
  };

  if (b < W) {
    res.hi = b;
    if (b <= 0.5)
      limit(0.0, LimitSide::FromAbove, "1a");
    else
      attained(2.0 * b - 1.0, "1b");
  } else {
    res.hi = W;
    if (b <= 0.5)
      limit(0.0, LimitSide::FromAbove, "2a");
    else if (b < 0.5 * (1.0 + W))
      attained(2.0 * b - 1.0, "2b");
    else
      limit(W, LimitSide::FromBelow, "2c");
  }
  return res;
}

GridMinimum grid_search_min(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (!(lo < hi)) throw DomainError("grid search needs lo < hi");
  if (n < 2) throw DomainError("grid search needs at least two samples");
  const double h = (hi - lo) / (n + 1);
  int best_i = 1;
  double best_y = f(lo + h);
  for (int i = 2; i <= n; ++i) {
    const double y = f(lo + i * h);
    if (y < best_y) {
      best_i = i;
      best_y = y;
    }
  }
  GridMinimum res;
  res.grid_x = res.x = lo + best_i * h;
  res.grid_value = res.value = best_y;

  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo + (best_i - 1) * h, b = lo + (best_i + 1) * h;
  double c = b - kInvPhi * (b - a), d = a + kInvPhi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 100 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
  }
  const double x = fc <= fd ? c : d, y = std::min(fc, fd);
  if (y < res.value) {
    res.x = x;
    res.value = y;
  }
  return res;
}

BoundReport appendix31(const SurfaceData& sd, const PathInvariants& inv) {
  check_alpha_beta(inv.alpha, inv.beta);
  BoundReport r = base_report(Theorem::A31prime, sd);
  r.alpha = inv.alpha;
  r.beta = inv.beta;
  r.b = inv.beta - inv.alpha * sd.W;
  if (!(*r.b > 0.0)) {
    mark_inapplicable(r, "b = beta - alpha W > 0 fails");
    return r;
  }
  r.applicable = true;
  if (sd.W == 0.0) {
    r.case_tag = "W=0";
    r.x = 0.0;
    r.rhs = sd.m_H;
    return r;
  }
  const MinimizerResult mr = minimize_psi(std::min(*r.b, 1.0), inv.alpha, sd.W, sd.r_o);
  r.case_tag = case_with_limit(mr);
  r.x = mr.x_star;
  r.rhs = mr.value + sd.m_H;
  return r;
}

BoundReport appendix32(const SurfaceData& sd, const PathInvariants& inv) {
  check_alpha_beta(inv.alpha, inv.beta);
  BoundReport r = base_report(Theorem::A32prime, sd);
  r.alpha = inv.alpha;
  r.beta = inv.beta;
  r.kappa = std::min(inv.beta, 1.0) / (1.0 + inv.alpha);
  if (!(sd.W < *r.kappa)) {
    mark_inapplicable(r, "W < beta/(1 + alpha) fails");
    return r;
  }
  const MinimizerResult mr = minimize_phi(*r.kappa, inv.alpha, sd.r_o, sd.W);
  r.applicable = true;
  r.case_tag = mr.case_tag;
  r.x = mr.x_star;
  r.rhs = mr.value + sd.m_H;
  return r;
}

std::vector<BoundReport> evaluate_all(const SurfaceData& sd, const PathInvariants& inv) {
  std::vector<BoundReport> out;
  out.push_back(thm11_rhs(sd, inv.eta_lb));
  out.push_back(thm12_check(sd, inv.eta_lb));
  out.push_back(thm14_rhs(sd, inv.alpha, std::min(inv.beta, 1.0)));
  out.push_back(thm44_rhs(sd, std::min(inv.kappa_lb, 1.0)));

  PathInvariants clamped = inv;
  clamped.beta = std::min(inv.beta, 1.0);
  for (BoundReport& r : sweep_mass(sd, clamped, {-kInf, 0.0})) out.push_back(std::move(r));
  out.push_back(appendix31(sd, clamped));
  out.push_back(appendix32(sd, clamped));
  return out;
}

std::vector<BoundReport> sweep_mean_curvature(const ConformalMetric& g, const PathInvariants& inv,
                                              const std::vector<double>& H_values) {
  std::vector<std::vector<BoundReport>> per(H_values.size());
  parallel_for(H_values.size(), [&](std::size_t i) { per[i] = evaluate_all(surface_data(g, H_values[i]), inv); });
  std::vector<BoundReport> out;
  for (auto& rows : per) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

std::vector<BoundReport> sweep_mass(const SurfaceData& sd, const PathInvariants& inv, const std::vector<double>& m_values) {
  std::vector<BoundReport> out;
  for (double m : m_values) {
    const Theorem tag = m < 0.0 ? Theorem::T31family : Theorem::T32family;
    try {
      out.push_back(m < 0.0 ? thm31_family(sd, inv, m) : thm32_family(sd, inv, m));
    } catch (const Inadmissible& e) {
      BoundReport r = base_report(tag, sd);
      r.m = m;
      r.alpha = inv.alpha;
      r.beta = inv.beta;
      mark_inapplicable(r, e.condition() + " fails");
      out.push_back(r);
    } catch (const DomainError& e) {
      BoundReport r = base_report(tag, sd);
      r.m = m;
      mark_inapplicable(r, e.what());
      out.push_back(r);
    }
  }
  return out;
}

void compare_horizon(std::vector<BoundReport>& reports, double horizon_area) {
  if (!(horizon_area >= 0.0)) throw DomainError("horizon area must be nonnegative");
  const double radius = std::sqrt(horizon_area / (16.0 * kPi));
  for (BoundReport& r : reports) {
    if (!r.applicable || r.theorem == Theorem::T12) continue;
    r.horizon_radius = radius;
    r.holds = radius <= r.rhs;
  }
}

nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json j;
  j["theorem"] = theorem_tag(r.theorem);
  j["applicable"] = r.applicable;
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["rhs"] = r.applicable ? json_number(r.rhs) : nlohmann::json();
  j["H_o"] = json_number(r.H_o);
  j["W"] = json_number(r.W);
  j["r_o"] = json_number(r.r_o);
  j["m_H"] = json_number(r.m_H);
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) j[key] = json_number(*v);
  };
  opt("m", r.m);
  opt("k", r.k);
  opt("x", r.x);
  opt("alpha", r.alpha);
  opt("beta", r.beta);
  opt("eta", r.eta);
  opt("kappa", r.kappa);
  opt("b", r.b);
  opt("weakened_rhs", r.weakened_rhs);
  opt("horizon_radius", r.horizon_radius);
  if (!r.case_tag.empty()) j["case"] = r.case_tag;
  if (r.holds) j["holds"] = *r.holds;
  return j;
}

nlohmann::json to_json(const MinimizerResult& r) {
  nlohmann::json j;
  j["case"] = r.case_tag;
  j["x_star"] = json_number(r.x_star);
  j["value"] = json_number(r.value);
  j["limit"] = r.limit == LimitSide::Attained ? "attained" : r.limit == LimitSide::FromAbove ? "from_above" : "from_below";
  j["interval"] = {json_number(r.lo), json_number(r.hi)};
  if (r.x1) j["x1"] = json_number(*r.x1);
  if (r.x2) j["x2"] = json_number(*r.x2);
  if (!r.candidates.empty()) {
    nlohmann::json c = nlohmann::json::array();
    for (const auto& [x, v] : r.candidates) c.push_back({{"x", json_number(x)}, {"value", json_number(v)}});
    j["candidates"] = c;
  }
  return j;
}

nlohmann::json reports_to_json(const std::vector<BoundReport>& reports) {
  nlohmann::json arr = nlohmann::json::array();
  for (const BoundReport& r : reports) arr.push_back(to_json(r));
  return arr;
}

void write_bounds_csv(std::ostream& os, const std::vector<BoundReport>& reports) {
  os << "theorem,applicable,H_o,W,alpha,beta,eta,kappa,m,k,rhs,horizon_radius,holds\n";
  for (const BoundReport& r : reports) {
    os << theorem_tag(r.theorem) << ',' << (r.applicable ? "true" : "false") << ',' << format_double(r.H_o) << ','
       << format_double(r.W) << ','
       << csv_cell(r.alpha) << ',' << csv_cell(r.beta) << ',' << csv_cell(r.eta) << ',' << csv_cell(r.kappa) << ','
       << csv_cell(r.m) << ',' << csv_cell(r.k) << ',' << (r.applicable ? format_double(r.rhs) : std::string())
       << ',' << csv_cell(r.horizon_radius) << ',' << (r.holds ? (*r.holds ? "true" : "false") : "") << '\n';
  }
}

}  // namespace collarkit
