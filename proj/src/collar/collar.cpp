#include "collarkit/collar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "collarkit/errors.hpp"
#include "collarkit/format.hpp"
#include "collarkit/parallel.hpp"

namespace collarkit {

namespace {

constexpr double kSlack = 1.05;  // s_max padding so t = 1 is inside the table

std::string admissibility_text(double m) {
  return m < 0.0 ? "beta - [1 + (1 - 2m/r_o) alpha] k^2 > 0 (m < 0)" : "beta - (1 + alpha) k^2 > 0 (m >= 0)";
}

double admissibility_margin(double m, double k, const PathInvariants& inv) {
  const double k2 = k * k;
  return m < 0.0 ? inv.beta - (1.0 + (1.0 - 2.0 * m / inv.r_o) * inv.alpha) * k2 : inv.beta - (1.0 + inv.alpha) * k2;
}

CollarSpec assemble(const MetricPath& path, const PathInvariants& inv, double m, double k, double H_o,
                    std::optional<double> A_override) {
  if (!mass_within_horizon_bound(m, inv.r_o)) throw MassTooLarge(m, inv.r_o);
  if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("k must be finite and nonnegative");
  const double A_o = A_o_of(m, k, inv);
  double A = A_o;
  if (A_override) {
    if (!(*A_override > 0.0)) throw DomainError("A must be positive");
    A = std::max(*A_override, A_o);
  } else if (A_o == 0.0) {
    A = inv.r_o;
  }
  const double s_max = std::max(kSlack * A * k, kProfileStepFraction * inv.r_o);
  return CollarSpec{path, inv, m, k, H_o, A, A_o, inv.r_o, integrate_profile(m, inv.r_o, s_max)};
}

}  // namespace

double k_of(double m, double H_o, double r_o) {
  if (!mass_within_horizon_bound(m, r_o)) throw MassTooLarge(m, r_o);
  if (1.0 - 2.0 * m / r_o <= 1e-12) throw DomainError("k is undefined from H_o at m = r_o/2; give k directly");
  return 0.5 * H_o * r_o / std::sqrt(1.0 - 2.0 * m / r_o);
}

double mean_curvature_at_start(double m, double k, double r_o) {
  return 2.0 * k / r_o * std::sqrt(std::max(0.0, 1.0 - 2.0 * m / r_o));
}

double A_o_of(double m, double k, const PathInvariants& inv) {
  const double margin = admissibility_margin(m, k, inv);
  if (inv.alpha == 0.0) {
    // constant path: R >= 2u^-2 (beta - k^2), so beta >= k^2 suffices
    if (inv.beta - k * k < -1e-12) throw Inadmissible("beta - k^2 >= 0 (constant path)", inv.beta - k * k);
    return 0.0;
  }
  if (!(margin > 0.0)) throw Inadmissible(admissibility_text(m), margin);
  return inv.r_o * std::sqrt(inv.alpha / margin);
}

CollarSpec build_collar(const MetricPath& path, const PathInvariants& inv, double m, double H_o,
                        std::optional<double> A_override) {
  if (!(H_o > 0.0)) throw DomainError("H_o must be positive");
  return assemble(path, inv, m, k_of(m, H_o, inv.r_o), H_o, A_override);
}

CollarSpec build_collar(const MetricPath& path, double m, double H_o, std::optional<double> A_override) {
  return build_collar(path, compute_invariants(path), m, H_o, A_override);
}

CollarSpec build_collar_with_k(const MetricPath& path, const PathInvariants& inv, double m, double k,
                               std::optional<double> A_override) {
  return assemble(path, inv, m, k, mean_curvature_at_start(m, k, inv.r_o), A_override);
}

double collar_radius(const CollarSpec& spec, double t) { return spec.profile.u(spec.A * spec.k * t); }

CollarSample slice_quantities(const CollarSpec& spec, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("slice parameter outside [0, 1]");
  const double u = collar_radius(spec, t);
  const double k2 = spec.k * spec.k;
  CollarSample s;
  s.t = t;
  s.E = u * u / (spec.r_o * spec.r_o);
  s.H_t = 2.0 * spec.k / u * std::sqrt(std::max(0.0, 1.0 - 2.0 * spec.m / u));
  s.hawking = 0.5 * u * (1.0 - k2) + spec.m * k2;
  const double hawking0 = 0.5 * spec.r_o * (1.0 - k2) + spec.m * k2;
  s.hawking_increment_form = 0.5 * (u - spec.r_o) * (1.0 - k2) + hawking0;
  s.R_min = scalar_curvature(spec, t).min();
  return s;
}

ScalarField scalar_curvature(const CollarSpec& spec, double t) {
  const PathState st = spec.path.at(t);
  const ScalarField K = gauss_curvature(st.h);
  const CorrectedDerivative c = trace_free_correct(st.h, st.hprime);
  const ScalarField h2 = tensor_trace_and_norm(st.h, c.H).normsq;
  const double u = collar_radius(spec, t);
  const double r2 = spec.r_o * spec.r_o;
  const double k2 = spec.k * spec.k;
  const double c8 = u * u / (spec.A * spec.A) / 8.0;
  ScalarField R(K.grid_ptr());
  for (std::size_t i = 0; i < R.size(); ++i) R[i] = 2.0 / (u * u) * (r2 * K[i] - k2 - c8 * h2[i]);
  return R;
}

std::vector<CollarSample> collar_table(const CollarSpec& spec, int n_t) {
  if (n_t < 2) throw DomainError("collar table needs at least two slices");
  std::vector<CollarSample> rows(static_cast<std::size_t>(n_t));
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i] = slice_quantities(spec, static_cast<double>(i) / (n_t - 1));
  });
  return rows;
}

double fd_scalar_curvature(const std::function<Metric3(const Point3&)>& metric, const Point3& x, double h) {
  auto shifted = [&](Point3 p, int axis, double d) {
    p[axis] += d;
    return p;
  };
  auto inverse = [](const Metric3& g) {
    const double det = g[0][0] * (g[1][1] * g[2][2] - g[1][2] * g[2][1]) -
                       g[0][1] * (g[1][0] * g[2][2] - g[1][2] * g[2][0]) +
                       g[0][2] * (g[1][0] * g[2][1] - g[1][1] * g[2][0]);
    Metric3 inv{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        const int i1 = (j + 1) % 3, i2 = (j + 2) % 3, j1 = (i + 1) % 3, j2 = (i + 2) % 3;
        inv[i][j] = (g[i1][j1] * g[i2][j2] - g[i1][j2] * g[i2][j1]) / det;
      }
    return inv;
  };
  using Gamma = std::array<Metric3, 3>;  // Gamma[k][i][j]
  auto christoffel = [&](const Point3& p) {
    std::array<Metric3, 3> dg{};  // dg[l][i][j] = d_l g_ij
    for (int l = 0; l < 3; ++l) {
      const Metric3 gp = metric(shifted(p, l, h)), gm = metric(shifted(p, l, -h));
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dg[l][i][j] = (gp[i][j] - gm[i][j]) / (2 * h);
    }
    const Metric3 gi = inverse(metric(p));
    Gamma G{};
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
          double s = 0.0;
          for (int l = 0; l < 3; ++l) s += gi[k][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
          G[k][i][j] = 0.5 * s;
        }
    return G;
  };

  const Gamma G = christoffel(x);
  std::array<Gamma, 3> dG{};  // dG[l] = d_l Gamma
  for (int l = 0; l < 3; ++l) {
    const Gamma Gp = christoffel(shifted(x, l, h)), Gm = christoffel(shifted(x, l, -h));
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) dG[l][k][i][j] = (Gp[k][i][j] - Gm[k][i][j]) / (2 * h);
  }
  const Metric3 gi = inverse(metric(x));
  double R = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double ric = 0.0;
      for (int k = 0; k < 3; ++k) {
        ric += dG[k][k][i][j] - dG[j][k][i][k];
        for (int l = 0; l < 3; ++l) ric += G[k][k][l] * G[l][i][j] - G[k][j][l] * G[l][i][k];
      }
      R += gi[i][j] * ric;
    }
  return R;
}

double fd_curvature_oracle(const CollarSpec& spec, double t, std::size_t node, double step) {
  const SphereGrid& grid = spec.path.base().grid();
  if (node >= grid.size()) throw DomainError("node index out of range");
  if (t - 2 * step <= 0.0 || t + 2 * step >= 1.0) throw StencilOutOfRange("t stencil leaves (0, 1)");

  struct Level {
    Spectrum v, u;
    double scale, E;
  };
  std::array<Level, 5> levels;
  for (int o = -2; o <= 2; ++o) {
    const double tl = t + o * step;
    const PathState st = spec.path.at(tl);
    const CorrectedDerivative c = trace_free_correct(st.h, st.hprime);
    const double um = collar_radius(spec, tl);
    levels[o + 2] = {st.h.v.spectrum(), c.u.spectrum(), st.h.scale, um * um / (spec.r_o * spec.r_o)};
  }

  // Rotated chart (theta', phi') with the node at theta' = pi/2, phi' = 0, so
  // the stencil never comes near a coordinate pole. Columns of Q: the node
  // direction n, e_phi(n) and -e_theta(n).
  using Vec = std::array<double, 3>;
  const double th0 = grid.theta(grid.lat_of(node)), ph0 = grid.phi(grid.lon_of(node));
  auto e_r = [](double th, double ph) { return Vec{std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)}; };
  auto e_th = [](double th, double ph) { return Vec{std::cos(th) * std::cos(ph), std::cos(th) * std::sin(ph), -std::sin(th)}; };
  auto e_ph = [](double, double ph) { return Vec{-std::sin(ph), std::cos(ph), 0.0}; };
  const Vec q0 = e_r(th0, ph0), q1 = e_ph(th0, ph0), q2 = e_th(th0, ph0);
  auto rotate = [&](const Vec& a) {
    Vec out;
    for (int i = 0; i < 3; ++i) out[i] = q0[i] * a[0] + q1[i] * a[1] - q2[i] * a[2];
    return out;
  };
  auto dot = [](const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };

  const double A2 = spec.A * spec.A;
  auto metric = [&](const Point3& p) {
    const int o = static_cast<int>(std::lround((p[0] - t) / step));
    if (o < -2 || o > 2) throw StencilOutOfRange("oracle stencil exceeds five t-levels");
    const Level& L = levels[o + 2];
    const Vec x = rotate(e_r(p[1], p[2]));
    const double th = std::acos(std::clamp(x[2], -1.0, 1.0)), ph = std::atan2(x[1], x[0]);
    const PointValue v = SphereGrid::evaluate(L.v, th, ph);
    const PointValue u = SphereGrid::evaluate(L.u, th, ph);
    Vec grad;
    const Vec et = e_th(th, ph), ep = e_ph(th, ph);
    for (int i = 0; i < 3; ++i) grad[i] = u.dtheta * et[i] + u.dphi / std::sin(th) * ep[i];
    const double du_t = dot(grad, rotate(e_th(p[1], p[2])));
    const double du_p = dot(grad, rotate(e_ph(p[1], p[2]))) * std::sin(p[1]);
    const double s2 = std::sin(p[1]) * std::sin(p[1]);
    const double conf = L.scale * std::exp(2.0 * v.value);
    const double du2 = (du_t * du_t + du_p * du_p / s2) / conf;
    Metric3 g{};
    g[0][0] = A2 + L.E * du2;
    g[0][1] = g[1][0] = -L.E * du_t;
    g[0][2] = g[2][0] = -L.E * du_p;
    g[1][1] = L.E * conf;
    g[2][2] = L.E * conf * s2;
    return g;
  };
  return fd_scalar_curvature(metric, {t, 0.5 * std::numbers::pi, 0.0}, step);
}

nlohmann::json collar_header(const CollarSpec& spec) {
  nlohmann::json j;
  j["m"] = json_number(spec.m);
  j["k"] = json_number(spec.k);
  j["H_o"] = json_number(spec.H_o);
  j["A"] = json_number(spec.A);
  j["A_o"] = json_number(spec.A_o);
  j["r_o"] = json_number(spec.r_o);
  j["alpha"] = json_number(spec.inv.alpha);
  j["beta"] = json_number(spec.inv.beta);
  j["family"] = spec.inv.family;
  return j;
}

nlohmann::json to_json(const CollarSample& s) {
  nlohmann::json j;
  j["t"] = json_number(s.t);
  j["E"] = json_number(s.E);
  j["H_t"] = json_number(s.H_t);
  j["hawking"] = json_number(s.hawking);
  j["R_min"] = json_number(s.R_min);
  return j;
}

void write_collar_csv(std::ostream& os, const std::vector<CollarSample>& rows) {
  os << "t,E,H_t,hawking,R_min\n";
  for (const auto& r : rows) {
    os << format_double(r.t) << ',' << format_double(r.E) << ',' << format_double(r.H_t) << ','
       << format_double(r.hawking) << ',' << format_double(r.R_min) << '\n';
  }
}

}  // namespace collarkit
