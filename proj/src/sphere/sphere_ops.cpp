#include "collarkit/sphere_ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "collarkit/errors.hpp"

namespace collarkit {

namespace {

ScalarField with_grid(const ScalarField& like, std::vector<double> values) {
  return ScalarField(like.grid_ptr(), std::move(values));
}

// Multiplies each node by a function of its latitude index.
template <class F>
ScalarField scale_by_latitude(ScalarField f, F factor) {
  const SphereGrid& g = f.grid();
  for (int i = 0; i < g.nlat(); ++i) {
    const double c = factor(i);
    for (int j = 0; j < g.nlon(); ++j) f[g.index(i, j)] *= c;
  }
  return f;
}

SymTensorField round_hessian(const ScalarField& u, const Spectrum& s, const CoordinateGradient& du) {
  const SphereGrid& g = u.grid();
  ScalarField lap = with_grid(u, [&] {
    Spectrum ls = s;
    for (int l = 0; l <= s.lmax(); ++l)
      for (int m = -l; m <= l; ++m) ls(l, m) *= -static_cast<double>(l) * (l + 1);
    return g.synthesize(ls);
  }());
  ScalarField dpp = with_grid(u, g.synthesize_dphidphi(s));
  ScalarField dtp = with_grid(u, g.synthesize_dthetadphi(s));

  SymTensorField h(u.grid_ptr());
  for (int i = 0; i < g.nlat(); ++i) {
    const double st = g.sin_theta(i), ct = g.cos_theta(i);
    const double cot = ct / st;
    for (int j = 0; j < g.nlon(); ++j) {
      const std::size_t k = g.index(i, j);
      h.tt[k] = lap[k] - cot * du.dtheta[k] - dpp[k] / (st * st);
      h.tp[k] = dtp[k] - cot * du.dphi[k];
      h.pp[k] = dpp[k] + st * ct * du.dtheta[k];
    }
  }
  return h;
}

}  // namespace

double total_area(const ConformalMetric& metric) {
  return metric.grid().integrate(metric.density().values());
}

double area_radius(const ConformalMetric& metric) {
  return std::sqrt(total_area(metric) / (4.0 * std::numbers::pi));
}

double integrate(const ConformalMetric& metric, const ScalarField& f) {
  return metric.grid().integrate((metric.density() * f).values());
}

ScalarField round_laplacian(const ScalarField& u) {
  Spectrum s = u.spectrum();
  for (int l = 0; l <= s.lmax(); ++l)
    for (int m = -l; m <= l; ++m) s(l, m) *= -static_cast<double>(l) * (l + 1);
  return ScalarField::from_spectrum(u.grid_ptr(), s);
}

ScalarField gauss_curvature(const ConformalMetric& metric) {
  ScalarField lap = round_laplacian(metric.v);
  ScalarField k(metric.grid_ptr());
  for (std::size_t i = 0; i < k.size(); ++i) k[i] = std::exp(-2.0 * metric.v[i]) * (1.0 - lap[i]) / metric.scale;
  return k;
}

ScalarField laplacian(const ConformalMetric& metric, const ScalarField& u) {
  ScalarField lap = round_laplacian(u);
  for (std::size_t i = 0; i < lap.size(); ++i) lap[i] *= std::exp(-2.0 * metric.v[i]) / metric.scale;
  return lap;
}

ScalarField laplace_solve(const ConformalMetric& metric, const ScalarField& f, double tolerance) {
  const ScalarField density = metric.density();
  const SphereGrid& g = metric.grid();
  const ScalarField rhs = density * f;
  const double mean = g.integrate(rhs.values());
  const double mass = g.integrate((density * f.map([](double x) { return std::abs(x); })).values());
  if (std::abs(mean) > tolerance * std::max(1.0, mass)) throw NonZeroMean(mean, tolerance);

  Spectrum s = rhs.spectrum();
  s(0, 0) = 0.0;
  for (int l = 1; l <= s.lmax(); ++l)
    for (int m = -l; m <= l; ++m) s(l, m) /= -static_cast<double>(l) * (l + 1);
  ScalarField u = ScalarField::from_spectrum(metric.grid_ptr(), s);
  u += -integrate(metric, u) / total_area(metric);
  return u;
}

CoordinateGradient coordinate_gradient(const ScalarField& u) {
  const Spectrum s = u.spectrum();
  return {with_grid(u, u.grid().synthesize_dtheta(s)), with_grid(u, u.grid().synthesize_dphi(s))};
}

SymTensorField hessian(const ConformalMetric& metric, const ScalarField& u) {
  const Spectrum su = u.spectrum();
  const SphereGrid& g = u.grid();
  const CoordinateGradient du{with_grid(u, g.synthesize_dtheta(su)), with_grid(u, g.synthesize_dphi(su))};
  SymTensorField h = round_hessian(u, su, du);

  // Christoffel correction for exp(2v) g_round; the constant scale drops out.
  const CoordinateGradient dv = coordinate_gradient(metric.v);
  for (int i = 0; i < g.nlat(); ++i) {
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.nlon(); ++j) {
      const std::size_t k = g.index(i, j);
      const double inner = dv.dtheta[k] * du.dtheta[k] + dv.dphi[k] * du.dphi[k] / s2;
      h.tt[k] += -2.0 * dv.dtheta[k] * du.dtheta[k] + inner;
      h.tp[k] += -(dv.dtheta[k] * du.dphi[k] + dv.dphi[k] * du.dtheta[k]);
      h.pp[k] += -2.0 * dv.dphi[k] * du.dphi[k] + s2 * inner;
    }
  }
  return h;
}

SymTensorField metric_tensor(const ConformalMetric& metric) {
  const ScalarField rho = metric.density();
  const SphereGrid& g = metric.grid();
  ScalarField pp = scale_by_latitude(rho, [&](int i) { return g.sin_theta(i) * g.sin_theta(i); });
  return SymTensorField(rho, ScalarField(metric.grid_ptr(), 0.0), std::move(pp));
}

TraceAndNorm tensor_trace_and_norm(const ConformalMetric& metric, const SymTensorField& t) {
  const SphereGrid& g = metric.grid();
  TraceAndNorm out{ScalarField(metric.grid_ptr()), ScalarField(metric.grid_ptr())};
  for (int i = 0; i < g.nlat(); ++i) {
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.nlon(); ++j) {
      const std::size_t k = g.index(i, j);
      const double inv_tt = std::exp(-2.0 * metric.v[k]) / metric.scale;
      const double inv_pp = inv_tt / s2;
      out.trace[k] = inv_tt * t.tt[k] + inv_pp * t.pp[k];
      out.normsq[k] = inv_tt * inv_tt * t.tt[k] * t.tt[k] + 2.0 * inv_tt * inv_pp * t.tp[k] * t.tp[k] +
                      inv_pp * inv_pp * t.pp[k] * t.pp[k];
    }
  }
  return out;
}

SymTensorField trace_free_part(const ConformalMetric& metric, const SymTensorField& t) {
  const ScalarField half_trace = 0.5 * tensor_trace_and_norm(metric, t).trace;
  const SymTensorField h = metric_tensor(metric);
  return SymTensorField(t.tt - half_trace * h.tt, t.tp, t.pp - half_trace * h.pp);
}

SupNorms sup_norms(const ScalarField& f) {
  const Spectrum s = f.spectrum();
  const SphereGrid& g = f.grid();
  const CoordinateGradient df{with_grid(f, g.synthesize_dtheta(s)), with_grid(f, g.synthesize_dphi(s))};
  const SymTensorField h = round_hessian(f, s, df);
  SupNorms out;
  out.c0 = f.max_abs();
  for (int i = 0; i < g.nlat(); ++i) {
    const double s2 = g.sin_theta(i) * g.sin_theta(i);
    for (int j = 0; j < g.nlon(); ++j) {
      const std::size_t k = g.index(i, j);
      out.c1 = std::max(out.c1, std::sqrt(df.dtheta[k] * df.dtheta[k] + df.dphi[k] * df.dphi[k] / s2));
      const double n2 = h.tt[k] * h.tt[k] + 2.0 * h.tp[k] * h.tp[k] / s2 + h.pp[k] * h.pp[k] / (s2 * s2);
      out.c2 = std::max(out.c2, std::sqrt(n2));
    }
  }
  return out;
}

}  // namespace collarkit
