// Reference computations for oracles. Nothing here calls the spectral
// operators; everything works from closed forms and finite differences.
#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "collarkit/sphere_grid.hpp"

namespace collarkit::reference {

constexpr double pi = std::numbers::pi;

// Closed-form real orthonormal harmonics.
inline double y10(double th, double) { return 0.5 * std::sqrt(3.0 / pi) * std::cos(th); }
inline double y20(double th, double) {
  const double c = std::cos(th);
  return 0.25 * std::sqrt(5.0 / pi) * (3.0 * c * c - 1.0);
}
inline double y21(double th, double ph) {
  return 0.5 * std::sqrt(15.0 / pi) * std::sin(th) * std::cos(th) * std::cos(ph);
}
inline double y22(double th, double ph) {
  const double s = std::sin(th);
  return 0.25 * std::sqrt(15.0 / pi) * s * s * std::cos(2.0 * ph);
}
inline double y32(double th, double ph) {
  const double s = std::sin(th);
  return 0.25 * std::sqrt(105.0 / pi) * s * s * std::cos(th) * std::cos(2.0 * ph);
}

// Composite Simpson rule on [a, b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Product Simpson quadrature of f(theta, phi) sin(theta) over the sphere.
inline double sphere_integral(const std::function<double(double, double)>& f, int n_theta, int n_phi) {
  return simpson(
      [&](double th) {
        // periodic trapezoid in phi is spectrally accurate
        double row = 0.0;
        for (int j = 0; j < n_phi; ++j) row += f(th, 2.0 * pi * j / n_phi);
        return row * (2.0 * pi / n_phi) * std::sin(th);
      },
      0.0, pi, n_theta);
}

using Metric2 = std::function<std::array<double, 3>(double th, double ph)>;  // g_tt, g_tp, g_pp

// Hessian of u for a 2D metric by centered finite differences of u and of
// the metric components (Christoffel symbols from their definition).
inline std::array<double, 3> fd_hessian(const Metric2& g, const std::function<double(double, double)>& u, double th,
                                        double ph, double h) {
  auto d_u = [&](int a) {
    const double dt = a == 0 ? h : 0.0, dp = a == 1 ? h : 0.0;
    return (u(th + dt, ph + dp) - u(th - dt, ph - dp)) / (2 * h);
  };
  auto d2_u = [&](int a, int b) {
    auto at = [&](double st, double sp) { return u(th + st, ph + sp); };
    if (a == b) {
      const double dt = a == 0 ? h : 0.0, dp = a == 1 ? h : 0.0;
      return (at(dt, dp) - 2 * at(0, 0) + at(-dt, -dp)) / (h * h);
    }
    return (at(h, h) - at(h, -h) - at(-h, h) + at(-h, -h)) / (4 * h * h);
  };
  auto comp = [](const std::array<double, 3>& m, int a, int b) { return (a == 0 && b == 0) ? m[0] : (a == 1 && b == 1) ? m[2] : m[1]; };
  auto dg = [&](int c, int a, int b) {
    const double dt = c == 0 ? h : 0.0, dp = c == 1 ? h : 0.0;
    return (comp(g(th + dt, ph + dp), a, b) - comp(g(th - dt, ph - dp), a, b)) / (2 * h);
  };
  const auto g0 = g(th, ph);
  const double det = g0[0] * g0[2] - g0[1] * g0[1];
  const double inv[2][2] = {{g0[2] / det, -g0[1] / det}, {-g0[1] / det, g0[0] / det}};
  double gamma[2][2][2];
  for (int c = 0; c < 2; ++c)
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        double s = 0.0;
        for (int d = 0; d < 2; ++d) s += 0.5 * inv[c][d] * (dg(a, d, b) + dg(b, d, a) - dg(d, a, b));
        gamma[c][a][b] = s;
      }
  std::array<double, 3> out{};
  const int pairs[3][2] = {{0, 0}, {0, 1}, {1, 1}};
  for (int k = 0; k < 3; ++k) {
    const int a = pairs[k][0], b = pairs[k][1];
    double v = d2_u(a, b);
    for (int c = 0; c < 2; ++c) v -= gamma[c][a][b] * d_u(c);
    out[k] = v;
  }
  return out;
}

// |T|^2 = g^ac g^bd T_ab T_cd with an explicit 2x2 inverse.
inline double brute_normsq(const std::array<double, 3>& g, const std::array<double, 3>& t) {
  const double det = g[0] * g[2] - g[1] * g[1];
  const double inv[2][2] = {{g[2] / det, -g[1] / det}, {-g[1] / det, g[0] / det}};
  const double T[2][2] = {{t[0], t[1]}, {t[1], t[2]}};
  double s = 0.0;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d) s += inv[a][c] * inv[b][d] * T[a][b] * T[c][d];
  return s;
}

// Geodesic distance from radius r_o to r in a Schwarzschild slice of mass
// m < 0, from the antiderivative of (r/(r + 2|m|))^(1/2).
inline double schwarzschild_distance(double m, double r_o, double r) {
  const double a = -2.0 * m;
  auto F = [a](double x) { return std::sqrt(x * (x + a)) - a * std::log(std::sqrt(x) + std::sqrt(x + a)); };
  return F(r) - F(r_o);
}

// Inverse of schwarzschild_distance by Newton iteration.
inline double schwarzschild_radius(double m, double r_o, double s) {
  double r = r_o + s;
  for (int i = 0; i < 60; ++i) r -= (schwarzschild_distance(m, r_o, r) - s) / std::sqrt(r / (r - 2.0 * m));
  return r;
}

// Random spectrum with degrees 1..lmax_used, fixed seed.
inline Spectrum random_spectrum(int lmax, int lmax_used, unsigned seed, double amplitude = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Spectrum s(lmax);
  for (int l = 1; l <= lmax_used; ++l)
    for (int m = -l; m <= l; ++m) s(l, m) = amplitude * n(rng) / (1.0 + l * l);
  return s;
}

}  // namespace collarkit::reference
