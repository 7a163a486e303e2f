#pragma once

#include "collarkit/fields.hpp"

namespace collarkit {

double total_area(const ConformalMetric& metric);
/// r with area = 4 pi r^2.
double area_radius(const ConformalMetric& metric);

/// Integral of f against the metric area element.
double integrate(const ConformalMetric& metric, const ScalarField& f);

/// K = scale^-1 exp(-2v) (1 - Lap_round v).
ScalarField gauss_curvature(const ConformalMetric& metric);

/// Laplace-Beltrami of the unit round sphere, spectral. Nonpositive spectrum.
ScalarField round_laplacian(const ScalarField& u);

/// Laplace-Beltrami of the metric: scale^-1 exp(-2v) Lap_round u.
ScalarField laplacian(const ConformalMetric& metric, const ScalarField& u);

/// Solves Lap_metric u = f with zero metric mean.
///
/// Throws NonZeroMean when |int f| > tolerance * max(1, int |f|), both
/// integrals taken in the metric measure.
ScalarField laplace_solve(const ConformalMetric& metric, const ScalarField& f, double tolerance = 1e-10);

struct CoordinateGradient {
  ScalarField dtheta;
  ScalarField dphi;
};
CoordinateGradient coordinate_gradient(const ScalarField& u);

/// Second covariant derivative of u for the metric's Levi-Civita connection.
SymTensorField hessian(const ConformalMetric& metric, const ScalarField& u);

/// Components of the metric tensor itself.
SymTensorField metric_tensor(const ConformalMetric& metric);

struct TraceAndNorm {
  ScalarField trace;
  ScalarField normsq;
};
TraceAndNorm tensor_trace_and_norm(const ConformalMetric& metric, const SymTensorField& t);

SymTensorField trace_free_part(const ConformalMetric& metric, const SymTensorField& t);

/// Sup norms of a field and its round-sphere covariant derivatives. These are
/// the discrete stand-ins for Holder-type norms.
struct SupNorms {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};
SupNorms sup_norms(const ScalarField& f);

}  // namespace collarkit
