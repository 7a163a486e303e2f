#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "collarkit/sphere_grid.hpp"

namespace collarkit {

/// Real value per grid node.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double value = 0.0);
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField from_function(GridPtr grid, const std::function<double(double theta, double phi)>& f);
  static ScalarField from_spectrum(GridPtr grid, const Spectrum& s);

  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  Spectrum spectrum() const { return grid_->analyze(values_); }
  /// Projection onto degrees <= lmax.
  ScalarField band_limited() const;

  double min() const;
  double max() const;
  double max_abs() const;
  std::size_t argmin() const;
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(const ScalarField& o);
  ScalarField& operator+=(double c);
  ScalarField& operator*=(double c);

  template <class F>
  ScalarField map(F f) const {
    ScalarField out(grid_);
    for (std::size_t i = 0; i < values_.size(); ++i) out.values_[i] = f(values_[i]);
    return out;
  }

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(ScalarField a, const ScalarField& b);
ScalarField operator*(double c, ScalarField a);
ScalarField operator+(ScalarField a, double c);

/// Metric scale * exp(2 v) * g_round on S^2; g_round is the unit sphere metric.
struct ConformalMetric {
  ScalarField v;
  double scale = 1.0;

  const SphereGrid& grid() const { return v.grid(); }
  const GridPtr& grid_ptr() const { return v.grid_ptr(); }

  static ConformalMetric round(GridPtr grid, double scale = 1.0) { return {ScalarField(std::move(grid), 0.0), scale}; }
  /// Area density relative to the round measure, scale * exp(2 v).
  ScalarField density() const;
};

/// Symmetric covariant 2-tensor in the (theta, phi) coordinate frame.
struct SymTensorField {
  ScalarField tt;
  ScalarField tp;
  ScalarField pp;

  SymTensorField() = default;
  explicit SymTensorField(const GridPtr& grid) : tt(grid), tp(grid), pp(grid) {}
  SymTensorField(ScalarField a, ScalarField b, ScalarField c) : tt(std::move(a)), tp(std::move(b)), pp(std::move(c)) {}

  SymTensorField& operator+=(const SymTensorField& o);
  SymTensorField& operator*=(double c);
};

SymTensorField operator+(SymTensorField a, const SymTensorField& b);
SymTensorField operator*(double c, SymTensorField a);

}  // namespace collarkit
