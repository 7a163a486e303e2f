#include "collarkit/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace collarkit {

ScalarField::ScalarField(GridPtr grid, double value) : grid_(std::move(grid)), values_(grid_->size(), value) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_->size()) throw std::invalid_argument("ScalarField: value count does not match grid");
}

ScalarField ScalarField::from_function(GridPtr grid, const std::function<double(double, double)>& f) {
  ScalarField out(grid);
  for (int i = 0; i < grid->nlat(); ++i) {
    for (int j = 0; j < grid->nlon(); ++j) out[grid->index(i, j)] = f(grid->theta(i), grid->phi(j));
  }
  return out;
}

ScalarField ScalarField::from_spectrum(GridPtr grid, const Spectrum& s) {
  auto values = grid->synthesize(s);
  return ScalarField(std::move(grid), std::move(values));
}

ScalarField ScalarField::band_limited() const { return from_spectrum(grid_, spectrum()); }

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double x : values_) m = std::max(m, std::abs(x));
  return m;
}

std::size_t ScalarField::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) - values_.begin());
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return std::isfinite(x); });
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator-=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator*=(const ScalarField& o) {
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] *= o.values_[i];
  return *this;
}
ScalarField& ScalarField::operator+=(double c) {
  for (double& x : values_) x += c;
  return *this;
}
ScalarField& ScalarField::operator*=(double c) {
  for (double& x : values_) x *= c;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(ScalarField a, const ScalarField& b) { return a *= b; }
ScalarField operator*(double c, ScalarField a) { return a *= c; }
ScalarField operator+(ScalarField a, double c) { return a += c; }

ScalarField ConformalMetric::density() const {
  const double s = scale;
  return v.map([s](double x) { return s * std::exp(2.0 * x); });
}

SymTensorField& SymTensorField::operator+=(const SymTensorField& o) {
  tt += o.tt;
  tp += o.tp;
  pp += o.pp;
  return *this;
}

SymTensorField& SymTensorField::operator*=(double c) {
  tt *= c;
  tp *= c;
  pp *= c;
  return *this;
}

SymTensorField operator+(SymTensorField a, const SymTensorField& b) { return a += b; }
SymTensorField operator*(double c, SymTensorField a) { return a *= c; }

}  // namespace collarkit
