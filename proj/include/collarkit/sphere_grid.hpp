#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace collarkit {

/// Real orthonormal spherical-harmonic coefficients up to degree lmax.
///
/// Basis: Y_l0 = P_l0(cos th), Y_lm = sqrt(2) P_lm(cos th) cos(m ph) and
/// Y_l,-m = sqrt(2) P_lm(cos th) sin(m ph) for m > 0, with P_lm the fully
/// normalized associated Legendre functions without Condon-Shortley phase.
/// Each Y has unit L2 norm on the unit sphere.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(int lmax) : lmax_(lmax), c_(static_cast<std::size_t>((lmax + 1) * (lmax + 1)), 0.0) {}

  int lmax() const { return lmax_; }
  static std::size_t index(int l, int m) { return static_cast<std::size_t>(l * l + l + m); }

  double& operator()(int l, int m) { return c_[index(l, m)]; }
  double operator()(int l, int m) const { return c_[index(l, m)]; }

  std::span<double> data() { return c_; }
  std::span<const double> data() const { return c_; }

 private:
  int lmax_ = 0;
  std::vector<double> c_;
};

/// Value and first coordinate derivatives of a spectral expansion at a point.
struct PointValue {
  double value = 0.0;
  double dtheta = 0.0;
  double dphi = 0.0;
};

/// Gauss-Legendre (colatitude) x equispaced (longitude) grid on S^2 with the
/// matching spherical-harmonic transforms.
///
/// Nodes are stored latitude-major: index = i * nlon + j. No node lies on a
/// pole. The grid is immutable after construction and its tables are shared
/// read-only, so one instance may be used from several threads.
class SphereGrid {
 public:
  /// nlat = lmax + 1 and nlon = 2 lmax + 1, the smallest sizes that integrate
  /// products of two band-limited fields exactly.
  explicit SphereGrid(int lmax);
  SphereGrid(int lmax, int nlat, int nlon);

  int lmax() const { return lmax_; }
  int nlat() const { return nlat_; }
  int nlon() const { return nlon_; }
  std::size_t size() const { return static_cast<std::size_t>(nlat_) * static_cast<std::size_t>(nlon_); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(i) * nlon_ + j; }
  int lat_of(std::size_t node) const { return static_cast<int>(node / nlon_); }
  int lon_of(std::size_t node) const { return static_cast<int>(node % nlon_); }

  double theta(int i) const { return theta_[i]; }
  double cos_theta(int i) const { return cos_theta_[i]; }
  double sin_theta(int i) const { return sin_theta_[i]; }
  double phi(int j) const;
  /// Quadrature weight of any node on latitude i (steradian).
  double weight(int i) const { return weight_[i]; }

  /// Quadrature of grid values against the round area element.
  double integrate(std::span<const double> values) const;

  Spectrum analyze(std::span<const double> values) const;
  std::vector<double> synthesize(const Spectrum& s) const;
  std::vector<double> synthesize_dtheta(const Spectrum& s) const;
  std::vector<double> synthesize_dphi(const Spectrum& s) const;
  std::vector<double> synthesize_dthetadphi(const Spectrum& s) const;
  std::vector<double> synthesize_dphidphi(const Spectrum& s) const;

  /// Evaluates the expansion at an arbitrary point, 0 < theta < pi.
  static PointValue evaluate(const Spectrum& s, double theta, double phi);

  /// Fully normalized P_lm(cos theta) and dP_lm/dtheta for 0 <= m <= l <= lmax,
  /// packed with index l(l+1)/2 + m.
  static void legendre(int lmax, double theta, std::span<double> p, std::span<double> dp);
  static std::size_t legendre_index(int l, int m) { return static_cast<std::size_t>(l * (l + 1) / 2 + m); }

 private:
  enum class ThetaTable { Value, Derivative };
  enum class PhiOp { Value, Derivative, SecondDerivative };
  std::vector<double> synthesize_impl(const Spectrum& s, ThetaTable table, PhiOp op) const;

  int lmax_;
  int nlat_;
  int nlon_;
  std::vector<double> theta_, cos_theta_, sin_theta_, weight_;
  std::vector<double> plm_;   // [i][legendre_index]
  std::vector<double> dplm_;  // [i][legendre_index]
  std::vector<double> cos_mphi_, sin_mphi_;  // [m][j]
};

using GridPtr = std::shared_ptr<const SphereGrid>;

/// Shared grid instance for a given band limit.
GridPtr make_grid(int lmax);

}  // namespace collarkit
