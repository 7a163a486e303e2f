#pragma once

#include <vector>

namespace collarkit {

/// u_m(s) with u(0) = r_o, u' = (1 - 2m/u)^(1/2), u'' = m/u^2: the area radius
/// of a Schwarzschild sphere at geodesic distance s from radius r_o.
///
/// Integrated as the second-order system (u, u') with classical RK4, which
/// stays regular at the horizon start m = r_o/2 where the first-order form
/// has a square-root singularity. The table extends a few steps past both ends
/// so that difference stencils fit at every sample of [0, s_max].
class SchwarzschildProfile {
 public:
  SchwarzschildProfile() = default;

  double m() const { return m_; }
  double r_o() const { return r_o_; }
  double s_max() const { return s_max_; }
  double step() const { return h_; }

  /// Cubic Hermite dense output on [0, s_max].
  double u(double s) const;
  double du(double s) const;

  /// Samples on [0, s_max], step() apart.
  std::vector<double> samples_s() const;
  std::vector<double> samples_u() const;

  /// max |u'' - m/u^2| with u'' from a five-point difference of the table.
  double max_second_order_residual() const;
  /// max |u'^2 - (1 - 2m/u)|, the first-order form squared.
  double max_first_order_residual() const;
  /// u(s) <= r_o + (1 - 2m/r_o)^(1/2) s for m < 0, u(s) <= r_o + s for m >= 0.
  bool growth_bound_holds() const;
  double growth_bound(double s) const;

  friend SchwarzschildProfile integrate_profile(double m, double r_o, double s_max, double step);

 private:
  double m_ = 0.0, r_o_ = 1.0, s_max_ = 0.0, h_ = 0.0;
  int n_ = 0;       // intervals on [0, s_max]
  int pad_ = 4;     // extra samples on each side
  std::vector<double> u_, p_;
  std::size_t locate(double s, double& tau) const;
};

inline constexpr double kProfileStepFraction = 1e-3;

/// m <= r_o/2, allowing for rounding in an r_o obtained by quadrature.
inline bool mass_within_horizon_bound(double m, double r_o) { return m <= 0.5 * r_o * (1.0 + 1e-12); }

/// Throws MassTooLarge when m > r_o/2 and DomainError for s_max <= 0. A zero
/// step selects the default 1e-3 r_o; any step is shrunk so that s_max is a
/// whole number of steps.
SchwarzschildProfile integrate_profile(double m, double r_o, double s_max, double step = 0.0);

}  // namespace collarkit
