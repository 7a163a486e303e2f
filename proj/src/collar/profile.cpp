#include "collarkit/profile.hpp"

#include <algorithm>
#include <cmath>

#include "collarkit/errors.hpp"

namespace collarkit {

namespace {

struct State {
  double u, p;
};

State rk4_step(State y, double h, double m) {
  auto f = [m](State s) { return State{s.p, m / (s.u * s.u)}; };
  const State k1 = f(y);
  const State k2 = f({y.u + 0.5 * h * k1.u, y.p + 0.5 * h * k1.p});
  const State k3 = f({y.u + 0.5 * h * k2.u, y.p + 0.5 * h * k2.p});
  const State k4 = f({y.u + h * k3.u, y.p + h * k3.p});
  return {y.u + h / 6.0 * (k1.u + 2 * k2.u + 2 * k3.u + k4.u), y.p + h / 6.0 * (k1.p + 2 * k2.p + 2 * k3.p + k4.p)};
}

}  // namespace

SchwarzschildProfile integrate_profile(double m, double r_o, double s_max, double step) {
  if (!(r_o > 0.0)) throw DomainError("r_o must be positive");
  if (!mass_within_horizon_bound(m, r_o)) throw MassTooLarge(m, r_o);
  if (!(s_max > 0.0) || !std::isfinite(s_max)) throw DomainError("s_max must be positive and finite");
  if (step <= 0.0) step = kProfileStepFraction * r_o;

  SchwarzschildProfile prof;
  prof.m_ = m;
  prof.r_o_ = r_o;
  prof.s_max_ = s_max;
  prof.n_ = std::max(1, static_cast<int>(std::ceil(s_max / step - 1e-9)));
  prof.h_ = s_max / prof.n_;

  const int pad = prof.pad_;
  const std::size_t total = static_cast<std::size_t>(prof.n_ + 1 + 2 * pad);
  prof.u_.assign(total, 0.0);
  prof.p_.assign(total, 0.0);
  const State start{r_o, std::sqrt(std::max(0.0, 1.0 - 2.0 * m / r_o))};
  prof.u_[pad] = start.u;
  prof.p_[pad] = start.p;

  State y = start;
  for (std::size_t i = pad + 1; i < total; ++i) {
    y = rk4_step(y, prof.h_, m);
    prof.u_[i] = y.u;
    prof.p_[i] = y.p;
  }
  y = start;
  for (int i = pad - 1; i >= 0; --i) {
    y = rk4_step(y, -prof.h_, m);
    prof.u_[i] = y.u;
    prof.p_[i] = y.p;
  }
  return prof;
}

std::size_t SchwarzschildProfile::locate(double s, double& tau) const {
  if (!(s >= -1e-12 * s_max_ && s <= s_max_ * (1 + 1e-12))) throw DomainError("profile evaluated outside [0, s_max]");
  const double x = std::clamp(s / h_, 0.0, static_cast<double>(n_));
  const std::size_t i = std::min(static_cast<std::size_t>(x), static_cast<std::size_t>(n_ - 1));
  tau = x - static_cast<double>(i);
  return i + pad_;
}

double SchwarzschildProfile::u(double s) const {
  double t = 0.0;
  const std::size_t i = locate(s, t);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  return h00 * u_[i] + h10 * h_ * p_[i] + h01 * u_[i + 1] + h11 * h_ * p_[i + 1];
}

double SchwarzschildProfile::du(double s) const {
  // Hermite interpolation of u' with its exact derivative m/u^2
  double t = 0.0;
  const std::size_t i = locate(s, t);
  const double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  const double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  const double a0 = m_ / (u_[i] * u_[i]), a1 = m_ / (u_[i + 1] * u_[i + 1]);
  return h00 * p_[i] + h10 * h_ * a0 + h01 * p_[i + 1] + h11 * h_ * a1;
}

std::vector<double> SchwarzschildProfile::samples_s() const {
  std::vector<double> s(static_cast<std::size_t>(n_ + 1));
  for (int i = 0; i <= n_; ++i) s[i] = i * h_;
  return s;
}

std::vector<double> SchwarzschildProfile::samples_u() const {
  return {u_.begin() + pad_, u_.begin() + pad_ + n_ + 1};
}

double SchwarzschildProfile::max_second_order_residual() const {
  // stride-2 stencil: four times less roundoff amplification than stride 1
  const double h2 = 2.0 * h_;
  double worst = 0.0;
  for (int i = pad_; i <= pad_ + n_; ++i) {
    const double d2 = (-u_[i - 4] + 16 * u_[i - 2] - 30 * u_[i] + 16 * u_[i + 2] - u_[i + 4]) / (12 * h2 * h2);
    worst = std::max(worst, std::abs(d2 - m_ / (u_[i] * u_[i])));
  }
  return worst;
}

double SchwarzschildProfile::max_first_order_residual() const {
  double worst = 0.0;
  for (int i = pad_; i <= pad_ + n_; ++i) {
    worst = std::max(worst, std::abs(p_[i] * p_[i] - (1.0 - 2.0 * m_ / u_[i])));
    if (p_[i] < 0.0) worst = std::max(worst, -p_[i]);
  }
  return worst;
}

double SchwarzschildProfile::growth_bound(double s) const {
  return m_ < 0.0 ? r_o_ + std::sqrt(1.0 - 2.0 * m_ / r_o_) * s : r_o_ + s;
}

bool SchwarzschildProfile::growth_bound_holds() const {
  for (int i = 0; i <= n_; ++i) {
    const double s = i * h_;
    if (u_[pad_ + i] > growth_bound(s) * (1.0 + 1e-14)) return false;
  }
  return true;
}

}  // namespace collarkit
