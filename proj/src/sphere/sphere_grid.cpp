#include "collarkit/sphere_grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace collarkit {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes on [-1, 1], returned in decreasing order of x so that
// colatitude increases with the latitude index.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // one more evaluation at the converged node for the weight
    double p0 = 1.0, p1 = 0.0;
    for (int k = 1; k <= n; ++k) {
      const double p2 = p1;
      p1 = p0;
      p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
    }
    dp = n * (z * p0 - p1) / (z * z - 1.0);
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
}

}  // namespace

SphereGrid::SphereGrid(int lmax) : SphereGrid(lmax, lmax + 1, 2 * lmax + 1) {}

SphereGrid::SphereGrid(int lmax, int nlat, int nlon) : lmax_(lmax), nlat_(nlat), nlon_(nlon) {
  if (lmax < 0) throw std::invalid_argument("SphereGrid: lmax must be nonnegative");
  if (nlat < lmax + 1 || nlon < 2 * lmax + 1) {
    throw std::invalid_argument("SphereGrid: need nlat >= lmax+1 and nlon >= 2 lmax+1 (lmax=" + std::to_string(lmax) +
                                ", nlat=" + std::to_string(nlat) + ", nlon=" + std::to_string(nlon) + ")");
  }

  std::vector<double> x, w;
  gauss_legendre(nlat_, x, w);
  theta_.resize(nlat_);
  cos_theta_.resize(nlat_);
  sin_theta_.resize(nlat_);
  weight_.resize(nlat_);
  for (int i = 0; i < nlat_; ++i) {
    cos_theta_[i] = x[i];
    sin_theta_[i] = std::sqrt((1.0 - x[i]) * (1.0 + x[i]));
    theta_[i] = std::acos(x[i]);
    weight_[i] = w[i] * 2.0 * kPi / nlon_;
  }

  const std::size_t nleg = legendre_index(lmax_, lmax_) + 1;
  plm_.resize(nleg * nlat_);
  dplm_.resize(nleg * nlat_);
  for (int i = 0; i < nlat_; ++i) {
    legendre(lmax_, theta_[i], std::span(plm_).subspan(i * nleg, nleg), std::span(dplm_).subspan(i * nleg, nleg));
  }

  cos_mphi_.resize(static_cast<std::size_t>(lmax_ + 1) * nlon_);
  sin_mphi_.resize(static_cast<std::size_t>(lmax_ + 1) * nlon_);
  for (int m = 0; m <= lmax_; ++m) {
    for (int j = 0; j < nlon_; ++j) {
      // reduce the product m*j before scaling to keep the angle small
      const double ang = 2.0 * kPi * static_cast<double>((m * j) % nlon_) / nlon_;
      cos_mphi_[static_cast<std::size_t>(m) * nlon_ + j] = std::cos(ang);
      sin_mphi_[static_cast<std::size_t>(m) * nlon_ + j] = std::sin(ang);
    }
  }
}

double SphereGrid::phi(int j) const { return 2.0 * kPi * j / nlon_; }

void SphereGrid::legendre(int lmax, double theta, std::span<double> p, std::span<double> dp) {
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  for (int m = 0; m <= lmax; ++m) {
    double pmm;
    if (m == 0) {
      pmm = std::sqrt(1.0 / (4.0 * kPi));
    } else {
      pmm = p[legendre_index(m - 1, m - 1)] * std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
    }
    p[legendre_index(m, m)] = pmm;
    if (m + 1 <= lmax) p[legendre_index(m + 1, m)] = std::sqrt(2.0 * m + 3.0) * x * pmm;
    for (int l = m + 2; l <= lmax; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - static_cast<double>(m) * m));
      const double b = std::sqrt((static_cast<double>(l - 1) * (l - 1) - static_cast<double>(m) * m) /
                                 (4.0 * (l - 1) * (l - 1) - 1.0));
      p[legendre_index(l, m)] = a * (x * p[legendre_index(l - 1, m)] - b * p[legendre_index(l - 2, m)]);
    }
  }
  // dP_lm/dtheta = [l x P_lm - sqrt((2l+1)/(2l-1) (l^2-m^2)) P_{l-1,m}] / sin(theta)
  for (int m = 0; m <= lmax; ++m) {
    for (int l = m; l <= lmax; ++l) {
      double val = l * x * p[legendre_index(l, m)];
      if (l > m) {
        val -= std::sqrt((2.0 * l + 1.0) / (2.0 * l - 1.0) * (static_cast<double>(l) * l - static_cast<double>(m) * m)) *
               p[legendre_index(l - 1, m)];
      }
      dp[legendre_index(l, m)] = val / s;
    }
  }
}

double SphereGrid::integrate(std::span<const double> values) const {
  double total = 0.0;
  for (int i = 0; i < nlat_; ++i) {
    double row = 0.0;
    for (int j = 0; j < nlon_; ++j) row += values[index(i, j)];
    total += weight_[i] * row;
  }
  return total;
}

Spectrum SphereGrid::analyze(std::span<const double> values) const {
  if (values.size() != size()) throw std::invalid_argument("SphereGrid::analyze: size mismatch");
  Spectrum out(lmax_);
  const std::size_t nleg = legendre_index(lmax_, lmax_) + 1;
  std::vector<double> a(lmax_ + 1), b(lmax_ + 1);
  for (int i = 0; i < nlat_; ++i) {
    const double* row = values.data() + index(i, 0);
    for (int m = 0; m <= lmax_; ++m) {
      const double* c = cos_mphi_.data() + static_cast<std::size_t>(m) * nlon_;
      const double* sn = sin_mphi_.data() + static_cast<std::size_t>(m) * nlon_;
      double sa = 0.0, sb = 0.0;
      for (int j = 0; j < nlon_; ++j) {
        sa += row[j] * c[j];
        sb += row[j] * sn[j];
      }
      a[m] = sa * weight_[i];
      b[m] = sb * weight_[i];
    }
    const double* p = plm_.data() + i * nleg;
    for (int l = 0; l <= lmax_; ++l) out(l, 0) += a[0] * p[legendre_index(l, 0)];
    for (int m = 1; m <= lmax_; ++m) {
      for (int l = m; l <= lmax_; ++l) {
        const double pl = std::numbers::sqrt2 * p[legendre_index(l, m)];
        out(l, m) += a[m] * pl;
        out(l, -m) += b[m] * pl;
      }
    }
  }
  return out;
}

std::vector<double> SphereGrid::synthesize_impl(const Spectrum& s, ThetaTable table, PhiOp op) const {
  const int L = std::min(s.lmax(), lmax_);
  std::vector<double> out(size(), 0.0);
  const std::size_t nleg = legendre_index(lmax_, lmax_) + 1;
  const std::vector<double>& tab = table == ThetaTable::Value ? plm_ : dplm_;
  std::vector<double> cm(L + 1), sm(L + 1);
  for (int i = 0; i < nlat_; ++i) {
    const double* p = tab.data() + i * nleg;
    for (int m = 0; m <= L; ++m) {
      double ca = 0.0, sa = 0.0;
      for (int l = m; l <= L; ++l) {
        ca += s(l, m) * p[legendre_index(l, m)];
        if (m > 0) sa += s(l, -m) * p[legendre_index(l, m)];
      }
      const double f = m == 0 ? 1.0 : std::numbers::sqrt2;
      cm[m] = f * ca;
      sm[m] = f * sa;
    }
    double* row = out.data() + index(i, 0);
    for (int m = 0; m <= L; ++m) {
      // coefficients multiplying cos(m ph) and sin(m ph) after the phi operation
      double cc = cm[m], ss = sm[m];
      switch (op) {
        case PhiOp::Value:
          break;
        case PhiOp::Derivative:
          cc = m * sm[m];
          ss = -m * cm[m];
          break;
        case PhiOp::SecondDerivative:
          cc = -static_cast<double>(m) * m * cm[m];
          ss = -static_cast<double>(m) * m * sm[m];
          break;
      }
      if (cc == 0.0 && ss == 0.0) continue;
      const double* c = cos_mphi_.data() + static_cast<std::size_t>(m) * nlon_;
      const double* sn = sin_mphi_.data() + static_cast<std::size_t>(m) * nlon_;
      for (int j = 0; j < nlon_; ++j) row[j] += cc * c[j] + ss * sn[j];
    }
  }
  return out;
}

std::vector<double> SphereGrid::synthesize(const Spectrum& s) const {
  return synthesize_impl(s, ThetaTable::Value, PhiOp::Value);
}
std::vector<double> SphereGrid::synthesize_dtheta(const Spectrum& s) const {
  return synthesize_impl(s, ThetaTable::Derivative, PhiOp::Value);
}
std::vector<double> SphereGrid::synthesize_dphi(const Spectrum& s) const {
  return synthesize_impl(s, ThetaTable::Value, PhiOp::Derivative);
}
std::vector<double> SphereGrid::synthesize_dthetadphi(const Spectrum& s) const {
  return synthesize_impl(s, ThetaTable::Derivative, PhiOp::Derivative);
}
std::vector<double> SphereGrid::synthesize_dphidphi(const Spectrum& s) const {
  return synthesize_impl(s, ThetaTable::Value, PhiOp::SecondDerivative);
}

PointValue SphereGrid::evaluate(const Spectrum& s, double theta, double phi) {
  const int L = s.lmax();
  std::vector<double> p(legendre_index(L, L) + 1), dp(p.size());
  legendre(L, theta, p, dp);
  PointValue out;
  for (int m = 0; m <= L; ++m) {
    const double f = m == 0 ? 1.0 : std::numbers::sqrt2;
    const double c = std::cos(m * phi), sn = std::sin(m * phi);
    for (int l = m; l <= L; ++l) {
      const double a = s(l, m);
      const double b = m > 0 ? s(l, -m) : 0.0;
      const double angular = a * c + b * sn;
      out.value += f * p[legendre_index(l, m)] * angular;
      out.dtheta += f * dp[legendre_index(l, m)] * angular;
      out.dphi += f * p[legendre_index(l, m)] * m * (b * c - a * sn);
    }
  }
  return out;
}

GridPtr make_grid(int lmax) {
  static std::mutex mu;
  static std::map<int, std::weak_ptr<const SphereGrid>> cache;
  std::lock_guard lock(mu);
  if (auto it = cache.find(lmax); it != cache.end()) {
    if (auto sp = it->second.lock()) return sp;
  }
  auto sp = std::make_shared<const SphereGrid>(lmax);
  cache[lmax] = sp;
  return sp;
}

}  // namespace collarkit
