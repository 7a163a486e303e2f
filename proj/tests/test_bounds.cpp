#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "collarkit/bounds.hpp"
#include "collarkit/errors.hpp"
#include "oracles.hpp"

using namespace collarkit;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

PathInvariants invariants(double alpha, double beta) {
  PathInvariants inv;
  inv.alpha = alpha;
  inv.beta = beta;
  inv.kappa_lb = beta / (1 + alpha);
  inv.eta_lb = alpha > 0 ? beta / alpha : kInf;
  return inv;
}

// H_o giving W on a sphere of area radius r_o.
double H_for(double W, double r_o) { return 2.0 * std::sqrt(W) / r_o; }

}  // namespace

TEST_CASE("surface data") {
  SurfaceData a = surface_data(1.0, 2.0);
  CHECK(a.W == doctest::Approx(1.0));
  CHECK(std::abs(a.m_H) <= 1e-15);
  SurfaceData b = surface_data(2.0, 0.5);
  CHECK(b.W == doctest::Approx(0.25));
  CHECK(b.m_H == doctest::Approx(0.75));
  SurfaceData c = surface_data(1.0, 1.0);
  CHECK(c.W == doctest::Approx(0.25));
  CHECK(c.m_H == doctest::Approx(0.375));

  // metric version agrees with the parameter version on a round sphere
  const ConformalMetric g = ConformalMetric::round(make_grid(8), 4.0);
  SurfaceData d = surface_data(g, 0.5);
  CHECK(d.r_o == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(d.W == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(d.m_H == doctest::Approx(0.75).epsilon(1e-13));
  CHECK_THROWS_AS(surface_data(g, -1.0), DomainError);
}

TEST_CASE("eta theorems") {
  const SurfaceData sd = surface_data(1.0, 1.0);
  BoundReport r = thm11_rhs(sd, kInf);
  CHECK(r.applicable);
  CHECK(r.rhs == doctest::Approx(0.375));
  CHECK(thm11_rhs(sd, 1.25).rhs == doctest::Approx(0.625));
  CHECK_FALSE(thm11_rhs(sd, 0.25).applicable);
  CHECK_FALSE(thm11_rhs(sd, 0.2).applicable);
  CHECK(std::isnan(thm11_rhs(sd, 0.2).rhs));

  // certificate values
  BoundReport c = thm12_check(surface_data(1.0, H_for(0.5, 1.0)), 1.0);
  CHECK(c.rhs == doctest::Approx(0.75));
  CHECK(*c.holds);
  c = thm12_check(surface_data(1.0, H_for(0.9, 1.0)), 1.0);
  CHECK(c.rhs == doctest::Approx(1.55));
  CHECK(*c.holds);
  c = thm12_check(surface_data(1.0, H_for(0.9, 1.0)), kInf);
  CHECK(c.rhs == doctest::Approx(0.05));
  // round certificate m_H >= 0 holds exactly up to W = 1
  CHECK(*thm12_check(surface_data(1.0, 2.0), kInf).holds);
  CHECK_FALSE(*thm12_check(surface_data(1.0, 2.1), kInf).holds);
}

TEST_CASE("alpha-beta and kappa theorems") {
  const SurfaceData sd = surface_data(1.0, 1.0);
  CHECK(thm14_rhs(sd, 0.0, 1.0).rhs == doctest::Approx(sd.m_H));
  CHECK(thm14_rhs(sd, 0.01, 0.95).rhs == doctest::Approx((std::sqrt(0.0025 / 0.6975) + 1) * 0.375).epsilon(1e-14));
  CHECK_FALSE(thm14_rhs(sd, 0.01, 0.2525).applicable);
  CHECK(thm14_rhs(sd, 0.01, 0.2526).applicable);
  CHECK_THROWS_AS(thm14_rhs(sd, -0.1, 0.9), DomainError);
  CHECK_THROWS_AS(thm14_rhs(sd, 0.1, 1.1), DomainError);

  CHECK(thm44_rhs(sd, 1.0).rhs == doctest::Approx((std::sqrt(0.25 / 0.75) + 1) * 0.375).epsilon(1e-14));
  CHECK_FALSE(thm44_rhs(surface_data(1.0, 2.0), 1.0).applicable);
  CHECK(thm44_rhs(surface_data(1.0, 0.0), 0.7).rhs == doctest::Approx(0.5));
  CHECK(thm44_rhs(surface_data(1.0, 1e-9), 0.7).rhs == doctest::Approx(0.5));
  CHECK_THROWS_AS(thm44_rhs(sd, 0.0), DomainError);
}

TEST_CASE("negative mass family") {
  const double W = 0.3, alpha = 0.05, beta = 0.9;
  const SurfaceData sd = surface_data(1.0, H_for(W, 1.0));
  const PathInvariants inv = invariants(alpha, beta);
  const double closed = 0.5 * std::sqrt(W * alpha / (beta - W * alpha)) + sd.m_H;
  CHECK(thm31_family(sd, inv, -kInf).rhs == doctest::Approx(closed).epsilon(1e-15));
  CHECK(std::abs(thm31_family(sd, inv, -1e8).rhs - closed) <= 1e-6);
  CHECK(thm31_family(sd, invariants(0.0, 1.0), -2.0).rhs == doctest::Approx(sd.m_H).epsilon(1e-15));

  // rhs - m_H is Psi at x = k^2
  for (double m : {-0.1, -1.0, -5.0, -40.0}) {
    const BoundReport r = thm31_family(sd, inv, m);
    const double x = W / (1 - 2 * m);
    CHECK(*r.k * *r.k == doctest::Approx(x).epsilon(1e-14));
    CHECK(r.rhs - sd.m_H == doctest::Approx(psi(x, beta - alpha * W, alpha, W, 1.0)).epsilon(1e-13));
  }
  // b - k^2 <= 0 close to m = 0 when b < W
  const SurfaceData tight = surface_data(1.0, H_for(0.8, 1.0));
  const PathInvariants low = invariants(0.05, 0.6);
  CHECK_THROWS_AS(thm31_family(tight, low, -0.01), Inadmissible);
  CHECK_NOTHROW(thm31_family(tight, low, -10.0));
  CHECK_THROWS_AS(thm31_family(sd, inv, 0.0), DomainError);
}

TEST_CASE("nonnegative mass family") {
  const SurfaceData sd = surface_data(1.0, 1.0);
  const PathInvariants inv = invariants(0.01, 0.95);
  const BoundReport r = thm32_family(sd, inv, 0.0);
  const double closed = std::sqrt(0.0025 / 0.6975) * 0.375 + 0.375;
  CHECK(std::abs(r.rhs - closed) <= 1e-12);
  const double kappa = 0.95 / 1.01;
  CHECK(std::abs(*r.weakened_rhs - (std::sqrt(0.25 / (kappa - 0.25)) + 1) * 0.375) <= 1e-12);
  CHECK(*r.weakened_rhs >= r.rhs);
  CHECK(thm32_family(sd, invariants(0.0, 1.0), 0.2).rhs == doctest::Approx(sd.m_H).epsilon(1e-15));

  // admissible up to m < (1 - W/kappa)/2
  const double m_sup = 0.5 * (1 - 0.25 / kappa);
  CHECK_NOTHROW(thm32_family(sd, inv, 0.999 * m_sup));
  CHECK_THROWS_AS(thm32_family(sd, inv, 1.001 * m_sup), Inadmissible);
  CHECK_THROWS_AS(thm32_family(sd, inv, -0.1), DomainError);
  CHECK_THROWS_AS(thm32_family(sd, inv, 0.5), DomainError);

  // rhs - m_H is Phi at x = k^2
  for (double m : {0.0, 0.1, 0.3}) {
    const BoundReport s = thm32_family(sd, inv, m);
    CHECK(s.rhs - sd.m_H == doctest::Approx(phi(*s.k * *s.k, kappa, 0.01, 1.0)).epsilon(1e-13));
  }
}

TEST_CASE("m sweep of the nonnegative family matches the Phi minimizer") {
  // (kappa, W) covering cases a, b and c
  const std::vector<std::pair<double, double>> cases = {{0.5, 0.2}, {0.95, 0.8}, {0.95, 0.05}, {0.95, 0.3}};
  const double alpha = 0.05;
  for (auto [kappa, W] : cases) {
    const double beta = kappa * (1 + alpha);
    const SurfaceData sd = surface_data(1.0, H_for(W, 1.0));
    const PathInvariants inv = invariants(alpha, beta);
    const double m_sup = 0.5 * (1 - W / kappa);
    const int n = 20000;
    double best = kInf;
    for (int i = 0; i < n; ++i) {
      try {
        best = std::min(best, thm32_family(sd, inv, m_sup * i / n).rhs);
      } catch (const Inadmissible&) {
      }
    }
    const MinimizerResult mr = minimize_phi(kappa, alpha, 1.0, W);
    CAPTURE(kappa);
    CAPTURE(W);
    CHECK(best - sd.m_H >= mr.value - 1e-12);
    CHECK(best - sd.m_H - mr.value <= 1e-6);
  }
}

TEST_CASE("phi and psi") {
  CHECK(phi(0.0, 0.5, 0.1, 1.0) == 0.0);
  CHECK(phi(1e-12, 0.5, 0.1, 1.0) < 1e-6);
  CHECK(std::isinf(phi(0.5, 0.5, 0.1, 1.0)));
  CHECK(phi(0.5 - 1e-12, 0.5, 0.1, 1.0) > 100.0);
  CHECK_THROWS_AS(phi(0.6, 0.5, 0.1, 1.0), DomainError);
  CHECK_THROWS_AS(phi(-0.1, 0.5, 0.1, 1.0), DomainError);
  // alpha/(1+alpha) = 1 in the limit; evaluate through the prefactor directly
  const double big = 1e12;
  CHECK(phi(0.25, 0.5, big, 1.0) == doctest::Approx(0.375).epsilon(1e-11));
  CHECK(phi(0.25, 0.5, big, 3.0) == doctest::Approx(1.125).epsilon(1e-11));

  // psi(0) is the m -> -inf coefficient
  const double alpha = 0.05, W = 0.3, beta = 0.9, b = beta - alpha * W;
  CHECK(psi(0.0, b, alpha, W, 1.0) == doctest::Approx(0.5 * std::sqrt(W * alpha / (beta - alpha * W))).epsilon(1e-15));
  // psi(W) is the m -> 0- value, the m = 0 coefficient times m_H
  const double m_H = 0.5 * (1 - W);
  CHECK(psi(W, b, alpha, W, 1.0) ==
        doctest::Approx(std::sqrt(alpha * W / (beta - (1 + alpha) * W)) * m_H).epsilon(1e-14));
  CHECK(psi(0.25, 0.5, 1.0, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(std::isinf(psi(0.5, 0.5, 1.0, 1.0, 1.0)));
  CHECK_THROWS_AS(psi(0.6, 0.5, 1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(psi(0.1, 0.0, 1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("Phi minimizer case analysis") {
  // double root at kappa = 8/9
  MinimizerResult r = minimize_phi(8.0 / 9.0, 0.1, 1.0, 0.3);
  REQUIRE(r.x1);
  CHECK(*r.x1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(*r.x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(r.case_tag == "a");

  for (double W : {0.01, 0.2, 0.49}) {
    r = minimize_phi(0.5, 0.1, 1.0, W);
    CHECK(r.case_tag == "a");
    CHECK(r.x_star == W);
    CHECK_FALSE(r.x1);
  }

  // kappa = 0.95: x1,2 = (2.85 -+ sqrt(0.5225))/4
  const double x1 = (2.85 - std::sqrt(0.5225)) / 4, x2 = (2.85 + std::sqrt(0.5225)) / 4;
  r = minimize_phi(0.95, 0.1, 1.0, 0.1);
  CHECK(*r.x1 == doctest::Approx(x1).epsilon(1e-14));
  CHECK(*r.x2 == doctest::Approx(x2).epsilon(1e-14));
  CHECK(r.case_tag == "c");
  REQUIRE(r.candidates.size() == 2);
  CHECK(r.value == std::min(r.candidates[0].second, r.candidates[1].second));
  CHECK(minimize_phi(0.95, 0.1, 1.0, 0.5 * (x1 + x2)).case_tag == "b");
  CHECK(minimize_phi(0.95, 0.1, 1.0, 0.5 * (x1 + x2)).x_star == *r.x2);
  CHECK(minimize_phi(0.95, 0.1, 1.0, 0.5 * (x2 + 0.95)).case_tag == "a");
  // small W in case c picks x = W
  CHECK(minimize_phi(0.95, 0.1, 1.0, 1e-4).x_star == 1e-4);

  CHECK_THROWS_AS(minimize_phi(0.5, 0.1, 1.0, 0.5), HypothesisFailed);
  CHECK_THROWS_AS(minimize_phi(0.5, 0.1, 1.0, 0.7), HypothesisFailed);
  CHECK(minimize_phi(1.0, 0.0, 1.0, 0.5).value == 0.0);
}

TEST_CASE("Psi minimizer case analysis") {
  const double alpha = 0.1;
  MinimizerResult r = minimize_psi(0.4, alpha, 0.8, 1.0);
  CHECK(r.case_tag == "1a");
  CHECK(r.limit == LimitSide::FromAbove);
  CHECK(r.value == doctest::Approx(0.5 * std::sqrt(alpha * 0.8 / 0.4)).epsilon(1e-15));

  r = minimize_psi(0.7, alpha, 0.8, 1.0);
  CHECK(r.case_tag == "1b");
  CHECK(r.x_star == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(r.limit == LimitSide::Attained);

  CHECK(minimize_psi(0.4, alpha, 0.3, 1.0).case_tag == "2a");
  CHECK(minimize_psi(0.7, alpha, 0.5, 1.0).case_tag == "2b");
  CHECK(minimize_psi(0.7, alpha, 0.5, 1.0).x_star == doctest::Approx(0.4).epsilon(1e-15));

  // 2c: the infimum at x -> W- equals Phi at x = W
  const double W = 0.5, b = 0.9, beta = b + alpha * W, kappa = beta / (1 + alpha);
  r = minimize_psi(b, alpha, W, 1.0);
  CHECK(r.case_tag == "2c");
  CHECK(r.limit == LimitSide::FromBelow);
  CHECK(r.x_star == W);
  const MinimizerResult p = minimize_phi(kappa, alpha, 1.0, W);
  CHECK(p.x_star == W);
  CHECK(std::abs(r.value - p.value) <= 1e-12);

  CHECK_THROWS_AS(minimize_psi(0.0, alpha, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(minimize_psi(0.5, alpha, 0.0, 1.0), DomainError);
}

TEST_CASE("grid search") {
  const GridMinimum g = grid_search_min([](double x) { return (x - 0.5) * (x - 0.5); }, 0.0, 1.0, 100000);
  CHECK(std::abs(g.grid_x - 0.5) <= 1e-5);
  CHECK(std::abs(g.x - 0.5) <= 1e-7);
  // endpoint infimum: the grid stops one spacing short, polishing closes in
  const GridMinimum e = grid_search_min([](double x) { return x; }, 0.0, 1.0, 1000);
  CHECK(e.grid_x == doctest::Approx(1.0 / 1001));
  CHECK(e.x < 1e-12);
  CHECK(e.x > 0.0);
  CHECK_THROWS_AS(grid_search_min([](double x) { return x; }, 1.0, 0.0, 10), DomainError);
}

TEST_CASE("closed-form minimizers agree with grid search over a parameter sweep") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const int n = 100000;
  const double kappas[] = {0.5, 0.85, 0.9, 0.95};
  for (int i = 0; i < 20; ++i) {
    const double kappa = kappas[i % 4], alpha = 0.005 + 0.3 * U(rng), W = kappa * (0.01 + 0.98 * U(rng));
    const MinimizerResult r = minimize_phi(kappa, alpha, 1.0, W);
    const GridMinimum g = grid_search_min([&](double x) { return phi(x, kappa, alpha, 1.0); }, W, kappa, n);
    CAPTURE(kappa);
    CAPTURE(W);
    CHECK(std::abs(g.grid_x - r.x_star) <= 2 * (kappa - W) / n);
    CHECK(std::abs(g.value - r.value) <= 1e-6);
    CHECK(g.value >= r.value - 1e-12);
  }
  for (int i = 0; i < 20; ++i) {
    const double b = 0.02 + 0.96 * U(rng), alpha = 0.005 + 0.3 * U(rng), W = 0.02 + 0.96 * U(rng);
    const MinimizerResult r = minimize_psi(b, alpha, W, 1.0);
    const GridMinimum g = grid_search_min([&](double x) { return psi(x, b, alpha, W, 1.0); }, r.lo, r.hi, n);
    CAPTURE(b);
    CAPTURE(W);
    CHECK(std::abs(g.grid_x - r.x_star) <= 2 * (r.hi - r.lo) / n);
    CHECK(std::abs(g.value - r.value) <= 1e-6);
    CHECK(g.value >= r.value - 1e-12);
  }
}

TEST_CASE("appendix agreement at m = 0") {
  // whenever the Psi side picks x -> W- the Phi side picks x = W with the same value
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int overlaps = 0;
  for (int i = 0; i < 400; ++i) {
    const double alpha = 0.002 + 0.1 * U(rng), beta = 0.6 + 0.4 * U(rng), W = 0.5 * U(rng) + 1e-3;
    const double b = beta - alpha * W, kappa = beta / (1 + alpha);
    if (!(W < kappa) || b > 1.0) continue;
    const MinimizerResult s = minimize_psi(b, alpha, W, 1.0);
    if (s.case_tag != "2c") continue;
    const MinimizerResult p = minimize_phi(kappa, alpha, 1.0, W);
    if (p.x_star != W) continue;
    ++overlaps;
    CHECK(std::abs(s.value - p.value) <= 1e-12);
  }
  CHECK(overlaps > 20);
}

TEST_CASE("bound reports") {
  const SurfaceData sd = surface_data(1.0, 1.0);
  std::vector<BoundReport> all = evaluate_all(sd, invariants(0.0, 1.0));
  REQUIRE(all.size() == 8);
  for (const BoundReport& r : all) {
    CAPTURE(theorem_tag(r.theorem));
    CHECK(r.applicable);
    CHECK(std::isfinite(r.rhs));
    // kappa = 1 keeps a W-dependent factor even on a round sphere
    if (r.theorem == Theorem::T44)
      CHECK(r.rhs == doctest::Approx((std::sqrt(0.25 / 0.75) + 1) * sd.m_H).epsilon(1e-14));
    else
      CHECK(r.rhs == doctest::Approx(sd.m_H).epsilon(1e-14));
  }
  compare_horizon(all, oracle::pi);
  CHECK(*all[0].horizon_radius == doctest::Approx(0.25));
  CHECK(*all[0].holds);
  CHECK_FALSE(all[1].horizon_radius);

  // non-round with W >= eta
  std::vector<BoundReport> bad = evaluate_all(surface_data(1.0, 2.6), invariants(0.5, 0.8));
  CHECK_FALSE(bad[0].applicable);
  CHECK(bad[0].reason == "W < eta fails");
  for (const BoundReport& r : bad)
    if (!r.applicable) CHECK(std::isnan(r.rhs));

  const nlohmann::json j = reports_to_json(all);
  CHECK(j.size() == 8);
  CHECK(j[0]["theorem"] == "T11");
  CHECK(j[0]["eta"] == "inf");
  CHECK(j[4]["m"] == "-inf");
  CHECK(to_json(bad[0])["rhs"].is_null());

  std::ostringstream csv;
  write_bounds_csv(csv, bad);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "theorem,applicable,H_o,W,alpha,beta,eta,kappa,m,k,rhs,horizon_radius,holds");
  std::getline(in, line);
  CHECK(line.rfind("T11,false,", 0) == 0);
  CHECK(line.back() == ',');
}

TEST_CASE("property: rhs scales linearly with the sphere") {
  const PathInvariants inv = invariants(0.03, 0.93);
  for (double W : {0.1, 0.4, 0.8}) {
    const SurfaceData base = surface_data(1.3, H_for(W, 1.3));
    const std::vector<BoundReport> b0 = evaluate_all(base, inv);
    for (double c : {0.5, 2.0}) {
      const SurfaceData scaled = surface_data(1.3 * c, base.H_o / c);
      const std::vector<BoundReport> b1 = evaluate_all(scaled, inv);
      CHECK(scaled.W == doctest::Approx(base.W).epsilon(1e-15));
      for (std::size_t i = 0; i < b0.size(); ++i) {
        CHECK(b0[i].applicable == b1[i].applicable);
        if (b0[i].applicable) CHECK(std::abs(b1[i].rhs - c * b0[i].rhs) <= 1e-10 * std::abs(c * b0[i].rhs) + 1e-15);
      }
    }
  }
}

TEST_CASE("property: alpha -> 0 recovers the Hawking mass") {
  const double W = 0.4, beta = 0.9;
  const SurfaceData sd = surface_data(1.0, H_for(W, 1.0));
  double prev = kInf;
  for (double alpha : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const PathInvariants inv = invariants(alpha, beta);
    const double gap = std::max({thm11_rhs(sd, beta / alpha).rhs - sd.m_H, thm14_rhs(sd, alpha, beta).rhs - sd.m_H,
                                 thm31_family(sd, inv, -2.0).rhs - sd.m_H, thm32_family(sd, inv, 0.0).rhs - sd.m_H});
    CHECK(gap >= 0.0);
    CHECK(gap < prev);
    prev = gap;
  }
  CHECK(prev < 1e-3);
}

TEST_CASE("property: monotonicity of the eta bound") {
  // nonincreasing in eta everywhere on the domain
  for (double W : {0.05, 0.3, 0.9, 2.0}) {
    const SurfaceData sd = surface_data(1.0, H_for(W, 1.0));
    double prev = kInf;
    for (double eta = W * 1.01; eta < 1000.0; eta *= 1.3) {
      const double r = thm11_rhs(sd, eta).rhs;
      CHECK(r <= prev);
      prev = r;
    }
    CHECK(thm11_rhs(sd, kInf).rhs <= prev);
  }
  // nondecreasing in W when eta <= 8/(3 sqrt 3), the largest eta for which
  // the Hawking-mass decrease never wins over the first term
  for (double eta : {0.3, 0.9, 1.5}) {
    double prev = -kInf;
    for (int i = 1; i < 200; ++i) {
      const double W = eta * i / 200.0;
      const double r = thm11_rhs(surface_data(1.0, H_for(W, 1.0)), eta).rhs;
      CHECK(r >= prev);
      prev = r;
    }
  }
  // beyond that threshold the bound dips in W
  const double eta = 100.0;
  CHECK(thm11_rhs(surface_data(1.0, H_for(50.0, 1.0)), eta).rhs <
        thm11_rhs(surface_data(1.0, H_for(40.0, 1.0)), eta).rhs);
}
