#include <doctest.h>

#include <cmath>

#include "collarkit/errors.hpp"
#include "collarkit/path.hpp"
#include "oracles.hpp"

using namespace collarkit;

namespace {

ConformalMetric perturbed(const GridPtr& g, int l, int m, double eps, double scale = 1.0) {
  Spectrum s(g->lmax());
  s(l, m) = eps;
  return {ScalarField::from_spectrum(g, s), scale};
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

const PathFamily kFamilies[] = {PathFamily::Conformal, PathFamily::Linear};

}  // namespace

TEST_CASE("round metric gives the constant path") {
  auto g = make_grid(16);
  const ConformalMetric round = ConformalMetric::round(g, 2.0);
  for (PathFamily f : kFamilies) {
    const MetricPath p = make_path(round, f);
    for (double t : {0.0, 0.3, 1.0}) {
      const PathState s = p.at(t);
      CHECK(s.h.v.max_abs() == 0.0);
      CHECK(s.h.scale == doctest::Approx(2.0).epsilon(1e-15));
      CHECK(s.hprime.tt.max_abs() < 1e-15);
    }
    const PathInvariants inv = compute_invariants(p);
    CHECK(inv.alpha == 0.0);
    CHECK(inv.beta == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(std::isinf(inv.eta_lb));
    CHECK(inv.kappa_lb == doctest::Approx(1.0).epsilon(1e-13));
  }
  const PathInvariants best = eta_kappa_best(round);
  CHECK(std::isinf(best.eta_lb));
  CHECK(best.kappa_lb == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("path endpoints and area normalization") {
  auto g = make_grid(32);
  const ConformalMetric m = perturbed(g, 2, 0, 0.05);
  const double area = total_area(m);
  for (PathFamily f : kFamilies) {
    CAPTURE(family_name(f));
    const MetricPath p = make_path(m, f);
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) CHECK(std::abs(total_area(p.at(t).h) - area) <= 1e-9 * area);

    const PathState s0 = p.at(0.0);
    CHECK(s0.h.scale == m.scale);
    for (std::size_t i = 0; i < m.v.size(); ++i) REQUIRE(s0.h.v[i] == m.v[i]);

    const PathState s1 = p.at(1.0);
    CHECK(s1.h.v.max() - s1.h.v.min() <= 1e-10);
    const double r_o = area_radius(m);
    CHECK((gauss_curvature(s1.h) + (-1.0 / (r_o * r_o))).max_abs() <= 1e-10);
  }
}

TEST_CASE("path derivative matches finite differences in t") {
  auto g = make_grid(24);
  const ConformalMetric m{ScalarField::from_spectrum(g, oracle::random_spectrum(24, 4, 17, 0.2)), 1.3};
  for (PathFamily f : kFamilies) {
    CAPTURE(family_name(f));
    const MetricPath p(m, f);
    const double t = 0.4, dt = 1e-4;
    const PathState s = p.at(t), sp = p.at(t + dt), sm = p.at(t - dt);
    const SymTensorField mp = metric_tensor(sp.h), mm = metric_tensor(sm.h);
    double err = 0.0;
    for (std::size_t i = 0; i < s.h.v.size(); ++i) {
      err = std::max(err, std::abs((mp.tt[i] - mm.tt[i]) / (2 * dt) - s.hprime.tt[i]));
      err = std::max(err, std::abs((mp.pp[i] - mm.pp[i]) / (2 * dt) - s.hprime.pp[i]));
    }
    // the linear family projects its derivative, so agreement is at the band-limit level
    CHECK(err < (f == PathFamily::Conformal ? 1e-7 : 1e-6));
  }
}

TEST_CASE("trace_free_correct") {
  auto g = make_grid(32);
  const ConformalMetric h = perturbed(g, 2, 1, 0.1, 1.5);

  const CorrectedDerivative zero = trace_free_correct(h, SymTensorField(g));
  CHECK(zero.u.max_abs() == 0.0);
  CHECK(zero.H.tt.max_abs() == 0.0);

  SUBCASE("pure trace with zero mean is cancelled") {
    ScalarField psi = ScalarField::from_spectrum(g, oracle::random_spectrum(32, 6, 4));
    psi += -integrate(h, psi) / total_area(h);
    const SymTensorField mt = metric_tensor(h);
    const CorrectedDerivative c = trace_free_correct(h, SymTensorField(psi * mt.tt, psi * mt.tp, psi * mt.pp));
    CHECK(tensor_trace_and_norm(h, c.H).trace.max_abs() <= 1e-8);
    CHECK(c.residual <= 1e-8);
  }

  SUBCASE("trace-free input is returned unchanged") {
    const SymTensorField raw(ScalarField::from_spectrum(g, oracle::random_spectrum(32, 5, 1)),
                             ScalarField::from_spectrum(g, oracle::random_spectrum(32, 5, 2)),
                             ScalarField::from_spectrum(g, oracle::random_spectrum(32, 5, 3)));
    const SymTensorField tf = trace_free_part(h, raw);
    const CorrectedDerivative c = trace_free_correct(h, tf);
    CHECK(c.u.max_abs() <= 1e-10);
    CHECK((c.H.tt - tf.tt).max_abs() <= 1e-9);
    CHECK((c.H.pp - tf.pp).max_abs() <= 1e-9);
  }

  const SymTensorField mt = metric_tensor(h);
  CHECK_THROWS_AS(trace_free_correct(h, mt), NonZeroMean);
}

TEST_CASE("invariants: scaling exponents in the perturbation size") {
  auto g = make_grid(32);
  const std::vector<double> eps{0.01, 0.02, 0.04, 0.08};
  for (PathFamily f : kFamilies) {
    CAPTURE(family_name(f));
    std::vector<double> alpha, defect;
    for (double e : eps) {
      const PathInvariants inv = compute_invariants(make_path(perturbed(g, 2, 0, e), f));
      alpha.push_back(inv.alpha);
      defect.push_back(1.0 - inv.beta);
    }
    CHECK(slope(eps, alpha) == doctest::Approx(2.0).epsilon(0.05));
    CHECK(std::abs(slope(eps, defect) - 1.0) <= 0.15);
  }
}

TEST_CASE("invariants: properties on random metrics") {
  auto g = make_grid(32);
  for (unsigned seed = 31; seed < 35; ++seed) {
    const ScalarField v = ScalarField::from_spectrum(g, oracle::random_spectrum(32, 6, seed, 0.05));
    for (PathFamily f : kFamilies) {
      CAPTURE(seed);
      CAPTURE(family_name(f));
      const PathInvariants a = compute_invariants(make_path({v, 1.0}, f));
      CHECK(a.area_drift <= 1e-9);
      CHECK(a.max_trace_residual <= 1e-6);
      CHECK(a.beta <= 1.0 + 1e-9);
      CHECK(a.alpha > 0.0);
      CHECK(a.kappa_lb == doctest::Approx(a.beta / (1 + a.alpha)).epsilon(1e-15));
      for (double c2 : {0.25, 4.0}) {
        const PathInvariants b = compute_invariants(make_path({v, c2}, f));
        CHECK(std::abs(b.alpha - a.alpha) <= 1e-10);
        CHECK(std::abs(b.beta - a.beta) <= 1e-10);
        CHECK(b.r_o == doctest::Approx(a.r_o * std::sqrt(c2)).epsilon(1e-13));
      }
      // sampling convergence, without the extremum refinement
      const PathInvariants c32 = compute_invariants(make_path({v, 1.0}, f, 32), {false});
      const PathInvariants c64 = compute_invariants(make_path({v, 1.0}, f, 64), {false});
      CHECK(std::abs(c32.alpha - c64.alpha) < 1e-6);
      CHECK(std::abs(c32.beta - c64.beta) < 1e-6);
    }
  }
}

TEST_CASE("beta equal to one forces a round path") {
  auto g = make_grid(16);
  const PathInvariants inv = compute_invariants(make_path(ConformalMetric::round(g, 3.0), PathFamily::Linear));
  REQUIRE(std::abs(inv.beta - 1.0) <= 1e-12);
  const MetricPath p(ConformalMetric::round(g, 3.0), PathFamily::Linear);
  for (double t : p.sample_times()) CHECK((3.0 * gauss_curvature(p.at(t).h) + (-1.0)).max_abs() <= 1e-6);
}

TEST_CASE("eta_kappa_best dominates every family") {
  auto g = make_grid(32);
  const ConformalMetric m = perturbed(g, 2, 2, 0.05);
  const auto per = invariants_per_family(m);
  REQUIRE(per.size() == 2);
  const PathInvariants best = best_of(per);
  for (const auto& p : per) {
    CHECK(best.eta_lb >= p.eta_lb);
    CHECK(best.kappa_lb >= p.kappa_lb);
  }
  CHECK(std::isfinite(best.eta_lb));
  CHECK(best.eta_lb > 0.0);
  // regression value pinned from the first full run at lmax 32, 32 samples
  CHECK(best.eta_lb == doctest::Approx(1339.074165154087).epsilon(1e-9));
}

TEST_CASE("failure modes") {
  auto g = make_grid(32);
  // K = exp(-2v)(1 + 12 v) for v = c Y30 is negative where 12 v < -1
  CHECK_THROWS_AS(make_path(perturbed(g, 3, 0, 0.5), PathFamily::Conformal), CurvaturePositivityLost);
  try {
    make_path(perturbed(g, 3, 0, 0.5), PathFamily::Conformal);
  } catch (const CurvaturePositivityLost& e) {
    CHECK(e.t() == 0.0);
  }
  // a high-degree factor makes log(1 + s(exp(2v) - 1)) leave the band limit
  CHECK_THROWS_AS(MetricPath(perturbed(g, 30, 5, 0.02), PathFamily::Linear).at(0.5), NotRepresentable);
  CHECK_NOTHROW(MetricPath(perturbed(g, 30, 5, 0.02), PathFamily::Conformal).at(0.5));
  CHECK_THROWS_AS(MetricPath(perturbed(g, 2, 0, 0.1), PathFamily::Linear).at(1.5), DomainError);
}

TEST_CASE("path report JSON round trip") {
  PathInvariants inv;
  inv.family = "linear";
  inv.n_samples = 32;
  inv.alpha = 0.0;
  const nlohmann::json j = to_json(inv);
  CHECK(j.at("eta_lb") == "inf");
  const PathInvariants back = path_invariants_from_json(j);
  CHECK(std::isinf(back.eta_lb));
  CHECK(back.family == "linear");
  for (const char* key : {"family", "n_samples", "alpha", "beta", "eta_lb", "kappa_lb", "area_drift",
                          "max_trace_residual"})
    CHECK(j.contains(key));
}
