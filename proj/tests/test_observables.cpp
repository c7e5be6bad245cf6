#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fuzzy/ellipse.hpp"
#include "fuzzy/observables.hpp"

using namespace fuzzy;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

// Kolmogorov-Smirnov distance evaluated at every `stride`-th order statistic.
template <class Cdf>
double ks_distance(std::vector<double> xs, const Cdf& cdf, std::size_t stride) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); i += stride) {
    const double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - i / n), std::abs(f - (i + 1) / n)});
  }
  return d;
}

const GroundStateModel& ground() {
  static const GroundStateModel m = minimize_closed(kDefaultKappa);
  return m;
}

}  // namespace

TEST_CASE("quadrature expectations at the minimizer") {
  const auto& m = ground();
  const auto area = expected_area(m);
  const auto e3 = expected_e3(m);
  const auto perim = expected_perimeter(m);
  const auto shape = expected_shape(m);
  CHECK(area.quadrature.value == Approx(2.714100).epsilon(1e-6));
  CHECK(e3.quadrature.value == Approx(0.833658).epsilon(1e-6));
  CHECK(perim.quadrature.value == Approx(5.043039).epsilon(1e-6));
  CHECK(shape.quadrature.value == Approx(2.224940).epsilon(1e-6));
  for (const auto* r : {&area, &e3, &perim, &shape}) {
    CAPTURE(r->name);
    CHECK(r->quadrature.converged);
    REQUIRE(r->closed_form.has_value());
    CHECK(r->closed_form_agrees(1e-8));
    CHECK_FALSE(r->monte_carlo.has_value());
  }
  CHECK(area.reference_agrees());
  CHECK(e3.reference_agrees());
  CHECK(shape.reference_agrees());
  // The two-term perimeter overshoots the elliptic-integral one on elongated
  // ellipses, so its expectation sits slightly above <L_exact>.
  REQUIRE(perim.diagnostics.size() == 2);
  CHECK(perim.diagnostics[0].value < perim.quadrature.value);
  CHECK(std::abs(perim.diagnostics[1].value) < 0.04);
}

TEST_CASE("closed forms track quadrature away from the minimizer") {
  for (auto p : {VariationalParams{1.0, 0.3}, VariationalParams{2.0, 1.5}, VariationalParams{0.7, 0.2}}) {
    const GroundStateModel m{p, energy_closed(p, kDefaultKappa), kDefaultKappa};
    CAPTURE(p.mu);
    CAPTURE(p.nu);
    CHECK(rel(closed::area_general(p), expected_area(m).quadrature.value) <= 1e-9);
    CHECK(rel(closed::perimeter_general(p), expected_perimeter(m).quadrature.value) <= 1e-9);
    CHECK(rel(closed::shape_general(p), expected_shape(m).quadrature.value) <= 1e-9);
    CHECK(rel(*expected_e3(m).closed_form, expected_e3(m).quadrature.value) <= 1e-6);
  }
}

TEST_CASE("substituted closed forms") {
  const auto& m = ground();
  CHECK(rel(closed::area_substituted(m.kappa), closed::area_general(m.params)) <= 1e-12);
  CHECK(rel(closed::perimeter_substituted(m.kappa), closed::perimeter_general(m.params)) <= 1e-12);
  CHECK(rel(closed::shape_substituted(), closed::shape_general(m.params)) <= 1e-12);
  const double e3 = expected_e3(m).quadrature.value;
  const double principal = closed::e3_substituted(closed::ArccotBranch::principal);
  const double continuous = closed::e3_substituted(closed::ArccotBranch::continuous);
  // Exactly one branch reproduces the quadrature.
  CHECK((rel(principal, e3) <= 1e-8) != (rel(continuous, e3) <= 1e-8));
  const auto report = expected_e3(m);
  CHECK(report.variants.size() == 7);
  REQUIRE(report.notes.size() == 1);
  CHECK(report.notes[0].find("closed form resolved against quadrature") == 0);
}

TEST_CASE("arccot branches") {
  using closed::ArccotBranch;
  CHECK(closed::arccot(1.0, ArccotBranch::principal) == Approx(kPi / 4));
  CHECK(closed::arccot(1.0, ArccotBranch::continuous) == Approx(kPi / 4));
  CHECK(closed::arccot(-1.0, ArccotBranch::principal) == Approx(-kPi / 4));
  CHECK(closed::arccot(-1.0, ArccotBranch::continuous) == Approx(3 * kPi / 4));
  CHECK_THROWS_AS(closed::e3_general({1.0, 1.5}, closed::B2Form::arctan_arccot, closed::B3Form::one_plus_log),
                  std::invalid_argument);
}

TEST_CASE("area example at unit scale") {
  const auto m = minimize_closed(4.0 / 3.0);
  CHECK(expected_area(m).quadrature.value == Approx(4.4429).epsilon(1e-4));
  CHECK(rel(expected_area(m).quadrature.value, 2.0 * kPi / std::numbers::sqrt2) <= 1e-10);
}

TEST_CASE("kappa scaling of the expectations") {
  const auto m1 = minimize_closed(1.0);
  const double a1 = expected_area(m1).quadrature.value;
  const double e1 = expected_e3(m1).quadrature.value;
  const double l1 = expected_perimeter(m1).quadrature.value;
  const double s1 = expected_shape(m1).quadrature.value;
  for (double kappa : {0.5, 1.0, 2.0}) {
    const auto m = minimize_closed(kappa);
    CAPTURE(kappa);
    CHECK(rel(expected_area(m).quadrature.value * std::cbrt(kappa), a1) <= 1e-9);
    CHECK(rel(expected_e3(m).quadrature.value, e1) <= 1e-9);
    CHECK(rel(expected_perimeter(m).quadrature.value * std::pow(kappa, 1.0 / 6.0), l1) <= 1e-9);
    CHECK(rel(expected_shape(m).quadrature.value, s1) <= 1e-9);
  }
}

TEST_CASE("rejection sampler") {
  const auto& m = ground();
  num::RngStream rng(41, 0);
  const auto batch = sample_uv(m, 100000, rng);
  REQUIRE(batch.samples.size() == 100000);
  for (const auto& s : batch.samples) {
    REQUIRE(s.U >= 0.0);
    REQUIRE(s.V >= 0.0);
    REQUIRE(s.V <= s.U * s.U);
  }
  const double p = expected_acceptance(m.params);
  CHECK(p == Approx(std::pow(std::numbers::sqrt2 - 1.0, 2) / 2.0).epsilon(1e-12));
  const double n = static_cast<double>(batch.proposals);
  CHECK(std::abs(batch.acceptance_rate - p) <= 3.0 * std::sqrt(p * (1.0 - p) / n));

  SUBCASE("marginals pass Kolmogorov-Smirnov at the 1% level") {
    std::vector<double> us, ts;
    for (const auto& s : batch.samples) {
      us.push_back(s.U);
      ts.push_back(std::sqrt(s.V));
    }
    const double critical = 1.63 / std::sqrt(static_cast<double>(us.size()));
    const double du = ks_distance(us, [&](double u) { return marginal_cdf_u(m, u); }, 200);
    const double dt = ks_distance(ts, [&](double t) { return marginal_cdf_sqrt_v(m, t); }, 200);
    CHECK(du < critical);
    CHECK(dt < critical);
  }
  SUBCASE("shape parameter bounded below pointwise") {
    for (const auto& s : batch.samples) {
      if (s.V <= 0.0) continue;
      REQUIRE(observable_value(Observable::shape, s.U, s.V) >= 0.9);
    }
  }
  SUBCASE("Monte Carlo moments agree with quadrature") {
    const auto a = expected_area(m, {1e-11, &batch});
    const auto e = expected_e3(m, {1e-11, &batch});
    REQUIRE(a.monte_carlo.has_value());
    CHECK(a.monte_carlo->count == batch.samples.size());
    CHECK(a.monte_carlo_agrees(4.0));
    CHECK(e.monte_carlo_agrees(4.0));
  }
  CHECK_THROWS_AS(sample_uv({{1.0, 0.0}, 1.5, 1.0}, 10, rng), std::invalid_argument);
}

TEST_CASE("marginal CDFs") {
  const auto& m = ground();
  CHECK(marginal_cdf_u(m, 0.0) == 0.0);
  CHECK(marginal_cdf_sqrt_v(m, -1.0) == 0.0);
  CHECK(marginal_cdf_u(m, 40.0) == Approx(1.0).epsilon(1e-9));
  CHECK(marginal_cdf_sqrt_v(m, 40.0) == Approx(1.0).epsilon(1e-9));
  double prev = 0.0;
  for (int k = 1; k <= 20; ++k) {
    const double f = marginal_cdf_u(m, 0.2 * k);
    CHECK(f >= prev);
    prev = f;
  }
}

TEST_CASE("parallel sampling is reproducible") {
  const auto& m = ground();
  const auto a = sample_uv_parallel(m, 10001, 7, 3);
  const auto b = sample_uv_parallel(m, 10001, 7, 3);
  REQUIRE(a.samples.size() == 10001);
  REQUIRE(b.samples.size() == 10001);
  bool same = true;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    same = same && a.samples[i].U == b.samples[i].U && a.samples[i].V == b.samples[i].V;
  }
  CHECK(same);
  CHECK(a.proposals == b.proposals);
  const auto c = sample_uv_parallel(m, 10001, 8, 3);
  CHECK(c.samples[0].U != a.samples[0].U);
}

TEST_CASE("sample moments") {
  SampleBatch batch;
  batch.samples = {{1.0, 0.5}, {2.0, 1.0}, {3.0, 2.0}};
  const auto one = mc_moment(batch, [](double, double) { return 1.0; });
  CHECK(one.mean == 1.0);
  CHECK(one.std_error == 0.0);
  CHECK(one.count == 3);
  const auto u = mc_moment(batch, [](double U, double) { return U; });
  CHECK(u.mean == Approx(2.0));
  CHECK(u.std_error == Approx(1.0 / std::sqrt(3.0)));
  CHECK_THROWS_AS(mc_moment(SampleBatch{}, [](double, double) { return 1.0; }), std::invalid_argument);
}

TEST_CASE("observable values") {
  CHECK(observable_value(Observable::area, 1.0, 1.0) == Approx(2 * kPi));
  CHECK(observable_value(Observable::eccentricity3, 1.0, 1.0) == 0.0);
  CHECK(observable_value(Observable::perimeter, 1.0, 1.0) == Approx(2 * kPi));
  CHECK(observable_value(Observable::shape, 1.0, 1.0) == Approx(1.0));
  CHECK(observable_name(Observable::area) != observable_name(Observable::shape));
}
