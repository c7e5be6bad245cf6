#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "fuzzy/ellipse.hpp"
#include "fuzzy/quadrature.hpp"

using namespace fuzzy;
using doctest::Approx;

namespace {

constexpr double kPi = std::numbers::pi;

MembraneConfig random_config(num::RngStream& rng) {
  MembraneConfig c;
  for (double& v : c.x) v = rng.normal();
  for (double& v : c.y) v = rng.normal();
  return c;
}

// Arc length of (a cos t, b sin t) by adaptive quadrature: an oracle that
// shares nothing with the AGM route.
double arc_length(double a, double b) {
  const auto r = num::integrate_adaptive(
      [a, b](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); }, 0.0, kPi / 2, 1e-14);
  return 4.0 * r.value;
}

InvariantCoords inv_of(double U, double V) { return {U, V, U > 0 ? V / (U * U) : 0.0}; }

}  // namespace

TEST_CASE("conic matrix") {
  auto m = conic_matrix({{1, 0, 0}, {0, 1, 0}});
  CHECK(m[0][0] == 1.0);
  CHECK(m[0][1] == 0.0);
  CHECK(m[1][1] == 1.0);
  m = conic_matrix({{1, 0, 0}, {2, 0, 0}});
  CHECK(m[0][0] == 4.0);
  CHECK(m[0][1] == -2.0);
  CHECK(m[1][0] == -2.0);
  CHECK(m[1][1] == 1.0);
  CHECK(m[0][0] * m[1][1] - m[0][1] * m[1][0] == 0.0);

  num::RngStream rng(21, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto c = random_config(rng);
    const auto q = conic_matrix(c);
    const double det = q[0][0] * q[1][1] - q[0][1] * q[1][0];
    REQUIRE(det == Approx(invariants(c).V).epsilon(1e-10));
  }
}

TEST_CASE("principal axes") {
  auto ax = principal_axes({{1, 0, 0}, {0, 1, 0}});
  CHECK(ax.a == Approx(1.0));
  CHECK(ax.b == Approx(1.0));
  CHECK(ax.theta == 0.0);
  ax = principal_axes({{1, 0, 0}, {2, 0, 0}});
  CHECK(ax.a == Approx(std::sqrt(5.0)));
  CHECK(ax.b == 0.0);
  ax = principal_axes({{1, 1, 0}, {0, 1, 1}});
  CHECK(ax.a == Approx(std::sqrt(3.0)).epsilon(1e-14));
  CHECK(ax.b == Approx(1.0).epsilon(1e-14));

  num::RngStream rng(22, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto c = random_config(rng);
    const auto i = invariants(c);
    const auto p = principal_axes(c);
    REQUIRE(p.a >= p.b);
    REQUIRE(p.theta >= -kPi / 2);
    REQUIRE(p.theta < kPi / 2);
    // lambda+ lambda- = V and lambda+ + lambda- = 2U.
    REQUIRE(p.a * p.a * p.b * p.b == Approx(i.V).epsilon(1e-10));
    REQUIRE(p.a * p.a + p.b * p.b == Approx(2.0 * i.U).epsilon(1e-12));
    // One-side area pi a b = pi sqrt V.
    REQUIRE(kPi * p.a * p.b == Approx(kPi * std::sqrt(i.V)).epsilon(1e-12));
  }
}

TEST_CASE("major axis points along theta") {
  // The image of the unit circle under (n1, n2) -> (x.n, y.n) reaches its
  // largest radius along the major axis.
  num::RngStream rng(23, 0);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_config(rng);
    const auto g = ellipse_geometry(c);
    if (g.a - g.b < 0.1 * g.a) continue;
    double best = -1.0, best_angle = 0.0;
    for (int i = 0; i < 400; ++i) {
      for (int j = 0; j < 200; ++j) {
        const double th = kPi * (j + 0.5) / 200.0;
        const double ph = 2.0 * kPi * i / 400.0;
        const auto p = membrane_point(c, th, ph);
        const double r2 = p.X * p.X + p.Y * p.Y;
        if (r2 > best) {
          best = r2;
          best_angle = std::atan2(p.Y, p.X);
        }
      }
    }
    double d = std::fmod(std::abs(best_angle - g.theta), kPi);
    d = std::min(d, kPi - d);
    CHECK(d < 0.05);
    CHECK(std::sqrt(best) == Approx(g.a).epsilon(1e-3));
  }
}

TEST_CASE("area and eccentricity") {
  CHECK(area(inv_of(1, 1)) == Approx(2 * kPi));
  CHECK(area(inv_of(1, 0)) == 0.0);
  CHECK(area(inv_of(2, 3)) == Approx(10.8828).epsilon(1e-5));
  CHECK(eccentricity3(inv_of(1, 1)) == 0.0);
  CHECK(eccentricity3(inv_of(1, 0)) == 1.0);
  CHECK(eccentricity3(inv_of(2, 3)) == Approx(0.70711).epsilon(1e-5));

  num::RngStream rng(24, 0);
  for (int k = 0; k < 1000; ++k) {
    const auto c = random_config(rng);
    const auto g = ellipse_geometry(c);
    const auto i = invariants(c);
    REQUIRE(std::abs(std::pow(g.E3, 4) - (1.0 - i.W)) <= 1e-10);
    REQUIRE(std::abs(g.E3 * g.E3 - (g.a * g.a - g.b * g.b) / (g.a * g.a + g.b * g.b)) <= 1e-10);
    REQUIRE(std::abs(g.E3 - g.E1 / std::sqrt(2.0 - g.E1 * g.E1)) <= 1e-12);
    REQUIRE(g.S_exact >= 1.0 - 1e-12);
  }
}

TEST_CASE("exact perimeter") {
  CHECK(perimeter_exact(1, 1) == Approx(2 * kPi).epsilon(1e-15));
  CHECK(perimeter_exact(1, 0) == Approx(4.0).epsilon(1e-15));
  CHECK(perimeter_exact(2, 1) == Approx(9.688448).epsilon(1e-7));
  CHECK(std::abs(perimeter_exact(2, 1) - arc_length(2, 1)) <= 1e-12 * arc_length(2, 1));
  for (int k = 1; k <= 20; ++k) {
    const double b = k / 20.0;
    CAPTURE(b);
    CHECK(std::abs(perimeter_exact(1.0, b) - arc_length(1.0, b)) <= 1e-11);
  }
  CHECK_THROWS_AS(perimeter_exact(1, 2), std::invalid_argument);
}

TEST_CASE("approximate perimeter") {
  CHECK(kPerimeterAlpha + kPerimeterBeta == Approx(2 * kPi).epsilon(1e-15));
  CHECK(std::abs(perimeter_approx(inv_of(1, 1)) - 2 * kPi) <= 1e-14);
  CHECK(std::abs(perimeter_approx(inv_of(2.5, 0)) - 4 * std::sqrt(5.0)) <= 1e-14);
  CHECK(std::abs(perimeter_approx(inv_of(2.5, 0)) - perimeter_exact(std::sqrt(5.0), 0.0)) <= 1e-12);
  const double l = perimeter_approx(inv_of(2, 3));
  CHECK(l == Approx(8.825).epsilon(1e-3));
  CHECK(std::abs(l / perimeter_exact(std::sqrt(3.0), 1.0) - 1.0) <= 0.04);

  // The 4% and 8% accuracy claims on W in [1e-6, 1] at U = 1.
  double worst_l = 0.0, worst_s = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double W = 1e-6 + (1.0 - 1e-6) * k / 999.0;
    const auto inv = inv_of(1.0, W);
    const auto ax = axes_from_invariants(inv);
    worst_l = std::max(worst_l, std::abs(perimeter_approx(inv) / perimeter_exact(ax.a, ax.b) - 1.0));
    const auto s = shape_param(inv);
    worst_s = std::max(worst_s, std::abs(s.approx / s.exact - 1.0));
  }
  CHECK(worst_l <= 0.04);
  CHECK(worst_s <= 0.08);
  MESSAGE("max relative error: perimeter " << worst_l << ", shape " << worst_s);
}

TEST_CASE("shape parameter") {
  CHECK(shape_param(inv_of(1, 1)).approx == Approx(1.0).epsilon(1e-14));
  CHECK(shape_param(inv_of(1, 1)).exact == Approx(1.0).epsilon(1e-14));
  CHECK(std::isinf(shape_param(inv_of(1, 0)).approx));
  CHECK(std::isinf(shape_param(inv_of(1, 0)).exact));
  const auto s = shape_param(inv_of(2, 3));
  CHECK(s.approx == Approx(1.139).epsilon(1e-3));
  CHECK(std::abs(s.approx / s.exact - 1.0) <= 0.08);
}

TEST_CASE("aspect ratio from shape") {
  CHECK(aspect_ratio_from_shape(1.0) == 1.0);
  CHECK(aspect_ratio_from_shape(2.225) == Approx(4.973).epsilon(0.005 / 4.973));
  const double s3 = shape_param_exact_for_ratio(std::sqrt(3.0));
  CHECK(aspect_ratio_from_shape(s3) == Approx(std::sqrt(3.0)).epsilon(1e-9));
  CHECK(aspect_ratio_from_shape(shape_param(inv_of(2, 3)).exact) == Approx(std::sqrt(3.0)).epsilon(1e-9));
  for (double r : {1.0, 1.5, 2.0, 5.0, 20.0}) {
    CAPTURE(r);
    CHECK(std::abs(aspect_ratio_from_shape(shape_param_exact_for_ratio(r)) - r) <= 1e-8 * r);
  }
  CHECK_THROWS_AS(aspect_ratio_from_shape(0.9), std::invalid_argument);
}

TEST_CASE("boundary polyline") {
  const auto circle = boundary_polyline(ellipse_from_axes(1, 1, 0), 4);
  REQUIRE(circle.size() == 4);
  const double expect_circle[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) {
    CHECK(circle[k].X == Approx(expect_circle[k][0]).epsilon(1e-15));
    CHECK(circle[k].Y == Approx(expect_circle[k][1]).epsilon(1e-15));
  }
  const auto e = boundary_polyline(ellipse_from_axes(2, 1, 0), 4);
  CHECK(e[0].X == Approx(2.0));
  CHECK(e[1].Y == Approx(1.0));
  CHECK(e[2].X == Approx(-2.0));
  CHECK(e[3].Y == Approx(-1.0));

  num::RngStream rng(25, 0);
  for (int k = 0; k < 100; ++k) {
    const double b = 0.1 + rng.uniform();
    const double a = b * (1.0 + 4.0 * rng.uniform());
    const double th = kPi * (rng.uniform() - 0.5);
    const auto geom = ellipse_from_axes(a, b, th);
    for (const auto& p : boundary_polyline(geom, 64)) {
      const double u = p.X * std::cos(th) + p.Y * std::sin(th);
      const double v = -p.X * std::sin(th) + p.Y * std::cos(th);
      REQUIRE(std::abs(u * u / (a * a) + v * v / (b * b) - 1.0) <= 1e-10);
    }
  }
  CHECK_THROWS_AS(boundary_polyline(ellipse_from_axes(1, 1, 0), 2), std::invalid_argument);
}

TEST_CASE("scale covariance") {
  num::RngStream rng(26, 0);
  for (int k = 0; k < 200; ++k) {
    auto c = random_config(rng);
    const double s = 0.2 + 3.0 * rng.uniform();
    const auto g0 = ellipse_geometry(c);
    for (double& v : c.x) v *= s;
    for (double& v : c.y) v *= s;
    const auto g1 = ellipse_geometry(c);
    REQUIRE(g1.a == Approx(s * g0.a).epsilon(1e-10));
    REQUIRE(g1.b == Approx(s * g0.b).epsilon(1e-10));
    REQUIRE(g1.L_exact == Approx(s * g0.L_exact).epsilon(1e-10));
    REQUIRE(g1.A == Approx(s * s * g0.A).epsilon(1e-10));
    REQUIRE(std::abs(g1.E1 - g0.E1) <= 1e-10);
    REQUIRE(std::abs(g1.E3 - g0.E3) <= 1e-10);
    REQUIRE(std::abs(g1.S_exact - g0.S_exact) <= 1e-10 * g0.S_exact);
    REQUIRE(std::abs(g1.theta - g0.theta) <= 1e-10);
  }
}

TEST_CASE("full geometry records") {
  const auto circle = ellipse_geometry({{1, 0, 0}, {0, 1, 0}});
  CHECK(circle.A == Approx(2 * kPi));
  CHECK(circle.E3 == 0.0);
  CHECK(circle.S == Approx(1.0));
  const auto needle = ellipse_geometry({{1, 0, 0}, {2, 0, 0}});
  CHECK(needle.E3 == 1.0);
  CHECK(needle.L_exact == Approx(4 * std::sqrt(5.0)));
  CHECK(std::isinf(needle.S));
  const auto tilted = ellipse_geometry({{1, 1, 0}, {0, 1, 1}});
  CHECK(tilted.a == Approx(std::sqrt(3.0)));
  CHECK(tilted.b == Approx(1.0));
  CHECK(tilted.A == Approx(2 * kPi * std::sqrt(3.0)));
}
