#include "fuzzy/ellipse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fuzzy/solvers.hpp"
#include "fuzzy/special.hpp"

namespace fuzzy {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double normalize_half_turn(double angle) {
  double a = std::fmod(angle, kPi);
  if (a >= 0.5 * kPi) a -= kPi;
  if (a < -0.5 * kPi) a += kPi;
  return a;
}

EllipseGeometry assemble(const InvariantCoords& inv, const PrincipalAxes& axes) {
  EllipseGeometry g;
  g.a = axes.a;
  g.b = axes.b;
  g.theta = axes.theta;
  g.A = area(inv);
  const double lp = axes.a * axes.a;
  g.E1 = lp > 0.0 ? std::sqrt(std::max(0.0, 2.0 * std::sqrt(std::max(0.0, inv.U * inv.U - inv.V)) / lp))
                  : 0.0;
  g.E1 = std::min(g.E1, 1.0);
  g.E3 = eccentricity3(inv);
  g.L_exact = perimeter_exact(axes.a, axes.b);
  g.L_approx = perimeter_approx(inv);
  const ShapeParams s = shape_param(inv);
  g.S = s.approx;
  g.S_exact = s.exact;
  return g;
}

}  // namespace

Sym2 conic_matrix(const MembraneConfig& cfg) noexcept {
  const double xy = dot(cfg.x, cfg.y);
  return {{{norm_sq(cfg.y), -xy}, {-xy, norm_sq(cfg.x)}}};
}

PrincipalAxes axes_from_invariants(const InvariantCoords& inv) noexcept {
  const double disc = std::sqrt(std::max(0.0, inv.U * inv.U - inv.V));
  const double lplus = inv.U + disc;
  // lambda_- = V / lambda_+ avoids the cancellation in U - disc for needles.
  const double lminus = lplus > 0.0 ? inv.V / lplus : 0.0;
  PrincipalAxes ax;
  ax.a = std::sqrt(lplus);
  ax.b = std::min(ax.a, std::sqrt(lminus));
  return ax;
}

PrincipalAxes principal_axes(const MembraneConfig& cfg) noexcept {
  PrincipalAxes ax = axes_from_invariants(invariants(cfg));
  const Sym2 m = conic_matrix(cfg);
  const double p = m[0][0];
  const double q = m[0][1];
  const double r = m[1][1];
  const double split = std::hypot(p - r, 2.0 * q);
  if (split <= 1e-14 * (p + r) || split == 0.0) {
    ax.theta = 0.0;
    return ax;
  }
  // Largest-eigenvalue direction is at 0.5 atan2(2q, p - r); the major axis
  // follows the smallest eigenvalue, a quarter turn away.
  ax.theta = normalize_half_turn(0.5 * std::atan2(2.0 * q, p - r) + 0.5 * kPi);
  return ax;
}

double area(const InvariantCoords& inv) noexcept { return 2.0 * kPi * std::sqrt(inv.V); }

double eccentricity3(const InvariantCoords& inv) noexcept {
  return std::pow(std::max(0.0, 1.0 - inv.W), 0.25);
}

double perimeter_exact(double a, double b) {
  if (!(b >= 0.0) || !(a >= b)) throw std::invalid_argument("perimeter_exact: need a >= b >= 0");
  if (a == 0.0) return 0.0;
  const double m = std::clamp((a - b) * (a + b) / (a * a), 0.0, 1.0);
  return 4.0 * a * num::complete_elliptic_e(m);
}

double perimeter_approx(const InvariantCoords& inv) noexcept {
  return kPerimeterAlpha * std::sqrt(inv.U) + kPerimeterBeta * std::pow(inv.V, 0.25);
}

ShapeParams shape_param(const InvariantCoords& inv) {
  if (!(inv.V > 0.0)) return {kInf, kInf};
  const double root_v = std::sqrt(inv.V);
  const double denom = 4.0 * kPi * kPi * root_v;
  const double la = perimeter_approx(inv);
  const PrincipalAxes ax = axes_from_invariants(inv);
  const double le = perimeter_exact(ax.a, ax.b);
  return {la * la / denom, le * le / denom};
}

double shape_param_exact_for_ratio(double r) {
  if (!(r >= 1.0)) throw std::invalid_argument("shape_param_exact_for_ratio: ratio must be >= 1");
  const double l = perimeter_exact(r, 1.0);
  return l * l / (4.0 * kPi * kPi * r);
}

double aspect_ratio_from_shape(double s) {
  if (!(s >= 1.0)) throw std::invalid_argument("aspect_ratio_from_shape: shape parameter must be >= 1");
  if (s == 1.0) return 1.0;
  double hi = 2.0;
  while (shape_param_exact_for_ratio(hi) < s) {
    hi *= 2.0;
    if (hi > 1e12) throw std::invalid_argument("aspect_ratio_from_shape: shape parameter too large");
  }
  return num::bisect_root([s](double r) { return shape_param_exact_for_ratio(r) - s; }, 1.0, hi,
                          1e-10);
}

EllipseGeometry ellipse_geometry(const MembraneConfig& cfg) {
  return assemble(invariants(cfg), principal_axes(cfg));
}

EllipseGeometry ellipse_from_axes(double a, double b, double theta) {
  if (!(b >= 0.0) || !(a >= b)) throw std::invalid_argument("ellipse_from_axes: need a >= b >= 0");
  InvariantCoords inv;
  inv.U = 0.5 * (a * a + b * b);
  inv.V = a * a * b * b;
  inv.W = inv.U > 0.0 ? inv.V / (inv.U * inv.U) : 0.0;
  return assemble(inv, {a, b, normalize_half_turn(theta)});
}

std::vector<PlanePoint> boundary_polyline(const EllipseGeometry& geom, std::size_t n) {
  if (n < 3) throw std::invalid_argument("boundary_polyline: need at least 3 points");
  std::vector<PlanePoint> pts;
  pts.reserve(n);
  const double c = std::cos(geom.theta);
  const double s = std::sin(geom.theta);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
    const double u = geom.a * std::cos(t);
    const double v = geom.b * std::sin(t);
    pts.push_back({u * c - v * s, u * s + v * c});
  }
  return pts;
}

}  // namespace fuzzy
