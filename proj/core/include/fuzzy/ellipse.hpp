#pragma once

#include <array>
#include <cstddef>
#include <numbers>
#include <vector>

#include "fuzzy/membrane.hpp"

namespace fuzzy {

/// Coefficients of the two-term perimeter approximation L ~ alpha sqrt(U) + beta V^(1/4).
inline constexpr double kPerimeterAlpha = 4.0 * std::numbers::sqrt2;
inline constexpr double kPerimeterBeta = 2.0 * std::numbers::pi - kPerimeterAlpha;

using Sym2 = std::array<std::array<double, 2>, 2>;

/// Projected ellipse of a configuration. theta is the major-axis angle in
/// [-pi/2, pi/2); circles report 0. S and S_exact are +inf for needles (V = 0).
struct EllipseGeometry {
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
  double A = 0.0;
  double E1 = 0.0;
  double E3 = 0.0;
  double L_exact = 0.0;
  double L_approx = 0.0;
  double S = 0.0;
  double S_exact = 0.0;
};

struct PrincipalAxes {
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;
};

/// [[|y|^2, -x.y], [-x.y, |x|^2]]; the boundary is p^T M p = V and det M = V.
Sym2 conic_matrix(const MembraneConfig& cfg) noexcept;

PrincipalAxes principal_axes(const MembraneConfig& cfg) noexcept;

/// Two-side area 2 pi sqrt(V).
double area(const InvariantCoords& inv) noexcept;

/// Third eccentricity (1 - W)^(1/4).
double eccentricity3(const InvariantCoords& inv) noexcept;

/// 4 a E(1 - b^2/a^2). Requires a >= b >= 0.
double perimeter_exact(double a, double b);

double perimeter_approx(const InvariantCoords& inv) noexcept;

struct ShapeParams {
  double approx = 0.0;
  double exact = 0.0;
};

/// L^2 / (4 pi^2 sqrt(V)) for the approximate and exact perimeters; both are
/// +inf when V = 0.
ShapeParams shape_param(const InvariantCoords& inv);

/// Shape parameter of the ellipse with axes (r, 1) using the exact perimeter.
double shape_param_exact_for_ratio(double r);

/// Inverts shape_param_exact_for_ratio by bisection; s must be >= 1.
double aspect_ratio_from_shape(double s);

EllipseGeometry ellipse_geometry(const MembraneConfig& cfg);

/// Ellipse with the given semi-axes and orientation; L, S and E computed
/// from (a, b) alone.
EllipseGeometry ellipse_from_axes(double a, double b, double theta);

/// n points (a cos t, b sin t) rotated by theta, t = 2 pi k / n.
std::vector<PlanePoint> boundary_polyline(const EllipseGeometry& geom, std::size_t n);

/// Semi-axes from invariants: a^2 = U + sqrt(U^2 - V), b^2 = V / a^2.
PrincipalAxes axes_from_invariants(const InvariantCoords& inv) noexcept;

}  // namespace fuzzy
