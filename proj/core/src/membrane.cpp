#include "fuzzy/membrane.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fuzzy {

double dot(const Vec3& a, const Vec3& b) noexcept {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 cross(const Vec3& a, const Vec3& b) noexcept {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm_sq(const Vec3& a) noexcept { return dot(a, a); }

TracelessHermitian2::Entries TracelessHermitian2::entries() const noexcept {
  return {{{std::complex<double>(diag_, 0.0), std::conj(lower_)},
           {lower_, std::complex<double>(-diag_, 0.0)}}};
}

// sigma1 = [[0,1],[1,0]], sigma2 = [[0,-i],[i,0]], sigma3 = diag(1,-1); the
// lower entry of v.sigma is v1 + i v2.
TracelessHermitian2 compose_matrix(const Vec3& v) noexcept {
  return TracelessHermitian2(v[2], std::complex<double>(v[0], v[1]));
}

Vec3 decompose_matrix(const TracelessHermitian2& m) noexcept {
  return {m.lower().real(), m.lower().imag(), m.diagonal()};
}

double raw_area_product(const MembraneConfig& cfg) noexcept { return norm_sq(cross(cfg.x, cfg.y)); }

InvariantCoords invariants(const MembraneConfig& cfg) noexcept {
  InvariantCoords inv;
  inv.U = 0.5 * (norm_sq(cfg.x) + norm_sq(cfg.y));
  inv.V = std::clamp(raw_area_product(cfg), 0.0, inv.U * inv.U);
  inv.W = inv.U > 0.0 ? inv.V / (inv.U * inv.U) : 0.0;
  return inv;
}

double potential(const MembraneConfig& cfg, double kappa) noexcept {
  return kappa * invariants(cfg).V;
}

namespace {

using C2 = TracelessHermitian2::Entries;

C2 matmul(const C2& a, const C2& b) {
  C2 r{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
    }
  }
  return r;
}

}  // namespace

double commutator_trace_sq(const MembraneConfig& cfg) noexcept {
  const C2 X = compose_matrix(cfg.x).entries();
  const C2 Y = compose_matrix(cfg.y).entries();
  const C2 xy = matmul(X, Y);
  const C2 yx = matmul(Y, X);
  C2 comm{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) comm[i][j] = xy[i][j] - yx[i][j];
  }
  const C2 sq = matmul(comm, comm);
  return (sq[0][0] + sq[1][1]).real();
}

PlanePoint membrane_point(const MembraneConfig& cfg, double theta, double phi) noexcept {
  const double st = std::sin(theta);
  const Vec3 n = {std::cos(phi) * st, std::sin(phi) * st, std::cos(theta)};
  return {dot(cfg.x, n), dot(cfg.y, n)};
}

bool is_rotation(const Mat3& r, double tol) noexcept {
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += r[k][i] * r[k][j];
      if (!(std::abs(s - (i == j ? 1.0 : 0.0)) <= tol)) return false;
    }
  }
  const double det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1]) -
                     r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0]) +
                     r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
  return std::abs(det - 1.0) <= tol;
}

namespace {

Vec3 apply(const Mat3& r, const Vec3& v) noexcept {
  return {r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
          r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
          r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2]};
}

}  // namespace

MembraneConfig rotate_so3(const MembraneConfig& cfg, const Mat3& rotation) {
  if (!is_rotation(rotation)) throw std::invalid_argument("rotate_so3: matrix is not in SO(3)");
  return {apply(rotation, cfg.x), apply(rotation, cfg.y)};
}

MembraneConfig rotate_so2(const MembraneConfig& cfg, double alpha) noexcept {
  const double c = std::cos(alpha);
  const double s = std::sin(alpha);
  MembraneConfig out;
  for (std::size_t i = 0; i < 3; ++i) {
    out.x[i] = cfg.x[i] * c - cfg.y[i] * s;
    out.y[i] = cfg.x[i] * s + cfg.y[i] * c;
  }
  return out;
}

Mat3 axis_rotation(int axis, double angle) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("axis_rotation: axis must be 0, 1 or 2");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat3 r{};
  const int i = (axis + 1) % 3;
  const int j = (axis + 2) % 3;
  r[axis][axis] = 1.0;
  r[i][i] = c;
  r[i][j] = -s;
  r[j][i] = s;
  r[j][j] = c;
  return r;
}

Mat3 random_rotation(num::RngStream& rng) {
  const double u1 = rng.uniform();
  const double u2 = 2.0 * std::numbers::pi * rng.uniform();
  const double u3 = 2.0 * std::numbers::pi * rng.uniform();
  const double a = std::sqrt(1.0 - u1);
  const double b = std::sqrt(u1);
  const double w = a * std::sin(u2);
  const double x = a * std::cos(u2);
  const double y = b * std::sin(u3);
  const double z = b * std::cos(u3);
  return {{{1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w)},
           {2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w)},
           {2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y)}}};
}

double gauge_invariance_residual(const std::function<double(const MembraneConfig&)>& f,
                                 const MembraneConfig& cfg, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gauge_invariance_residual: step must be positive");
  double worst = 0.0;
  for (int axis = 0; axis < 3; ++axis) {
    const double plus = f(rotate_so3(cfg, axis_rotation(axis, step)));
    const double minus = f(rotate_so3(cfg, axis_rotation(axis, -step)));
    worst = std::max(worst, std::abs(plus - minus) / (2.0 * step));
  }
  return worst;
}

MembraneConfig config_with_invariants(double U, double V, num::RngStream& rng) {
  if (!(U >= 0.0) || !(V >= 0.0) || V > U * U) {
    throw std::invalid_argument("config_with_invariants: need U >= 0 and 0 <= V <= U^2");
  }
  const double reach = std::sqrt(std::max(0.0, U * U - V));
  const double w = reach * (2.0 * rng.uniform() - 1.0);
  const double a = U + w;
  const double b = U - w;
  const double ab = a * b;
  const double sin2 = ab > 0.0 ? std::min(1.0, V / ab) : 0.0;
  const double sin_g = std::sqrt(sin2);
  const double cos_g = std::sqrt(1.0 - sin2) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
  MembraneConfig cfg;
  cfg.x = {std::sqrt(a), 0.0, 0.0};
  cfg.y = {std::sqrt(b) * cos_g, std::sqrt(b) * sin_g, 0.0};
  cfg = rotate_so3(cfg, random_rotation(rng));
  return rotate_so2(cfg, 2.0 * std::numbers::pi * rng.uniform());
}

}  // namespace fuzzy
