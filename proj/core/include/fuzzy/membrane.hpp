#pragma once

#include <array>
#include <complex>
#include <functional>
#include <numbers>

#include "fuzzy/rng.hpp"

namespace fuzzy {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/// Default coupling of the rescaled SU(2) Hamiltonian, (4 pi)^2 / 27.
inline constexpr double kDefaultKappa = 16.0 * std::numbers::pi * std::numbers::pi / 27.0;

double dot(const Vec3& a, const Vec3& b) noexcept;
Vec3 cross(const Vec3& a, const Vec3& b) noexcept;
double norm_sq(const Vec3& a) noexcept;

/// Two traceless Hermitian 2x2 matrices written as vectors in the Pauli basis.
struct MembraneConfig {
  Vec3 x{};
  Vec3 y{};
};

/// Traceless Hermitian 2x2 matrix
///
///   [ d        conj(l) ]
///   [ l        -d      ]
///
/// stored by its real diagonal entry d and the complex lower entry l, so both
/// tracelessness and Hermiticity hold by construction.
class TracelessHermitian2 {
 public:
  using Entries = std::array<std::array<std::complex<double>, 2>, 2>;

  TracelessHermitian2() = default;
  TracelessHermitian2(double diagonal, std::complex<double> lower) : diag_(diagonal), lower_(lower) {}

  double diagonal() const noexcept { return diag_; }
  std::complex<double> lower() const noexcept { return lower_; }
  Entries entries() const noexcept;

 private:
  double diag_ = 0.0;
  std::complex<double> lower_{};
};

/// v1 sigma1 + v2 sigma2 + v3 sigma3.
TracelessHermitian2 compose_matrix(const Vec3& v) noexcept;
Vec3 decompose_matrix(const TracelessHermitian2& m) noexcept;

/// Rotation-invariant coordinates. W is 0 at the zero configuration.
struct InvariantCoords {
  double U = 0.0;
  double V = 0.0;
  double W = 0.0;
};

/// U = (|x|^2 + |y|^2) / 2, V = |x cross y|^2 clamped to [0, U^2], W = V / U^2.
InvariantCoords invariants(const MembraneConfig& cfg) noexcept;

/// Same V before clamping, for domain checks.
double raw_area_product(const MembraneConfig& cfg) noexcept;

double potential(const MembraneConfig& cfg, double kappa = kDefaultKappa) noexcept;

/// Tr([X, Y]^2) by explicit complex 2x2 arithmetic; equals -8 V.
double commutator_trace_sq(const MembraneConfig& cfg) noexcept;

struct PlanePoint {
  double X = 0.0;
  double Y = 0.0;
};

/// Transverse-plane image of the sphere point (theta, phi): (x.n, y.n).
PlanePoint membrane_point(const MembraneConfig& cfg, double theta, double phi) noexcept;

/// Applies an SO(3) rotation to both vectors. The matrix must be orthogonal
/// with determinant +1 to 1e-10, otherwise std::invalid_argument is thrown.
MembraneConfig rotate_so3(const MembraneConfig& cfg, const Mat3& rotation);

/// (x, y) -> (x cos a - y sin a, x sin a + y cos a).
MembraneConfig rotate_so2(const MembraneConfig& cfg, double alpha) noexcept;

bool is_rotation(const Mat3& r, double tol = 1e-10) noexcept;
Mat3 axis_rotation(int axis, double angle);
/// Uniformly distributed rotation (random unit quaternion).
Mat3 random_rotation(num::RngStream& rng);

/// Max |d/d eps f(R_k(eps) cfg)| over the three simultaneous-rotation flows,
/// by central differences with the given step.
double gauge_invariance_residual(const std::function<double(const MembraneConfig&)>& f,
                                 const MembraneConfig& cfg, double step);

/// A random configuration whose invariants are the given (U, V), V <= U^2.
MembraneConfig config_with_invariants(double U, double V, num::RngStream& rng);

}  // namespace fuzzy
