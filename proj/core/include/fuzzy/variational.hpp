#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "fuzzy/quadrature.hpp"
#include "fuzzy/rng.hpp"

namespace fuzzy {

/// Parameters of the trial family Psi = sqrt(4 mu (mu+nu)^2) exp(-(mu U + nu sqrt(V))).
struct VariationalParams {
  double mu = 1.0;
  double nu = 0.0;
};

/// Throws std::invalid_argument unless mu > 0, nu >= 0.
void validate(const VariationalParams& p);

struct GroundStateModel {
  VariationalParams params;
  double energy = 0.0;
  double kappa = 0.0;
};

/// 4 mu (mu + nu)^2: the squared normalization of the trial function on
/// the constrained domain {0 <= V <= U^2}.
inline double trial_norm_sq(const VariationalParams& p) {
  return 4.0 * p.mu * (p.mu + p.nu) * (p.mu + p.nu);
}

double trial_psi(const VariationalParams& p, double U, double V);

/// Closed-form energy expectation
///   E = (3 mu + 2 nu + nu^2 / mu + 3 kappa / (mu + nu)^2) / 2.
template <class Real>
Real energy_closed(Real mu, Real nu, Real kappa) {
  const Real s = mu + nu;
  return (Real(3) * mu + Real(2) * nu + nu * nu / mu + Real(3) * kappa / (s * s)) / Real(2);
}

double energy_closed(const VariationalParams& p, double kappa);

/// Local energy H Psi / Psi of the trial family, as a function of (U, t = sqrt V).
double trial_local_energy(const VariationalParams& p, double kappa, double U, double t);

/// Applies
///   6 f_U + 8 U f_V + 2 U f_UU + 8 V f_UV + 8 U V f_VV
/// (the R^6 Laplacian restricted to functions of U and V) using central
/// differences with one Richardson level. Throws std::domain_error when
/// the stencil would leave {U > 0, 0 < V < U^2}.
double uv_laplacian_apply(const std::function<double(double, double)>& f, double U, double V);

/// Integral of Psi (-Delta/2 + kappa V) Psi over the constrained domain,
/// with the Laplacian applied analytically.
num::Integral energy_quadrature(const VariationalParams& p, double kappa, double tol = 1e-11);

/// mu = (3 kappa / 4)^(1/3), nu = (sqrt 2 - 1) mu.
GroundStateModel minimize_closed(double kappa);

/// Nelder-Mead on energy_closed from init. Throws num::ConvergenceError if
/// the iteration budget runs out.
VariationalParams minimize_numeric(double kappa, const VariationalParams& init);

/// Ground-state density 4 mu (mu + nu)^2 exp(-2 (mu U + nu sqrt V)) on the
/// constrained domain, 0 elsewhere.
double pdf(const GroundStateModel& model, double U, double V) noexcept;

struct NormalizationReport {
  num::Integral constrained;
  /// Integral of the same density over the whole quadrant U, V >= 0.
  double unconstrained = 0.0;
};

NormalizationReport normalization_quadrature(const GroundStateModel& model, double tol = 1e-12);

struct MeasureConstant {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// C = (integral of Psi^2 over R^6 in d^3x d^3y) / (integral of Psi^2 over
/// the constrained (U, V) domain), the first estimated by importance
/// sampling from a Gaussian of variance 1 / mu per coordinate. For every
/// trial pair the exact value is 4 pi^3.
MeasureConstant measure_constant_mc(const VariationalParams& p, std::size_t n,
                                    num::RngStream& stream, double tol = 1e-12);

}  // namespace fuzzy
