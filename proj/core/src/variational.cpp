#include "fuzzy/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "fuzzy/membrane.hpp"
#include "fuzzy/solvers.hpp"

namespace fuzzy {

void validate(const VariationalParams& p) {
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw std::invalid_argument("VariationalParams: mu must be positive");
  if (!(p.nu >= 0.0) || !std::isfinite(p.nu)) throw std::invalid_argument("VariationalParams: nu must be nonnegative");
}

double trial_psi(const VariationalParams& p, double U, double V) {
  validate(p);
  if (!(U >= 0.0) || !(V >= 0.0)) throw std::invalid_argument("trial_psi: U and V must be nonnegative");
  if (V > U * U) throw std::invalid_argument("trial_psi: V > U^2 is outside the constraint surface");
  return std::sqrt(trial_norm_sq(p)) * std::exp(-(p.mu * U + p.nu * std::sqrt(V)));
}

double energy_closed(const VariationalParams& p, double kappa) {
  validate(p);
  return energy_closed<double>(p.mu, p.nu, kappa);
}

// With g = -(mu U + nu t), t = sqrt V, the UV operator gives
//   Delta g = -6 mu - 2 U nu / t,   |grad g|^2 = 2 U (mu^2 + nu^2) + 4 mu nu t,
// and H Psi / Psi = -(Delta g + |grad g|^2) / 2 + kappa t^2.
double trial_local_energy(const VariationalParams& p, double kappa, double U, double t) {
  return 3.0 * p.mu + U * p.nu / t - U * (p.mu * p.mu + p.nu * p.nu) - 2.0 * p.mu * p.nu * t +
         kappa * t * t;
}

namespace {

struct Partials {
  double fu, fv, fuu, fuv, fvv;
};

Partials stencil(const std::function<double(double, double)>& f, double U, double V, double hu,
                 double hv) {
  const double f0 = f(U, V);
  const double fup = f(U + hu, V);
  const double fum = f(U - hu, V);
  const double fvp = f(U, V + hv);
  const double fvm = f(U, V - hv);
  const double fpp = f(U + hu, V + hv);
  const double fpm = f(U + hu, V - hv);
  const double fmp = f(U - hu, V + hv);
  const double fmm = f(U - hu, V - hv);
  return {(fup - fum) / (2.0 * hu), (fvp - fvm) / (2.0 * hv), (fup - 2.0 * f0 + fum) / (hu * hu),
          (fpp - fpm - fmp + fmm) / (4.0 * hu * hv), (fvp - 2.0 * f0 + fvm) / (hv * hv)};
}

}  // namespace

double uv_laplacian_apply(const std::function<double(double, double)>& f, double U, double V) {
  const double hu = 1e-4 * std::max(1.0, std::abs(U));
  const double hv = 1e-4 * std::max(1.0, std::abs(V));
  if (!(U - hu > 0.0) || !(V - hv > 0.0) || !(V + hv < (U - hu) * (U - hu))) {
    throw std::domain_error("uv_laplacian_apply: (U, V) too close to the domain boundary");
  }
  const Partials coarse = stencil(f, U, V, hu, hv);
  const Partials fine = stencil(f, U, V, 0.5 * hu, 0.5 * hv);
  auto rich = [](double c, double fn) { return (4.0 * fn - c) / 3.0; };
  const double fu = rich(coarse.fu, fine.fu);
  const double fv = rich(coarse.fv, fine.fv);
  const double fuu = rich(coarse.fuu, fine.fuu);
  const double fuv = rich(coarse.fuv, fine.fuv);
  const double fvv = rich(coarse.fvv, fine.fvv);
  return 6.0 * fu + 8.0 * U * fv + 2.0 * U * fuu + 8.0 * V * fuv + 8.0 * U * V * fvv;
}

num::Integral energy_quadrature(const VariationalParams& p, double kappa, double tol) {
  validate(p);
  const double norm = trial_norm_sq(p);
  return num::integrate_constrained(
      [&](double U, double t) { return norm * trial_local_energy(p, kappa, U, t); }, p.mu, p.nu,
      tol, num::ConstrainedScheme::gauss_product);
}

GroundStateModel minimize_closed(double kappa) {
  if (!(kappa > 0.0)) throw std::invalid_argument("minimize_closed: kappa must be positive");
  GroundStateModel m;
  m.kappa = kappa;
  m.params.mu = std::cbrt(0.75 * kappa);
  m.params.nu = (std::numbers::sqrt2 - 1.0) * m.params.mu;
  m.energy = energy_closed(m.params, kappa);
  return m;
}

VariationalParams minimize_numeric(double kappa, const VariationalParams& init) {
  if (!(kappa > 0.0)) throw std::invalid_argument("minimize_numeric: kappa must be positive");
  validate(init);
  const long double k = kappa;
  auto objective = [k](const std::array<double, 2>& x) -> long double {
    if (!(x[0] > 0.0) || !(x[1] >= 0.0)) return std::numeric_limits<long double>::infinity();
    return energy_closed<long double>(x[0], x[1], k);
  };
  const double step = 0.25 * std::max({init.mu, init.nu, 0.1});
  const auto res = num::nelder_mead(objective, {init.mu, init.nu}, step, 1e-12);
  return {res.x[0], res.x[1]};
}

double pdf(const GroundStateModel& model, double U, double V) noexcept {
  if (!(U >= 0.0) || !(V >= 0.0) || V > U * U) return 0.0;
  const auto& p = model.params;
  return trial_norm_sq(p) * std::exp(-2.0 * (p.mu * U + p.nu * std::sqrt(V)));
}

NormalizationReport normalization_quadrature(const GroundStateModel& model, double tol) {
  const auto& p = model.params;
  validate(p);
  const double norm = trial_norm_sq(p);
  NormalizationReport r;
  r.constrained = num::integrate_constrained([norm](double, double) { return norm; }, p.mu, p.nu, tol);

  // Without the V <= U^2 constraint the density factorizes into a U part and
  // a V part; each is integrated separately.
  if (p.nu > 0.0) {
    const auto u_part = num::integrate_adaptive(
        [&](double U) { return std::exp(-2.0 * p.mu * U); }, 0.0, 40.0 / p.mu, 1e-13);
    const auto v_part = num::integrate_adaptive(
        [&](double t) { return 2.0 * t * std::exp(-2.0 * p.nu * t); }, 0.0, 40.0 / p.nu, 1e-13);
    r.unconstrained = norm * u_part.value * v_part.value;
  } else {
    r.unconstrained = std::numeric_limits<double>::infinity();
  }
  return r;
}

MeasureConstant measure_constant_mc(const VariationalParams& p, std::size_t n,
                                    num::RngStream& stream, double tol) {
  validate(p);
  if (n < 2) throw std::invalid_argument("measure_constant_mc: need at least 2 samples");
  const double norm = trial_norm_sq(p);
  const double sigma = 1.0 / std::sqrt(p.mu);
  // Gaussian proposal g(r) = (mu / 2 pi)^3 exp(-mu U); the weight
  // Psi^2 / g = norm (2 pi / mu)^3 exp(-mu U - 2 nu sqrt V) is bounded.
  const double scale = norm * std::pow(2.0 * std::numbers::pi / p.mu, 3);
  num::CompensatedSum sum;
  num::CompensatedSum sq;
  for (std::size_t i = 0; i < n; ++i) {
    MembraneConfig cfg;
    for (int k = 0; k < 3; ++k) cfg.x[k] = sigma * stream.normal();
    for (int k = 0; k < 3; ++k) cfg.y[k] = sigma * stream.normal();
    const InvariantCoords inv = invariants(cfg);
    const double w = scale * std::exp(-p.mu * inv.U - 2.0 * p.nu * std::sqrt(inv.V));
    sum += w;
    sq += w * w;
  }
  const double nn = static_cast<double>(n);
  const double mean = sum.value() / nn;
  const double var = std::max(0.0, (sq.value() / nn - mean * mean) * nn / (nn - 1.0));
  const double denom = num::integrate_constrained([norm](double, double) { return norm; }, p.mu,
                                                  p.nu, tol).value;
  return {mean / denom, std::sqrt(var / nn) / denom, n};
}

}  // namespace fuzzy
