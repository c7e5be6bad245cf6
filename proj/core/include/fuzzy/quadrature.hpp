#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fuzzy::num {

/// Thrown when an iterative numerical routine exhausts its budget without
/// meeting the requested tolerance. Carries the best error estimate reached.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double achieved_error)
      : std::runtime_error(what), achieved_error_(achieved_error) {}
  double achieved_error() const noexcept { return achieved_error_; }

 private:
  double achieved_error_;
};

/// Neumaier-compensated accumulator. Summation order still matters for the
/// last bit, so callers that need reproducibility keep the order fixed.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

enum class RuleKind { gauss_legendre, gauss_laguerre };

/// Nodes and weights of a Gauss rule. Legendre rules live on [-1, 1];
/// Laguerre rules integrate against e^{-u} on [0, inf).
struct QuadratureRule {
  RuleKind kind;
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t order() const noexcept { return nodes.size(); }
};

QuadratureRule gauss_legendre(std::size_t n);
QuadratureRule gauss_laguerre(std::size_t n);

/// Cached rules; the returned reference lives for the program lifetime.
const QuadratureRule& cached_gauss_legendre(std::size_t n);
const QuadratureRule& cached_gauss_laguerre(std::size_t n);

struct Integral {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval. Used for
/// one-dimensional oracles and marginal distributions.
Integral integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double rel_tol = 1e-12, double abs_tol = 1e-300,
                            std::size_t max_intervals = 4000);

enum class ConstrainedScheme {
  /// tanh-sinh in s = t/U, exponential-decay double-exponential map in U.
  double_exponential,
  /// Gauss-Legendre in s = t/U times Gauss-Laguerre in u = 2 mu U.
  gauss_product,
};

/// Integral over the constrained (U, V) domain {U >= 0, 0 <= V <= U^2} with
/// V = t^2:
///
///   int_0^inf dU int_0^U dt 2t f(U, t) exp(-2 mu U - 2 nu t)
///
/// The resolution (level or order) is doubled until successive estimates
/// differ by less than tol relative. When the budget runs out the last
/// estimate is returned with converged = false and the achieved error.
Integral integrate_constrained(const std::function<double(double, double)>& f, double mu,
                               double nu, double tol = 1e-10,
                               ConstrainedScheme scheme = ConstrainedScheme::double_exponential);

}  // namespace fuzzy::num
