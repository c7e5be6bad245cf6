#include "fuzzy/special.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fuzzy/quadrature.hpp"

namespace fuzzy::num {

double complete_elliptic_e(double m) {
  if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("complete_elliptic_e: m outside [0, 1]");
  if (m == 0.0) return std::numbers::pi / 2.0;
  if (m == 1.0) return 1.0;

  double a = 1.0;
  double b = std::sqrt(1.0 - m);
  double c2 = m;  // c_n^2
  double power = 0.5;
  double sum = power * c2;
  for (int n = 0; n < 64; ++n) {
    const double an = 0.5 * (a + b);
    const double cn = 0.5 * (a - b);
    b = std::sqrt(a * b);
    a = an;
    c2 = cn * cn;
    power *= 2.0;
    sum += power * c2;
    if (c2 <= 1e-34 * a * a) break;
  }
  return std::numbers::pi / (2.0 * a) * (1.0 - sum);
}

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::invalid_argument("gamma_fn: argument must be positive");
  if (x < 0.5) return gamma_fn(x + 1.0) / x;

  static constexpr std::array<double, 14> cof = {
      57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
      -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
      -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
      .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
      -.261908384015814087e-4, .368991826595316234e-5};
  double y = x;
  double tmp = x + 5.24218750000000000;
  tmp = (x + 0.5) * std::log(tmp) - tmp;
  double ser = 0.999999999999997092;
  for (double c : cof) ser += c / ++y;
  return std::exp(tmp + std::log(2.5066282746310005 * ser / x));
}

double hyp2f1(double a, double b, double c, double z) {
  if (c <= 0.0 && c == std::floor(c)) {
    throw std::invalid_argument("hyp2f1: c is a non-positive integer");
  }
  if (!(std::abs(z) <= 0.9)) throw std::invalid_argument("hyp2f1: |z| must be <= 0.9");

  constexpr int kBudget = 5000;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 0; k < kBudget; ++k) {
    const double kd = static_cast<double>(k);
    term *= (a + kd) * (b + kd) / ((c + kd) * (kd + 1.0)) * z;
    sum += term;
    if (term == 0.0 || std::abs(term) < 1e-16 * std::abs(sum)) return sum;
  }
  throw ConvergenceError("hyp2f1: series did not converge", std::abs(term));
}

}  // namespace fuzzy::num
