#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace fuzzy::num {

/// Bisection for a sign change of g on [lo, hi]; stops once hi - lo <= tol.
/// Throws std::invalid_argument if g(lo) and g(hi) have the same strict sign.
double bisect_root(const std::function<double(double)>& g, double lo, double hi, double tol);

struct SimplexResult {
  std::array<double, 2> x{};
  long double value = 0.0L;
  std::size_t iterations = 0;
  double spread = 0.0;
};

/// Nelder-Mead in two dimensions. The objective returns long double so that
/// the comparisons near the optimum resolve below double epsilon; it may
/// return +inf to mark infeasible points. Converged when every vertex lies
/// within x_tol (scaled by max(1, |x|)) of the best one. Throws
/// ConvergenceError after max_iterations.
SimplexResult nelder_mead(const std::function<long double(const std::array<double, 2>&)>& f,
                          std::array<double, 2> start, double initial_step, double x_tol,
                          std::size_t max_iterations = 20000);

}  // namespace fuzzy::num
