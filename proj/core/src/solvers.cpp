#include "fuzzy/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fuzzy/quadrature.hpp"

namespace fuzzy::num {

double bisect_root(const std::function<double(double)>& g, double lo, double hi, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisect_root: tol must be positive");
  if (lo > hi) std::swap(lo, hi);
  double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  if ((glo > 0.0) == (ghi > 0.0)) throw std::invalid_argument("bisect_root: interval does not bracket a root");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double gm = g(mid);
    if (gm == 0.0) return mid;
    if ((gm > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

namespace {

using Point = std::array<double, 2>;

Point affine(const Point& a, const Point& b, double t) {
  // a + t (b - a)
  return {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
}

}  // namespace

SimplexResult nelder_mead(const std::function<long double(const std::array<double, 2>&)>& f,
                          std::array<double, 2> start, double initial_step, double x_tol,
                          std::size_t max_iterations) {
  std::array<Point, 3> p = {start, Point{start[0] + initial_step, start[1]},
                            Point{start[0], start[1] + initial_step}};
  std::array<long double, 3> fv = {f(p[0]), f(p[1]), f(p[2])};

  auto spread = [&]() {
    double s = 0.0;
    for (int i = 1; i < 3; ++i) {
      for (int k = 0; k < 2; ++k) {
        const double scale = std::max(1.0, std::abs(p[0][k]));
        s = std::max(s, std::abs(p[i][k] - p[0][k]) / scale);
      }
    }
    return s;
  };

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    // Order: p[0] best, p[2] worst.
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] < fv[b]; });
    p = {p[idx[0]], p[idx[1]], p[idx[2]]};
    fv = {fv[idx[0]], fv[idx[1]], fv[idx[2]]};

    const double s = spread();
    if (s <= x_tol) return {p[0], fv[0], iter, s};

    const Point centroid = {0.5 * (p[0][0] + p[1][0]), 0.5 * (p[0][1] + p[1][1])};
    const Point reflected = affine(centroid, p[2], -1.0);
    const long double fr = f(reflected);

    if (fr < fv[0]) {
      const Point expanded = affine(centroid, p[2], -2.0);
      const long double fe = f(expanded);
      if (fe < fr) {
        p[2] = expanded;
        fv[2] = fe;
      } else {
        p[2] = reflected;
        fv[2] = fr;
      }
      continue;
    }
    if (fr < fv[1]) {
      p[2] = reflected;
      fv[2] = fr;
      continue;
    }
    // Contraction, outside if the reflection improved on the worst point.
    const bool outside = fr < fv[2];
    const Point contracted = outside ? affine(centroid, p[2], -0.5) : affine(centroid, p[2], 0.5);
    const long double fc = f(contracted);
    if (fc < (outside ? fr : fv[2])) {
      p[2] = contracted;
      fv[2] = fc;
      continue;
    }
    for (int i = 1; i < 3; ++i) {
      p[i] = affine(p[0], p[i], 0.5);
      fv[i] = f(p[i]);
    }
  }
  throw ConvergenceError("nelder_mead: iteration budget exhausted", spread());
}

}  // namespace fuzzy::num
