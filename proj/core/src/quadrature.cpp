#include "fuzzy/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <limits>
#include <mutex>
#include <numbers>
#include <queue>

namespace fuzzy::num {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    comp_ += (sum_ - t) + x;
  } else {
    comp_ += (x - t) + sum_;
  }
  sum_ = t;
}

QuadratureRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: order must be positive");
  QuadratureRule rule{RuleKind::gauss_legendre, std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd + 1.0) * z * p2 - jd * p3) / (jd + 1.0);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

QuadratureRule gauss_laguerre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_laguerre: order must be positive");
  if (n > 160) throw std::invalid_argument("gauss_laguerre: order above 160 underflows");
  QuadratureRule rule{RuleKind::gauss_laguerre, std::vector<double>(n), std::vector<double>(n)};
  const double nd = static_cast<double>(n);
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i == 0) {
      z = 3.0 / (1.0 + 2.4 * nd);
    } else if (i == 1) {
      z += 15.0 / (1.0 + 2.5 * nd);
    } else {
      const double ai = static_cast<double>(i - 1);
      z += (1.0 + 2.55 * ai) / (1.9 * ai) * (z - rule.nodes[i - 2]);
    }
    double pp = 0.0;
    double p2 = 0.0;
    double step = 0.0;
    int iter = 0;
    for (; iter < 200; ++iter) {
      double p1 = 1.0;
      p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = ((2.0 * jd + 1.0 - z) * p2 - jd * p3) / (jd + 1.0);
      }
      pp = (nd * p1 - nd * p2) / z;
      const double z1 = z;
      z = z1 - p1 / pp;
      step = std::abs(z - z1);
      if (step <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    // Past n ~ 100 the iteration can bounce by a few ulp without settling.
    if (iter == 200 && step > 1e-12 * std::max(1.0, std::abs(z))) throw ConvergenceError("gauss_laguerre: Newton iteration stalled", 0.0);
    rule.nodes[i] = z;
    rule.weights[i] = -1.0 / (pp * nd * p2);
  }
  return rule;
}

namespace {

template <class Make>
const QuadratureRule& cached(std::map<std::size_t, QuadratureRule>& cache, std::mutex& m,
                             std::size_t n, Make make) {
  std::lock_guard lock(m);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& cached_gauss_legendre(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex m;
  return cached(cache, m, n, gauss_legendre);
}

const QuadratureRule& cached_gauss_laguerre(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex m;
  return cached(cache, m, n, gauss_laguerre);
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod 7/15

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[static_cast<std::size_t>(j)];
    const double fsum = f(c - dx) + f(c + dx);
    kron += kWgk[static_cast<std::size_t>(j)] * fsum;
    if (j % 2 == 1) gauss += kWg[static_cast<std::size_t>(j / 2)] * fsum;
  }
  return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

}  // namespace

Integral integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                            double rel_tol, double abs_tol, std::size_t max_intervals) {
  if (!(b > a)) {
    if (a == b) return {0.0, 0.0, true};
    auto r = integrate_adaptive(f, b, a, rel_tol, abs_tol, max_intervals);
    r.value = -r.value;
    return r;
  }
  std::priority_queue<Segment> heap;
  Segment first = kronrod15(f, a, b);
  heap.push(first);
  double total = first.value;
  double err = first.error;
  std::size_t count = 1;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_intervals) {
    Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      heap.push(worst);
      break;
    }
    Segment left = kronrod15(f, worst.a, mid);
    Segment right = kronrod15(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum from the leaves so the running update's round-off does not leak.
  CompensatedSum value;
  CompensatedSum error;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  const double v = value.value();
  const double e = error.value();
  return {v, e, e <= std::max(abs_tol, rel_tol * std::abs(v))};
}

// ---------------------------------------------------------------------------
// Constrained (U, V) integrals

namespace {

// Trapezoid sum in tau over both double-exponential maps at step h.
double de_product(const std::function<double(double, double)>& f, double mu, double nu,
                  double h) {
  constexpr double kTauU = 4.5;
  constexpr double kTauS = 4.0;
  const double pi = std::numbers::pi;

  const auto ns = static_cast<long>(std::ceil(kTauS / h));
  std::vector<double> s_nodes;
  std::vector<double> s_weights;
  s_nodes.reserve(static_cast<std::size_t>(2 * ns + 1));
  s_weights.reserve(static_cast<std::size_t>(2 * ns + 1));
  for (long k = -ns; k <= ns; ++k) {
    const double tau = static_cast<double>(k) * h;
    const double y = 0.5 * pi * std::sinh(tau);
    const double s = 1.0 / (1.0 + std::exp(-2.0 * y));
    const double one_minus_s = 1.0 / (1.0 + std::exp(2.0 * y));
    const double w = h * pi * std::cosh(tau) * s * one_minus_s;
    if (w == 0.0 || s == 0.0) continue;
    s_nodes.push_back(s);
    s_weights.push_back(w);
  }

  const auto nu_count = static_cast<long>(std::ceil(kTauU / h));
  CompensatedSum total;
  for (long k = -nu_count; k <= nu_count; ++k) {
    const double tau = static_cast<double>(k) * h;
    const double e = std::exp(-tau);
    const double u = std::exp(tau - e);
    const double wu = h * u * (1.0 + e) * std::exp(-u);
    if (wu == 0.0 || u == 0.0) continue;
    const double U = u / (2.0 * mu);
    CompensatedSum inner;
    for (std::size_t j = 0; j < s_nodes.size(); ++j) {
      const double s = s_nodes[j];
      const double t = U * s;
      const double decay = std::exp(-2.0 * nu * t);
      if (decay == 0.0) continue;
      inner += s_weights[j] * 2.0 * t * U * f(U, t) * decay;
    }
    total += wu / (2.0 * mu) * inner.value();
  }
  return total.value();
}

double gauss_product(const std::function<double(double, double)>& f, double mu, double nu,
                     std::size_t n) {
  const QuadratureRule& lag = cached_gauss_laguerre(n);
  const QuadratureRule& leg = cached_gauss_legendre(n);
  CompensatedSum total;
  for (std::size_t i = 0; i < lag.order(); ++i) {
    const double U = lag.nodes[i] / (2.0 * mu);
    CompensatedSum inner;
    for (std::size_t j = 0; j < leg.order(); ++j) {
      const double s = 0.5 * (leg.nodes[j] + 1.0);
      const double t = U * s;
      inner += 0.5 * leg.weights[j] * 2.0 * t * U * f(U, t) * std::exp(-2.0 * nu * t);
    }
    total += lag.weights[i] / (2.0 * mu) * inner.value();
  }
  return total.value();
}

}  // namespace

Integral integrate_constrained(const std::function<double(double, double)>& f, double mu,
                               double nu, double tol, ConstrainedScheme scheme) {
  if (!(mu > 0.0)) throw std::invalid_argument("integrate_constrained: mu must be positive");
  if (!(mu + nu > 0.0)) throw std::invalid_argument("integrate_constrained: mu + nu must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("integrate_constrained: tol must be positive");

  double previous = 0.0;
  double diff = std::numeric_limits<double>::infinity();
  bool have_previous = false;

  auto check = [&](double current) -> bool {
    if (have_previous) {
      diff = std::abs(current - previous);
      if (diff <= tol * std::abs(current) || diff <= 1e-300) return true;
    }
    previous = current;
    have_previous = true;
    return false;
  };

  if (scheme == ConstrainedScheme::double_exponential) {
    for (int level = 0; level <= 7; ++level) {
      const double h = 0.5 / static_cast<double>(1 << level);
      const double current = de_product(f, mu, nu, h);
      if (check(current)) return {current, diff, true};
    }
  } else {
    for (std::size_t n = 8; n <= 128; n *= 2) {
      const double current = gauss_product(f, mu, nu, n);
      if (check(current)) return {current, diff, true};
    }
  }
  return {previous, diff, false};
}

}  // namespace fuzzy::num
