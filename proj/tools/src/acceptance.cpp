#include "fuzzy/app/acceptance.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "fuzzy/app/report.hpp"
#include "fuzzy/dmc.hpp"
#include "fuzzy/ellipse.hpp"
#include "fuzzy/observables.hpp"
#include "fuzzy/variational.hpp"

namespace fuzzy::app {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

struct Check {
  CriterionResult& r;
  void operator()(bool ok, std::string line) {
    r.details.push_back((ok ? "ok   " : "FAIL ") + line);
    if (!ok) r.passed = false;
  }
  void info(std::string line) { r.details.push_back("info " + line); }
};

MembraneConfig random_config(num::RngStream& rng) {
  MembraneConfig c;
  for (double& v : c.x) v = rng.normal();
  for (double& v : c.y) v = rng.normal();
  return c;
}

// -- 1 ----------------------------------------------------------------------
void minimizer(const AcceptanceOptions& o, Check& check) {
  const double kappa = o.kappa;
  const GroundStateModel m = minimize_closed(kappa * (1.0 + o.kappa_perturbation));
  const double mu = m.params.mu;
  const double nu = m.params.nu;
  const double e_mu3 = rel_err(mu * mu * mu, 0.75 * kappa);
  check(e_mu3 <= 1e-12, fmt("mu_m^3 = 3 kappa / 4: relative error %.2e (tol 1e-12)", e_mu3));
  const double e_ratio = rel_err(nu / mu, kSqrt2 - 1.0);
  check(e_ratio <= 1e-12, fmt("nu_m / mu_m = sqrt2 - 1: relative error %.2e (tol 1e-12)", e_ratio));

  // Stationarity of the closed-form energy at kappa.
  const double s3 = std::pow(mu + nu, 3);
  const double d_mu = 0.5 * (3.0 - nu * nu / (mu * mu) - 6.0 * kappa / s3);
  const double d_nu = 0.5 * (2.0 + 2.0 * nu / mu - 6.0 * kappa / s3);
  const double grad = std::hypot(d_mu, d_nu);
  check(grad <= 1e-10, fmt("stationarity |grad E(mu_m, nu_m)| = %.2e (tol 1e-10)", grad));

  num::RngStream rng(o.seed, 101);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const VariationalParams start{0.2 + 4.8 * rng.uniform(), 3.0 * rng.uniform()};
    const VariationalParams p = minimize_numeric(kappa, start);
    worst = std::max({worst, rel_err(p.mu, mu), rel_err(p.nu, nu)});
  }
  check(worst <= 1e-6, fmt("minimize_numeric from 10 random starts: worst relative deviation %.2e (tol 1e-6)", worst));
}

// -- 2 ----------------------------------------------------------------------
void energy_consistency(const AcceptanceOptions& o, Check& check) {
  const double mus[] = {0.5, 1.0, 1.7, 2.5, 4.0};
  const double nus[] = {0.0, 0.25, 0.6, 1.2, 2.5};
  double worst = 0.0;
  for (double mu : mus) {
    for (double nu : nus) {
      const VariationalParams p{mu, nu};
      worst = std::max(worst, rel_err(energy_quadrature(p, o.kappa).value, energy_closed(p, o.kappa)));
    }
  }
  check(worst <= 1e-6, fmt("quadrature vs closed-form energy on a 5x5 grid: worst relative error %.2e (tol 1e-6)", worst));

  const GroundStateModel m = minimize_closed(o.kappa);
  const double oracle = 3.0 * std::cbrt(0.75 * o.kappa);
  const double q = energy_quadrature(m.params, o.kappa).value;
  check(rel_err(q, oracle) <= 1e-6,
        fmt("energy at minimizer: quadrature %.8f vs 3 (3 kappa/4)^(1/3) = %.8f", q, oracle));
  if (o.kappa == kDefaultKappa) {
    // The quoted 4.9108 carries four decimals and is truncated, not rounded.
    check(std::abs(oracle - 4.9108) < 1e-4, fmt("oracle energy %.6f vs quoted 4.9108 (last quoted digit)", oracle));
  }
  const double printed = printed_energy(o.kappa);
  const bool differs = rel_err(printed, oracle) > 1e-6;
  if (o.kappa == kDefaultKappa) {
    check(differs, fmt("published kappa^(-1/3) energy form %.6f differs from the minimized %.6f: flagged", printed,
                       oracle));
  } else {
    check.info(fmt("published kappa^(-1/3) energy form %.6f vs minimized %.6f", printed, oracle));
  }
}

// -- 3 ----------------------------------------------------------------------
void normalization(const AcceptanceOptions& o, Check& check) {
  const GroundStateModel m = minimize_closed(o.kappa);
  const NormalizationReport n = normalization_quadrature(m);
  check(std::abs(n.constrained.value - 1.0) <= 1e-8,
        fmt("constrained integral of P = %.12f (tol 1e-8)", n.constrained.value));
  const double target = 6.0 + 4.0 * kSqrt2;
  check(rel_err(n.unconstrained, target) <= 1e-8,
        fmt("unconstrained integral = %.9f vs 6 + 4 sqrt2 = %.9f", n.unconstrained, target));
}

// -- 4 ----------------------------------------------------------------------
void reference_constants(const AcceptanceOptions& o, Check& check) {
  const GroundStateModel m = minimize_closed(o.kappa);
  const MomentOptions opts{1e-11, nullptr};
  const double k3 = std::cbrt(o.kappa);
  const double k6 = std::pow(o.kappa, 1.0 / 6.0);
  const double a = expected_area(m, opts).quadrature.value * k3;
  const double e3 = expected_e3(m, opts).quadrature.value;
  const double l = expected_perimeter(m, opts).quadrature.value * k6;
  const double s = expected_shape(m, opts).quadrature.value;
  check(std::abs(a - kReferenceAreaScaled) <= 0.001, fmt("<A> kappa^(1/3) = %.6f vs 4.890 +- 0.001", a));
  check(std::abs(e3 - kReferenceE3) <= 0.0005, fmt("<E3> = %.6f vs 0.8337 +- 0.0005", e3));
  check(std::abs(l - kReferencePerimeterScaled) <= 0.002,
        fmt("<L> kappa^(1/6) = %.6f vs 6.789 +- 0.002 (gap %.4f)", l, l - kReferencePerimeterScaled));
  check(std::abs(s - kReferenceShape) <= 0.002, fmt("<S> = %.6f vs 2.225 +- 0.002", s));
}

// -- 5 ----------------------------------------------------------------------
void closed_forms(const AcceptanceOptions& o, Check& check) {
  const GroundStateModel m = minimize_closed(o.kappa);
  const MomentOptions opts{1e-11, nullptr};
  for (const auto& rep : {expected_area(m, opts), expected_e3(m, opts), expected_perimeter(m, opts),
                          expected_shape(m, opts)}) {
    const double q = rep.quadrature.value;
    const bool ok = rep.closed_form_agrees(1e-4);
    check(ok, fmt("%s: closed form %.10f vs quadrature %.10f, relative gap %.2e (tol 1e-4)", rep.name.c_str(),
                  rep.closed_form.value_or(NAN), q, rep.closed_form ? rel_err(*rep.closed_form, q) : NAN));
    for (const auto& v : rep.variants) {
      const double gap = rel_err(v.value, q);
      check.info(fmt("%s [%s] = %.10f, relative gap %.2e%s", rep.name.c_str(), v.label.c_str(), v.value, gap,
                     gap <= 1e-4 ? "" : " (flagged)"));
    }
    for (const auto& n : rep.notes) check.info(rep.name + ": " + n);
  }
}

// -- 6 ----------------------------------------------------------------------
void monte_carlo(const AcceptanceOptions& o, Check& check) {
  const GroundStateModel m = minimize_closed(o.kappa);
  const SampleBatch batch = sample_uv_parallel(m, 1000000, o.seed, o.workers);
  const MomentOptions opts{1e-11, &batch};
  for (const auto& rep : {expected_area(m, opts), expected_e3(m, opts), expected_perimeter(m, opts),
                          expected_shape(m, opts)}) {
    const auto& mc = *rep.monte_carlo;
    const double z = (mc.mean - rep.quadrature.value) / mc.std_error;
    check(std::abs(z) <= 3.0, fmt("%s: MC %.6f +- %.6f vs quadrature %.6f (%.2f sigma)", rep.name.c_str(), mc.mean,
                                  mc.std_error, rep.quadrature.value, z));
  }
  const double p = (kSqrt2 - 1.0) * (kSqrt2 - 1.0) / 2.0;
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(batch.proposals));
  const double z = (batch.acceptance_rate - p) / sigma;
  check(std::abs(z) <= 3.0, fmt("acceptance rate %.6f vs (sqrt2 - 1)^2 / 2 = %.6f (%.2f sigma)", batch.acceptance_rate,
                                p, z));
}

// -- 7 ----------------------------------------------------------------------
void geometry_bounds(const AcceptanceOptions&, Check& check) {
  double worst_l = 0.0;
  double worst_s = 0.0;
  const int n = 1000;
  for (int k = 0; k < n; ++k) {
    const double W = static_cast<double>(k) / (n - 1);
    const InvariantCoords inv{1.0, W, W};
    const PrincipalAxes ax = axes_from_invariants(inv);
    const double le = perimeter_exact(ax.a, ax.b);
    const double la = perimeter_approx(inv);
    worst_l = std::max(worst_l, rel_err(la, le));
    if (W > 0.0) {
      const ShapeParams s = shape_param(inv);
      worst_s = std::max(worst_s, rel_err(s.approx, s.exact));
    }
  }
  check(worst_l <= 0.04, fmt("perimeter approximation: max relative error %.4f over %d W points (bound 0.04)", worst_l, n));
  check(worst_s <= 0.08, fmt("shape approximation: max relative error %.4f (bound 0.08)", worst_s));

  const InvariantCoords circle{1.0, 1.0, 1.0};
  const double lc = perimeter_approx(circle);
  const PrincipalAxes axc = axes_from_invariants(circle);
  check(rel_err(lc, 2.0 * kPi) <= 1e-12 && rel_err(perimeter_exact(axc.a, axc.b), 2.0 * kPi) <= 1e-12,
        fmt("W = 1: approximate %.15f, exact %.15f, 2 pi = %.15f", lc, perimeter_exact(axc.a, axc.b), 2.0 * kPi));
  check(rel_err(shape_param(circle).approx, 1.0) <= 1e-12, "W = 1: shape parameter 1");
  const InvariantCoords needle{1.0, 0.0, 0.0};
  const PrincipalAxes axn = axes_from_invariants(needle);
  const double ln = perimeter_approx(needle);
  const double ln_exact = perimeter_exact(axn.a, axn.b);
  check(rel_err(ln, 4.0 * kSqrt2) <= 1e-12 && rel_err(ln_exact, 4.0 * kSqrt2) <= 1e-12,
        fmt("V = 0: approximate %.15f, exact %.15f, 4 sqrt2 = %.15f", ln, ln_exact, 4.0 * kSqrt2));
}

// -- 8 ----------------------------------------------------------------------
void typical_shape(const AcceptanceOptions&, Check& check) {
  const double r = aspect_ratio_from_shape(2.225);
  check(std::abs(r - 4.973) <= 0.005, fmt("aspect ratio for S = 2.225: %.5f vs 4.973 +- 0.005", r));
}

// -- 9 ----------------------------------------------------------------------
void matrix_identity(const AcceptanceOptions& o, Check& check) {
  num::RngStream rng(o.seed, 109);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const MembraneConfig c = random_config(rng);
    const double v = raw_area_product(c);
    worst = std::max(worst, rel_err(commutator_trace_sq(c), -8.0 * v));
  }
  check(worst <= 1e-12, fmt("Tr([X, Y]^2) = -8 V over 10^4 configurations: worst relative error %.2e (tol 1e-12)", worst));
}

// -- 10 ---------------------------------------------------------------------
// Six-dimensional central-difference Laplacian with one Richardson level.
double laplacian_6d(const std::function<double(const MembraneConfig&)>& f, const MembraneConfig& c) {
  auto lap = [&](double h) {
    const double f0 = f(c);
    double s = 0.0;
    for (int k = 0; k < 6; ++k) {
      MembraneConfig p = c;
      MembraneConfig m = c;
      double& pk = k < 3 ? p.x[k] : p.y[k - 3];
      double& mk = k < 3 ? m.x[k] : m.y[k - 3];
      pk += h;
      mk -= h;
      s += (f(p) - 2.0 * f0 + f(m)) / (h * h);
    }
    return s;
  };
  const double h = 1e-3;
  return (4.0 * lap(0.5 * h) - lap(h)) / 3.0;
}

void laplacian(const AcceptanceOptions& o, Check& check) {
  const std::function<double(double, double)> fs[] = {
      [](double U, double V) { return std::exp(-0.3 * U) * (1.0 + V); },
      [](double U, double V) { return std::cos(0.4 * U) + U * U * std::sqrt(V + 1.0); },
  };
  num::RngStream rng(o.seed, 110);
  double worst = 0.0;
  int points = 0;
  while (points < 20) {
    const MembraneConfig c = random_config(rng);
    const InvariantCoords inv = invariants(c);
    if (inv.W < 0.05 || inv.W > 0.95 || inv.U < 0.2) continue;
    ++points;
    for (const auto& f : fs) {
      const double uv = uv_laplacian_apply(f, inv.U, inv.V);
      const double full = laplacian_6d(
          [&f](const MembraneConfig& m) {
            const double U = 0.5 * (norm_sq(m.x) + norm_sq(m.y));
            return f(U, raw_area_product(m));
          },
          c);
      worst = std::max(worst, rel_err(uv, full));
    }
  }
  check(worst <= 1e-5, fmt("(U, V) Laplacian vs 6D finite differences at 20 points: worst relative error %.2e (tol 1e-5)",
                           worst));
}

// -- 11 ---------------------------------------------------------------------
void symmetry(const AcceptanceOptions& o, Check& check) {
  num::RngStream rng(o.seed, 111);
  double worst = 0.0;
  double worst_gauge = 0.0;
  const std::function<double(const MembraneConfig&)> f = [](const MembraneConfig& c) {
    const InvariantCoords inv = invariants(c);
    return std::exp(-inv.U) * (1.0 + inv.V) + std::sin(inv.U * inv.V);
  };
  for (int k = 0; k < 1000; ++k) {
    const MembraneConfig c = random_config(rng);
    const InvariantCoords a = invariants(c);
    const MembraneConfig moved = rotate_so2(rotate_so3(c, random_rotation(rng)), 2.0 * kPi * rng.uniform());
    const InvariantCoords b = invariants(moved);
    worst = std::max({worst, std::abs(a.U - b.U), std::abs(a.V - b.V), std::abs(a.W - b.W)});
    if (k < 100) worst_gauge = std::max(worst_gauge, gauge_invariance_residual(f, c, 1e-4));
  }
  check(worst <= 1e-10, fmt("(U, V, W) under random SO(3) x SO(2): max change %.2e (tol 1e-10)", worst));
  check(worst_gauge < 1e-7, fmt("gauge residual of an f(U, V) at step 1e-4: %.2e (tol 1e-7)", worst_gauge));
}

// -- 12 ---------------------------------------------------------------------
void dmc_check(const AcceptanceOptions& o, Check& check) {
  dmc::DmcConfig h;
  h.potential = dmc::PotentialKind::harmonic;
  h.walkers = 10000;
  h.tau = 0.002;
  h.equilibration_steps = 1000;
  h.measurement_steps = 2000;
  h.seed = o.seed;
  h.workers = o.workers;
  const auto hr = dmc::run_dmc(h);
  check(std::abs(hr.energy - 3.0) <= 3.0 * hr.error && std::abs(hr.energy - 3.0) <= 0.06,
        fmt("harmonic calibration: E = %.5f +- %.5f vs 3 (3 sigma and 2%%)", hr.energy, hr.error));

  std::vector<dmc::TauPoint> pts;
  dmc::DmcResult last;
  for (double tau : {0.004, 0.002, 0.001}) {
    dmc::DmcConfig c;
    c.kappa = o.kappa;
    c.walkers = 10000;
    c.tau = tau;
    c.equilibration_steps = static_cast<std::size_t>(std::lround(2.0 / tau));
    c.measurement_steps = static_cast<std::size_t>(std::lround(4.0 / tau));
    c.seed = o.seed;
    c.workers = o.workers;
    last = dmc::run_dmc(c);
    pts.push_back({tau, last.energy, last.error});
    check.info(fmt("membrane tau = %.3f: E_ref average %.5f +- %.5f, mixed %.5f +- %.5f, wall kills %zu%s", tau,
                   last.energy, last.error, last.mixed_energy.value_or(NAN), last.mixed_error.value_or(NAN),
                   last.wall_kills, last.wall_flag ? " (flagged)" : ""));
  }
  const auto ex = dmc::tau_extrapolate(pts);
  const double bound = energy_closed(minimize_closed(o.kappa).params, o.kappa);
  check(ex.energy > 0.0 && ex.energy <= bound + 3.0 * ex.error,
        fmt("tau -> 0: E = %.5f +- %.5f, 0 < E <= %.5f + 3 sigma (gap to variational bound %.5f)", ex.energy, ex.error,
            bound, bound - ex.energy));
  check.info(fmt("tau slope %.3f +- %.3f, chi2 %.2f, monotone within errors: %s", ex.slope, ex.slope_error, ex.chi2,
                 ex.monotone ? "yes" : "no"));
  const auto cmp = dmc::compare_histogram(last.histogram, minimize_closed(o.kappa));
  check.info(fmt("histogram vs variational density: TV distance %.4f, U-mode %.3f vs %.3f (within factor 2: %s), "
                 "overflow %.2e",
                 cmp.total_variation, cmp.u_mode_histogram, cmp.u_mode_pdf, cmp.mode_within_factor_two ? "yes" : "no",
                 last.histogram.overflow_fraction));
}

// -- 13 ---------------------------------------------------------------------
void measure_constant(const AcceptanceOptions& o, Check& check) {
  const VariationalParams settings[] = {{1.0, 0.3}, {1.6369, 0.678}, {2.0, 1.0}, {0.7, 0.1}, {3.0, 0.5}};
  std::vector<MeasureConstant> cs;
  std::uint64_t stream = 130;
  for (const auto& p : settings) {
    num::RngStream rng(o.seed, stream++);
    cs.push_back(measure_constant_mc(p, 1000000, rng));
    check.info(fmt("mu = %.4f, nu = %.4f: C = %.4f +- %.4f", p.mu, p.nu, cs.back().value, cs.back().std_error));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < cs.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.size(); ++j) {
      const double z = std::abs(cs[i].value - cs[j].value) / std::hypot(cs[i].std_error, cs[j].std_error);
      worst = std::max(worst, z);
    }
  }
  check(worst <= 3.0, fmt("C agrees across 5 (mu, nu) settings: largest pairwise deviation %.2f combined sigma (tol 3)", worst));
  check.info(fmt("analytic value 4 pi^3 = %.4f", 4.0 * std::pow(kPi, 3)));
}

using Runner = void (*)(const AcceptanceOptions&, Check&);

struct Entry {
  CriterionInfo info;
  Runner run;
};

const std::vector<Entry>& registry() {
  static const std::vector<Entry> entries = {
      {{1, "minimizer", 1.0}, minimizer},
      {{2, "energy consistency", 10.0}, energy_consistency},
      {{3, "normalization", 5.0}, normalization},
      {{4, "ground-state constants (quadrature)", 30.0}, reference_constants},
      {{5, "closed-form evaluators", 1.0}, closed_forms},
      {{6, "Monte Carlo route", 60.0}, monte_carlo},
      {{7, "geometry bounds", 5.0}, geometry_bounds},
      {{8, "typical shape aspect ratio", 1.0}, typical_shape},
      {{9, "matrix identity", 1.0}, matrix_identity},
      {{10, "Laplacian", 5.0}, laplacian},
      {{11, "symmetry and gauge", 5.0}, symmetry},
      {{12, "diffusion Monte Carlo", 600.0}, dmc_check},
      {{13, "measure proportionality", 120.0}, measure_constant},
  };
  return entries;
}

}  // namespace

const std::vector<CriterionInfo>& acceptance_criteria() {
  static const std::vector<CriterionInfo> infos = [] {
    std::vector<CriterionInfo> v;
    for (const auto& e : registry()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

CriterionResult run_criterion(int id, const AcceptanceOptions& opts) {
  const auto& reg = registry();
  const auto it = std::find_if(reg.begin(), reg.end(), [id](const Entry& e) { return e.info.id == id; });
  if (it == reg.end()) throw std::out_of_range("no acceptance criterion " + std::to_string(id));
  CriterionResult r;
  r.id = id;
  r.title = it->info.title;
  r.budget_seconds = it->info.budget_seconds;
  r.passed = true;
  Check check{r};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    it->run(opts, check);
  } catch (const std::exception& e) {
    check(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  check(r.seconds < r.budget_seconds, fmt("runtime %.2f s (budget %.0f s)", r.seconds, r.budget_seconds));
  return r;
}

std::string format_result(const CriterionResult& r, bool with_details) {
  std::ostringstream os;
  os << fmt("[%s] %2d %-38s %8.2f s\n", r.passed ? "PASS" : "FAIL", r.id, r.title.c_str(), r.seconds);
  if (with_details)
    for (const auto& d : r.details) os << "       " << d << '\n';
  return os.str();
}

}  // namespace fuzzy::app
