#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "fuzzy/dmc.hpp"

using namespace fuzzy;
using namespace fuzzy::dmc;
using doctest::Approx;

namespace {

DmcConfig small_config() {
  DmcConfig cfg;
  cfg.walkers = 500;
  cfg.tau = 0.01;
  cfg.equilibration_steps = 100;
  cfg.measurement_steps = 200;
  cfg.seed = 5;
  return cfg;
}

}  // namespace

TEST_CASE("configuration validation") {
  DmcConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  auto bad = cfg;
  bad.tau = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.tau = 0.2;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.walkers = 99;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.measurement_steps = 10;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.kappa = -1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.workers = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.histogram.u_bins = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  CHECK_THROWS_AS(run_dmc(bad), std::invalid_argument);
}

TEST_CASE("runs are reproducible for a fixed seed and worker count") {
  auto cfg = small_config();
  cfg.workers = 2;
  const auto a = run_dmc(cfg);
  const auto b = run_dmc(cfg);
  CHECK(a.energy == b.energy);
  CHECK(a.population == b.population);
  CHECK(a.e_ref_trace == b.e_ref_trace);
  CHECK(a.histogram.mass == b.histogram.mass);
  cfg.seed = 6;
  CHECK(run_dmc(cfg).e_ref_trace != a.e_ref_trace);
}

TEST_CASE("result bookkeeping") {
  const auto cfg = small_config();
  const auto r = run_dmc(cfg);
  CHECK(r.population.size() == cfg.equilibration_steps + cfg.measurement_steps);
  CHECK(r.e_ref_trace.size() == r.population.size());
  CHECK(r.mixed_trace.size() == r.population.size());
  REQUIRE(r.mixed_energy.has_value());
  CHECK(r.error > 0.0);
  CHECK(r.acceptance > 0.9);
  CHECK(r.acceptance <= 1.0);
  CHECK(r.tau == cfg.tau);
  CHECK(r.guided);
  CHECK_FALSE(r.wall_flag);
  // Loose sanity on a short noisy run: the energy is near the variational value.
  CHECK(r.energy > 4.0);
  CHECK(r.energy < 5.5);

  const auto& h = uv_histogram(r);
  CHECK(std::abs(h.total_mass() - 1.0) <= 1e-12);
  CHECK(h.entries > 0);
  for (std::size_t iu = 0; iu < h.spec.u_bins; ++iu) {
    for (std::size_t iv = 0; iv < h.spec.v_bins; ++iv) {
      if (!h.allowed[iu * h.spec.v_bins + iv]) REQUIRE(h.at(iu, iv) == 0.0);
    }
  }
  CHECK_FALSE(h.allowed[0 * h.spec.v_bins + h.spec.v_bins - 1]);
  CHECK(h.allowed[(h.spec.u_bins - 1) * h.spec.v_bins + h.spec.v_bins - 1]);
}

TEST_CASE("unguided mode has no mixed estimator") {
  auto cfg = small_config();
  cfg.guided = false;
  const auto r = run_dmc(cfg);
  CHECK_FALSE(r.mixed_energy.has_value());
  CHECK(r.mixed_trace.empty());
  CHECK(r.acceptance == 1.0);
}

TEST_CASE("harmonic oscillator energy") {
  DmcConfig cfg;
  cfg.potential = PotentialKind::harmonic;
  cfg.walkers = 2000;
  cfg.tau = 0.005;
  cfg.equilibration_steps = 400;
  cfg.measurement_steps = 1200;
  cfg.seed = 11;
  const auto r = run_dmc(cfg);
  CHECK(std::abs(r.energy - 3.0) <= 4.0 * r.error + 0.02);
  REQUIRE(r.mixed_energy.has_value());
  CHECK(std::abs(*r.mixed_energy - 3.0) <= 4.0 * *r.mixed_error + 0.02);
  CHECK(r.potential_mean == Approx(1.5).epsilon(0.1));
}

TEST_CASE("population collapse raises PopulationError") {
  auto cfg = small_config();
  cfg.energy_guess = -50.0;
  try {
    run_dmc(cfg);
    FAIL("expected a PopulationError");
  } catch (const PopulationError& e) {
    CHECK(e.population < cfg.walkers / 10 + 1);
    CHECK(e.step < cfg.equilibration_steps + cfg.measurement_steps);
  }
}

TEST_CASE("blocked standard error") {
  CHECK_THROWS_AS(blocked_standard_error({1.0}), std::invalid_argument);
  CHECK(blocked_standard_error(std::vector<double>(64, 2.0)) == 0.0);

  num::RngStream rng(3, 0);
  std::vector<double> iid(1 << 14);
  for (double& x : iid) x = rng.normal();
  const double se = blocked_standard_error(iid);
  const double naive = 1.0 / std::sqrt(static_cast<double>(iid.size()));
  CHECK(se == Approx(naive).epsilon(0.3));

  // An AR(1) chain with correlation 0.9 has a much larger error than the naive one.
  std::vector<double> ar(1 << 14);
  double x = 0.0;
  for (double& v : ar) {
    x = 0.9 * x + rng.normal();
    v = x;
  }
  double m = std::accumulate(ar.begin(), ar.end(), 0.0) / ar.size();
  double var = 0.0;
  for (double v : ar) var += (v - m) * (v - m);
  var /= ar.size() - 1;
  CHECK(blocked_standard_error(ar) > 3.0 * std::sqrt(var / ar.size()));
}

TEST_CASE("time-step extrapolation") {
  const auto fit = tau_extrapolate({{0.004, 4.8 + 2.0 * 0.004, 0.001},
                                    {0.002, 4.8 + 2.0 * 0.002, 0.001},
                                    {0.001, 4.8 + 2.0 * 0.001, 0.001}});
  CHECK(fit.energy == Approx(4.8).epsilon(1e-12));
  CHECK(fit.slope == Approx(2.0).epsilon(1e-9));
  CHECK(fit.chi2 == Approx(0.0).epsilon(1e-12));
  CHECK(fit.error > 0.0);
  CHECK(fit.monotone);

  const auto wiggly = tau_extrapolate({{0.004, 4.80, 0.001}, {0.002, 4.90, 0.001}, {0.001, 4.80, 0.001}});
  CHECK_FALSE(wiggly.monotone);
  CHECK_THROWS_AS(tau_extrapolate({{0.002, 4.8, 0.01}}), std::invalid_argument);
  CHECK_THROWS_AS(tau_extrapolate({{0.002, 4.8, 0.01}, {0.002, 4.7, 0.01}}), std::invalid_argument);
  CHECK_THROWS_AS(tau_extrapolate({{0.002, 4.8, 0.0}, {0.001, 4.7, 0.01}}), std::invalid_argument);
}

TEST_CASE("binned ground-state density") {
  const auto model = minimize_closed(kDefaultKappa);
  HistogramSpec spec;
  const auto pdf_bins = binned_pdf(model, spec);
  REQUIRE(pdf_bins.size() == spec.u_bins * spec.v_bins);
  CHECK(std::accumulate(pdf_bins.begin(), pdf_bins.end(), 0.0) == Approx(1.0).epsilon(1e-10));
  for (double p : pdf_bins) CHECK(p >= 0.0);

  // A histogram equal to the binned density compares perfectly.
  Histogram2D h;
  h.spec = spec;
  h.mass = pdf_bins;
  h.allowed.assign(pdf_bins.size(), true);
  const auto cmp = compare_histogram(h, model);
  CHECK(cmp.total_variation == Approx(0.0).epsilon(1e-12));
  CHECK(cmp.mode_within_factor_two);
  CHECK(cmp.u_mode_histogram == Approx(cmp.u_mode_pdf));
}
