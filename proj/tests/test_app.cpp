#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "doctest.h"
#include "fuzzy/app/commands.hpp"
#include "fuzzy/app/config.hpp"
#include "fuzzy/app/output.hpp"
#include "fuzzy/app/report.hpp"

using namespace fuzzy;
using namespace fuzzy::app;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(FUZZY_TEST_TMPDIR) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig quick_config(const std::string& name) {
  RunConfig cfg;
  cfg.out = scratch(name).string();
  cfg.mc_samples = 20000;
  return cfg;
}

}  // namespace

TEST_CASE("config JSON round trip and overlay") {
  RunConfig cfg;
  cfg.kappa = 2.5;
  cfg.seed = 99;
  cfg.dmc.tau = 0.004;
  cfg.heatmap.u_points = 17;
  cfg.shape = 3.0;
  nlohmann::json j;
  to_json(j, cfg);
  RunConfig back;
  merge_json(j, back);
  CHECK(back.kappa == 2.5);
  CHECK(back.seed == 99);
  CHECK(back.dmc.tau == 0.004);
  CHECK(back.heatmap.u_points == 17);
  REQUIRE(back.shape.has_value());
  CHECK(*back.shape == 3.0);

  RunConfig partial;
  merge_json(nlohmann::json::parse(R"({"kappa": 1.5, "dmc": {"walkers": 300}})"), partial);
  CHECK(partial.kappa == 1.5);
  CHECK(partial.dmc.walkers == 300);
  CHECK(partial.dmc.tau == RunConfig{}.dmc.tau);
  CHECK(partial.seed == RunConfig{}.seed);

  RunConfig x;
  CHECK_THROWS_AS(merge_json(nlohmann::json::parse(R"({"kapa": 1})"), x), std::invalid_argument);
  CHECK_THROWS_AS(merge_json(nlohmann::json::parse(R"({"dmc": {"steps": 1}})"), x), std::invalid_argument);
  CHECK_THROWS_AS(merge_json(nlohmann::json::parse("[1, 2]"), x), std::invalid_argument);

  const fs::path dir = scratch("config");
  write_text(dir / "c.json", R"({"seed": 7, "mc_samples": 10})");
  const auto loaded = load_config(dir / "c.json");
  CHECK(loaded.seed == 7);
  CHECK(loaded.mc_samples == 10);
  write_text(dir / "bad.json", "{ not json");
  CHECK_THROWS_AS(load_config(dir / "bad.json"), std::invalid_argument);
  CHECK_THROWS_AS(load_config(dir / "missing.json"), std::runtime_error);
}

TEST_CASE("config validation") {
  RunConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  auto bad = cfg;
  bad.kappa = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.workers = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = cfg;
  bad.shape = 0.5;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  const auto d = to_dmc_config(cfg);
  CHECK(d.kappa == cfg.kappa);
  CHECK(d.walkers == cfg.dmc.walkers);
  CHECK(d.tau == cfg.dmc.tau);
}

TEST_CASE("number formatting round trips") {
  for (double x : {0.1, 1.0 / 3.0, 5.848654459915678, -2.5e-300, 1e22}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(format_double(2.0) == "2");
}

TEST_CASE("sample CSV round trip") {
  SampleBatch batch;
  batch.samples = {{1.0 / 3.0, 0.1}, {2.5, 6.0}, {0.0, 0.0}};
  std::stringstream ss;
  write_samples_csv(ss, batch);
  CHECK(ss.str().rfind("U,V\n", 0) == 0);
  const auto back = read_samples_csv(ss);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].U == batch.samples[i].U);
    CHECK(back[i].V == batch.samples[i].V);
  }
}

TEST_CASE("heatmap grid") {
  const auto m = minimize_closed(kDefaultKappa);
  HeatmapSettings s;
  s.u_points = 50;
  s.v_points = 50;
  const auto g = evaluate_heatmap(m, s);
  REQUIRE(g.u.size() == 50);
  REQUIRE(g.v.size() == 50);
  CHECK(g.at(0, 0) == Approx(trial_norm_sq(m.params)).epsilon(1e-14));
  for (std::size_t i = 0; i < g.u.size(); ++i) {
    for (std::size_t j = 0; j < g.v.size(); ++j) {
      if (g.v[j] > g.u[i] * g.u[i]) REQUIRE(g.at(i, j) == 0.0);
    }
  }

  std::stringstream ss;
  write_heatmap_csv(ss, g);
  CHECK(ss.str().rfind("U,V,density\n", 0) == 0);
  const auto back = read_heatmap_csv(ss);
  CHECK(back.u == g.u);
  CHECK(back.v == g.v);
  CHECK(back.density == g.density);

  const std::string svg = heatmap_svg(g);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  // The node-sum mass converges to 1 at first order in the spacing.
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t n : {50, 100, 200, 400, 800}) {
    HeatmapSettings r;
    r.u_points = n;
    r.v_points = n;
    const double err = std::abs(evaluate_heatmap(m, r).riemann_mass() - 1.0);
    CAPTURE(n);
    CHECK(err < 0.65 * prev);
    prev = err;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("typical ellipse picture") {
  const auto g = ellipse_from_axes(4.97, 1.0, 0.0);
  const auto svg = typical_svg(g, 2.225);
  CHECK(svg.find("aspect ratio a/b = 4.97") != std::string::npos);
  CHECK(svg.find("shape parameter S = 2.225") != std::string::npos);
}

TEST_CASE("verification report") {
  RunConfig cfg;
  cfg.mc_samples = 0;
  const auto r = build_report(cfg);
  for (const char* name : {"mu_m", "nu_m", "energy", "area", "eccentricity3", "perimeter", "shape"}) {
    CAPTURE(name);
    CHECK(r.find(name) != nullptr);
  }
  CHECK(r.find("nothing") == nullptr);
  CHECK(r.find("area")->status == Status::match);
  CHECK(r.find("energy")->status == Status::flagged);
  CHECK(r.find("perimeter")->status == Status::flagged);
  CHECK(r.any_flagged());
  CHECK_FALSE(r.find("area")->mc_mean.has_value());
  CHECK(printed_energy(kDefaultKappa) == Approx(1.512828).epsilon(1e-6));

  const auto j = to_json(r);
  CHECK(j.at("rows").at(3).at("mc_mean").is_null());
  const auto back = report_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(render_table(back) == render_table(r));

  RunConfig with_mc;
  with_mc.mc_samples = 20000;
  const auto a = to_json(build_report(with_mc)).dump();
  const auto b = to_json(build_report(with_mc)).dump();
  CHECK(a == b);
  CHECK(build_report(with_mc).find("area")->mc_mean.has_value());
}

TEST_CASE("ground state JSON is lossless") {
  const auto m = minimize_closed(kDefaultKappa);
  const auto j = nlohmann::json::parse(ground_state_json(m).dump());
  const auto back = ground_state_from_json(j);
  CHECK(back.params.mu == m.params.mu);
  CHECK(back.params.nu == m.params.nu);
  CHECK(back.energy == m.energy);
  CHECK(back.kappa == m.kappa);
  CHECK_THROWS(ground_state_from_json(nlohmann::json::parse(R"({"kappa": 1})")));
}

TEST_CASE("commands write their outputs") {
  auto cfg = quick_config("commands");
  std::ostringstream out;
  CHECK(cmd_ground_state(cfg, out) == kOk);
  CHECK(fs::exists(fs::path(cfg.out) / "ground_state.json"));
  const auto gs = ground_state_from_json(nlohmann::json::parse(slurp(fs::path(cfg.out) / "ground_state.json")));
  CHECK(gs.params.mu == minimize_closed(cfg.kappa).params.mu);

  CHECK(cmd_expect(cfg, out) == kOk);
  CHECK(fs::exists(fs::path(cfg.out) / "report.json"));
  cfg.strict = true;
  CHECK(cmd_expect(cfg, out) == kFailure);
  cfg.strict = false;

  CHECK(cmd_sample(cfg, out) == kOk);
  std::ifstream samples(fs::path(cfg.out) / "samples.csv");
  CHECK(read_samples_csv(samples).size() == cfg.mc_samples);

  cfg.heatmap.u_points = 20;
  cfg.heatmap.v_points = 20;
  CHECK(cmd_render_heatmap(cfg, out) == kOk);
  CHECK(fs::exists(fs::path(cfg.out) / "heatmap.csv"));
  CHECK(fs::exists(fs::path(cfg.out) / "heatmap.svg"));
  CHECK(cmd_render_typical(cfg, out) == kOk);
  CHECK(fs::exists(fs::path(cfg.out) / "typical.svg"));

  cfg.dmc.walkers = 300;
  cfg.dmc.tau = 0.01;
  cfg.dmc.equilibration_steps = 100;
  cfg.dmc.measurement_steps = 100;
  CHECK(cmd_dmc(cfg, out) != kUsage);
  CHECK(fs::exists(fs::path(cfg.out) / "dmc_trace.csv"));
  CHECK(fs::exists(fs::path(cfg.out) / "dmc.json"));

  std::ostringstream ell;
  CHECK(cmd_ellipse({1, 0, 0, 0, 1, 0}, true, ell) == kOk);
  const auto ej = nlohmann::json::parse(ell.str());
  CHECK(ej.contains("a"));

  std::ostringstream show;
  CHECK(cmd_show_config(cfg, show) == kOk);
  CHECK(show.str().find("kappa = (4 pi)^2 / 27") != std::string::npos);
}

TEST_CASE("output to an unusable path fails loudly") {
  const fs::path dir = scratch("blocked");
  write_text(dir / "file", "x");
  CHECK_THROWS_AS(ensure_directory(dir / "file"), std::runtime_error);
}

TEST_CASE("verify subcommand and the kappa mutation check") {
  RunConfig cfg;
  std::ostringstream out;
  CHECK(cmd_verify(cfg, {1, 8}, 0.0, out) == kOk);
  std::ostringstream mutated;
  CHECK(cmd_verify(cfg, {1}, 1e-3, mutated) != kOk);
  CHECK(mutated.str().find("[FAIL]") != std::string::npos);
  CHECK_THROWS_AS(run_criterion(99), std::out_of_range);
  CHECK(acceptance_criteria().size() == 13);
}
