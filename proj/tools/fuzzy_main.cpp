#include <array>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fuzzy/app/commands.hpp"
#include "fuzzy/app/config.hpp"
#include "fuzzy/quadrature.hpp"

namespace {

template <class T>
void overlay(const CLI::Option* opt, const T& value, T& field) {
  if (opt->count() > 0) field = value;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace fuzzy::app;

  CLI::App app{"Ground-state geometry of the N = 2 fuzzy sphere membrane"};
  app.require_subcommand(0, 1);

  RunConfig defaults;
  std::string config_path;
  double kappa = defaults.kappa;
  std::uint64_t seed = defaults.seed;
  double tol = defaults.tol;
  std::size_t mc_samples = defaults.mc_samples;
  std::string out = defaults.out;
  unsigned workers = defaults.workers;
  bool strict = false;
  bool show_config = false;

  app.add_option("--config", config_path, "JSON config file; flags override its values")->check(CLI::ExistingFile);
  auto* o_kappa = app.add_option("--kappa", kappa, "coupling kappa (default (4 pi)^2 / 27)");
  auto* o_seed = app.add_option("--seed", seed, "random seed");
  auto* o_tol = app.add_option("--tol", tol, "quadrature tolerance");
  auto* o_mc = app.add_option("--mc-samples", mc_samples, "Monte Carlo sample count (0 disables the MC route)");
  auto* o_out = app.add_option("--out", out, "output directory");
  auto* o_workers = app.add_option("--workers", workers, "worker threads (part of the determinism contract)");
  auto* o_strict = app.add_flag("--strict", strict, "nonzero exit when any report row is flagged");
  app.add_flag("--show-config", show_config, "print the resolved configuration and exit");

  auto* ground = app.add_subcommand("ground-state", "minimize the variational energy");
  auto* expect = app.add_subcommand("expect", "ground-state constants by closed form, quadrature and Monte Carlo");
  auto* sample = app.add_subcommand("sample", "draw (U, V) samples from the ground-state density");

  auto* dmc = app.add_subcommand("dmc", "diffusion Monte Carlo ground-state energy");
  DmcSettings ds = defaults.dmc;
  bool plain = false;
  bool harmonic = false;
  auto* o_walkers = dmc->add_option("--walkers", ds.walkers, "target walker count");
  auto* o_tau = dmc->add_option("--tau", ds.tau, "time step");
  auto* o_equil = dmc->add_option("--equilibration", ds.equilibration_steps, "equilibration steps");
  auto* o_meas = dmc->add_option("--measurement", ds.measurement_steps, "measurement steps");
  auto* o_eta = dmc->add_option("--eta", ds.eta, "population feedback strength");
  auto* o_plain = dmc->add_flag("--plain", plain, "no importance sampling");
  auto* o_harm = dmc->add_flag("--harmonic", harmonic, "harmonic self-test potential |r|^2 / 2");

  auto* ellipse = app.add_subcommand("ellipse", "geometry of the configuration x1 x2 x3 y1 y2 y3");
  std::vector<double> coords;
  bool as_json = false;
  ellipse->add_option("coords", coords, "x1 x2 x3 y1 y2 y3")->expected(6)->required();
  ellipse->add_flag("--json", as_json, "print the record as JSON");

  auto* heatmap = app.add_subcommand("render-heatmap", "ground-state density grid and heatmap");
  HeatmapSettings hs = defaults.heatmap;
  std::size_t points = 0;
  auto* o_umax = heatmap->add_option("--u-max", hs.u_max, "largest U on the grid");
  auto* o_vmax = heatmap->add_option("--v-max", hs.v_max, "largest V on the grid");
  auto* o_points = heatmap->add_option("--points", points, "grid points per axis");

  auto* typical = app.add_subcommand("render-typical", "outline of the ellipse with a given shape parameter");
  double shape = 0.0;
  auto* o_shape = typical->add_option("--shape", shape, "shape parameter (default: ground-state <S>)");

  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  std::vector<int> only;
  double perturbation = 0.0;
  verify->add_option("--only", only, "criterion ids to run")->delimiter(',');
  verify->add_option("--kappa-perturbation", perturbation, "relative kappa offset inside the minimizer (mutation check)")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
    overlay(o_kappa, kappa, cfg.kappa);
    overlay(o_seed, seed, cfg.seed);
    overlay(o_tol, tol, cfg.tol);
    overlay(o_mc, mc_samples, cfg.mc_samples);
    overlay(o_out, out, cfg.out);
    overlay(o_workers, workers, cfg.workers);
    overlay(o_strict, strict, cfg.strict);
    overlay(o_walkers, ds.walkers, cfg.dmc.walkers);
    overlay(o_tau, ds.tau, cfg.dmc.tau);
    overlay(o_equil, ds.equilibration_steps, cfg.dmc.equilibration_steps);
    overlay(o_meas, ds.measurement_steps, cfg.dmc.measurement_steps);
    overlay(o_eta, ds.eta, cfg.dmc.eta);
    if (o_plain->count() > 0) cfg.dmc.guided = false;
    overlay(o_harm, harmonic, cfg.dmc.harmonic);
    overlay(o_umax, hs.u_max, cfg.heatmap.u_max);
    overlay(o_vmax, hs.v_max, cfg.heatmap.v_max);
    if (o_points->count() > 0) cfg.heatmap.u_points = cfg.heatmap.v_points = points;
    if (o_shape->count() > 0) cfg.shape = shape;
    validate(cfg);

    if (show_config) return cmd_show_config(cfg, std::cout);
    if (*ground) return cmd_ground_state(cfg, std::cout);
    if (*expect) return cmd_expect(cfg, std::cout);
    if (*sample) return cmd_sample(cfg, std::cout);
    if (*dmc) return cmd_dmc(cfg, std::cout);
    if (*ellipse) {
      std::array<double, 6> xy{};
      std::copy(coords.begin(), coords.end(), xy.begin());
      return cmd_ellipse(xy, as_json, std::cout);
    }
    if (*heatmap) return cmd_render_heatmap(cfg, std::cout);
    if (*typical) return cmd_render_typical(cfg, std::cout);
    if (*verify) return cmd_verify(cfg, only, perturbation, std::cout);
    std::cout << app.help();
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const fuzzy::num::ConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMismatch;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
