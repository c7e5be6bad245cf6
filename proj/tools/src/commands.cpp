#include "fuzzy/app/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fuzzy/app/output.hpp"
#include "fuzzy/app/report.hpp"
#include "fuzzy/dmc.hpp"
#include "fuzzy/ellipse.hpp"
#include "fuzzy/observables.hpp"

namespace fuzzy::app {

namespace {

namespace fs = std::filesystem;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string json_number(double x) {
  // JSON has no infinity; the geometry record uses null for it.
  return std::isfinite(x) ? format_double(x) : "null";
}

fs::path output_dir(const RunConfig& cfg) {
  const fs::path dir(cfg.out);
  ensure_directory(dir);
  return dir;
}

}  // namespace

nlohmann::json ground_state_json(const GroundStateModel& model) {
  return {{"kappa", model.kappa}, {"mu", model.params.mu}, {"nu", model.params.nu}, {"energy", model.energy}};
}

GroundStateModel ground_state_from_json(const nlohmann::json& j) {
  GroundStateModel m;
  m.kappa = j.at("kappa").get<double>();
  m.params.mu = j.at("mu").get<double>();
  m.params.nu = j.at("nu").get<double>();
  m.energy = j.at("energy").get<double>();
  validate(m.params);
  return m;
}

int cmd_ground_state(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const GroundStateModel m = minimize_closed(cfg.kappa);
  const VariationalParams num = minimize_numeric(cfg.kappa, {1.0, 0.5});
  const double num_energy = energy_closed(num, cfg.kappa);
  const double dev = std::max(std::abs(num.mu - m.params.mu) / m.params.mu,
                              std::abs(num.nu - m.params.nu) / m.params.nu);

  out << fmt("kappa        %.12g\n", cfg.kappa);
  out << fmt("mu_m         %.12f\n", m.params.mu);
  out << fmt("nu_m         %.12f\n", m.params.nu);
  out << fmt("energy       %.12f\n", m.energy);
  out << fmt("numeric mu   %.12f\n", num.mu);
  out << fmt("numeric nu   %.12f\n", num.nu);
  out << fmt("numeric E    %.12f\n", num_energy);
  out << fmt("max relative parameter deviation %.3e\n", dev);

  nlohmann::json j = ground_state_json(m);
  j["numeric"] = {{"mu", num.mu}, {"nu", num.nu}, {"energy", num_energy}};
  const fs::path path = output_dir(cfg) / "ground_state.json";
  write_text(path, j.dump(2) + "\n");
  out << "wrote " << path.string() << '\n';
  return dev <= 1e-6 ? kOk : kMismatch;
}

int cmd_expect(const RunConfig& cfg, std::ostream& out) {
  const VerificationReport rep = build_report(cfg);
  out << render_table(rep);
  const fs::path path = output_dir(cfg) / "report.json";
  write_text(path, to_json(rep).dump(2) + "\n");
  out << "wrote " << path.string() << '\n';
  return cfg.strict && rep.any_flagged() ? kFailure : kOk;
}

int cmd_sample(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const GroundStateModel m = minimize_closed(cfg.kappa);
  const SampleBatch batch = sample_uv_parallel(m, cfg.mc_samples, cfg.seed, cfg.workers);
  const fs::path path = output_dir(cfg) / "samples.csv";
  std::ostringstream csv;
  write_samples_csv(csv, batch);
  write_text(path, csv.str());

  out << fmt("samples      %zu\n", batch.samples.size());
  out << fmt("proposals    %zu\n", batch.proposals);
  out << fmt("acceptance   %.6f (expected %.6f)\n", batch.acceptance_rate, expected_acceptance(m.params));
  if (!batch.samples.empty()) {
    const auto u = mc_moment(batch, [](double U, double) { return U; });
    const auto v = mc_moment(batch, [](double, double V) { return V; });
    out << fmt("mean U       %.6f +- %.6f\n", u.mean, u.std_error);
    out << fmt("mean V       %.6f +- %.6f\n", v.mean, v.std_error);
  }
  out << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_dmc(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const dmc::DmcConfig dc = to_dmc_config(cfg);
  const dmc::DmcResult r = dmc::run_dmc(dc);
  const fs::path dir = output_dir(cfg);

  std::ostringstream trace;
  write_dmc_trace_csv(trace, r);
  write_text(dir / "dmc_trace.csv", trace.str());
  std::ostringstream hist;
  write_dmc_histogram_csv(hist, r.histogram);
  write_text(dir / "dmc_histogram.csv", hist.str());

  const bool harmonic = dc.potential == dmc::PotentialKind::harmonic;
  const double reference = harmonic ? 3.0 : energy_closed(minimize_closed(cfg.kappa).params, cfg.kappa);
  nlohmann::json j = {{"potential", harmonic ? "harmonic" : "membrane"},
                      {"guided", r.guided},
                      {"tau", r.tau},
                      {"walkers", dc.walkers},
                      {"seed", dc.seed},
                      {"workers", dc.workers},
                      {"energy", r.energy},
                      {"error", r.error},
                      {"potential_mean", r.potential_mean},
                      {"acceptance", r.acceptance},
                      {"wall_kills", r.wall_kills},
                      {"wall_flag", r.wall_flag},
                      {"histogram_overflow", r.histogram.overflow_fraction},
                      {"reference", reference}};
  j["mixed_energy"] = r.mixed_energy ? nlohmann::json(*r.mixed_energy) : nlohmann::json(nullptr);
  j["mixed_error"] = r.mixed_error ? nlohmann::json(*r.mixed_error) : nlohmann::json(nullptr);
  write_text(dir / "dmc.json", j.dump(2) + "\n");

  out << fmt("potential    %s (%s)\n", harmonic ? "harmonic" : "membrane", r.guided ? "guided" : "plain");
  out << fmt("tau          %.5g, walkers %zu\n", r.tau, dc.walkers);
  out << fmt("energy       %.6f +- %.6f (average E_ref)\n", r.energy, r.error);
  if (r.mixed_energy) out << fmt("mixed        %.6f +- %.6f\n", *r.mixed_energy, *r.mixed_error);
  out << fmt("<V>          %.6f\n", r.potential_mean);
  out << fmt("wall kills   %zu%s\n", r.wall_kills, r.wall_flag ? " (flagged: above 1e-4 of steps)" : "");
  bool ok;
  if (harmonic) {
    ok = std::abs(r.energy - 3.0) <= 3.0 * r.error;
    out << fmt("check        |E - 3| = %.6f <= 3 sigma = %.6f: %s\n", std::abs(r.energy - 3.0), 3.0 * r.error,
               ok ? "yes" : "no");
  } else {
    ok = r.energy > 0.0 && r.energy <= reference + 3.0 * r.error;
    out << fmt("check        0 < E <= variational bound %.6f + 3 sigma: %s (gap %.6f)\n", reference, ok ? "yes" : "no",
               reference - r.energy);
  }
  out << "wrote " << (dir / "dmc_trace.csv").string() << ", " << (dir / "dmc_histogram.csv").string() << ", "
      << (dir / "dmc.json").string() << '\n';
  return ok ? kOk : kFailure;
}

int cmd_ellipse(const std::array<double, 6>& xy, bool json, std::ostream& out) {
  for (double v : xy)
    if (!std::isfinite(v)) throw std::invalid_argument("ellipse: coordinates must be finite");
  const MembraneConfig cfg{{xy[0], xy[1], xy[2]}, {xy[3], xy[4], xy[5]}};
  const InvariantCoords inv = invariants(cfg);
  const EllipseGeometry g = ellipse_geometry(cfg);
  const double gap = g.L_exact > 0.0 ? g.L_approx / g.L_exact - 1.0 : 0.0;
  if (json) {
    out << "{\"U\": " << json_number(inv.U) << ", \"V\": " << json_number(inv.V) << ", \"W\": " << json_number(inv.W)
        << ", \"a\": " << json_number(g.a) << ", \"b\": " << json_number(g.b) << ", \"theta\": " << json_number(g.theta)
        << ", \"area\": " << json_number(g.A) << ", \"E1\": " << json_number(g.E1) << ", \"E3\": " << json_number(g.E3)
        << ", \"L_exact\": " << json_number(g.L_exact) << ", \"L_approx\": " << json_number(g.L_approx)
        << ", \"L_relative_gap\": " << json_number(gap) << ", \"S\": " << json_number(g.S)
        << ", \"S_exact\": " << json_number(g.S_exact) << "}\n";
    return kOk;
  }
  auto num = [](double x) { return std::isfinite(x) ? fmt("%.12g", x) : std::string("inf"); };
  out << "U          " << num(inv.U) << '\n';
  out << "V          " << num(inv.V) << '\n';
  out << "W          " << num(inv.W) << '\n';
  out << "a          " << num(g.a) << '\n';
  out << "b          " << num(g.b) << '\n';
  out << "theta      " << num(g.theta) << '\n';
  out << "area       " << num(g.A) << '\n';
  out << "E1         " << num(g.E1) << '\n';
  out << "E3         " << num(g.E3) << '\n';
  out << "L exact    " << num(g.L_exact) << '\n';
  out << "L approx   " << num(g.L_approx) << " (relative gap " << fmt("%.3e", gap) << ")\n";
  out << "S          " << num(g.S) << '\n';
  out << "S exact    " << num(g.S_exact) << '\n';
  return kOk;
}

int cmd_render_heatmap(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  const GroundStateModel m = minimize_closed(cfg.kappa);
  const HeatmapGrid grid = evaluate_heatmap(m, cfg.heatmap);
  const fs::path dir = output_dir(cfg);
  std::ostringstream csv;
  write_heatmap_csv(csv, grid);
  write_text(dir / "heatmap.csv", csv.str());
  write_text(dir / "heatmap.svg", heatmap_svg(grid));
  out << fmt("grid         %zu x %zu on [0, %g] x [0, %g]\n", grid.u.size(), grid.v.size(), cfg.heatmap.u_max,
             cfg.heatmap.v_max);
  out << fmt("P(0, 0)      %.12f\n", grid.at(0, 0));
  out << fmt("grid mass    %.6f\n", grid.riemann_mass());
  out << "wrote " << (dir / "heatmap.csv").string() << ", " << (dir / "heatmap.svg").string() << '\n';
  return kOk;
}

int cmd_render_typical(const RunConfig& cfg, std::ostream& out) {
  validate(cfg);
  double shape;
  if (cfg.shape) {
    shape = *cfg.shape;
  } else {
    shape = expected_shape(minimize_closed(cfg.kappa), {cfg.tol, nullptr}).quadrature.value;
  }
  const double ratio = aspect_ratio_from_shape(shape);
  const EllipseGeometry g = ellipse_from_axes(ratio, 1.0, 0.0);
  const fs::path path = output_dir(cfg) / "typical.svg";
  write_text(path, typical_svg(g, shape));
  out << fmt("shape        %.6f\n", shape);
  out << fmt("aspect ratio %.6f\n", ratio);
  out << "wrote " << path.string() << '\n';
  return kOk;
}

int cmd_verify(const RunConfig& cfg, const std::vector<int>& only, double kappa_perturbation, std::ostream& out) {
  validate(cfg);
  AcceptanceOptions opts;
  opts.kappa = cfg.kappa;
  opts.kappa_perturbation = kappa_perturbation;
  opts.seed = cfg.seed;
  opts.workers = cfg.workers;
  std::vector<int> ids = only;
  if (ids.empty())
    for (const auto& c : acceptance_criteria()) ids.push_back(c.id);
  int failed = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, opts);
    out << format_result(r) << std::flush;
    if (!r.passed) ++failed;
  }
  out << fmt("\n%d of %zu criteria passed\n", static_cast<int>(ids.size()) - failed, ids.size());
  return failed == 0 ? kOk : kFailure;
}

int cmd_show_config(const RunConfig& cfg, std::ostream& out) {
  nlohmann::json j = cfg;
  out << j.dump(2) << '\n';
  out << fmt("constants: kappa = (4 pi)^2 / 27 = %.15g, alpha = 4 sqrt2 = %.15g, beta = 2 pi - 4 sqrt2 = %.15g\n",
             kDefaultKappa, kPerimeterAlpha, kPerimeterBeta);
  return kOk;
}

}  // namespace fuzzy::app
