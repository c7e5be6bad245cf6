#include "fuzzy/app/config.hpp"

#include <fstream>
#include <set>
#include <stdexcept>

namespace fuzzy::app {

namespace {

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("config: unknown key '" + where + key + "'");
  }
}

template <class T>
void take(const nlohmann::json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("config: kappa must be positive");
  if (!(cfg.tol > 0.0 && cfg.tol < 1e-2)) throw std::invalid_argument("config: tol must lie in (0, 1e-2)");
  if (cfg.workers == 0) throw std::invalid_argument("config: workers must be positive");
  if (cfg.out.empty()) throw std::invalid_argument("config: out must name a directory");
  const auto& h = cfg.heatmap;
  if (!(h.u_max > 0.0) || !(h.v_max > 0.0) || h.u_points < 2 || h.v_points < 2) {
    throw std::invalid_argument("config: bad heatmap grid");
  }
  if (cfg.shape && !(*cfg.shape >= 1.0)) throw std::invalid_argument("config: shape must be >= 1");
  dmc::validate(to_dmc_config(cfg));
}

dmc::DmcConfig to_dmc_config(const RunConfig& cfg) {
  dmc::DmcConfig d;
  d.walkers = cfg.dmc.walkers;
  d.tau = cfg.dmc.tau;
  d.equilibration_steps = cfg.dmc.equilibration_steps;
  d.measurement_steps = cfg.dmc.measurement_steps;
  d.seed = cfg.seed;
  d.guided = cfg.dmc.guided;
  d.kappa = cfg.kappa;
  d.potential = cfg.dmc.harmonic ? dmc::PotentialKind::harmonic : dmc::PotentialKind::membrane;
  d.eta = cfg.dmc.eta;
  d.workers = cfg.workers;
  return d;
}

void to_json(nlohmann::json& j, const RunConfig& cfg) {
  j = nlohmann::json{
      {"kappa", cfg.kappa},
      {"seed", cfg.seed},
      {"tol", cfg.tol},
      {"mc_samples", cfg.mc_samples},
      {"out", cfg.out},
      {"strict", cfg.strict},
      {"workers", cfg.workers},
      {"dmc",
       {{"walkers", cfg.dmc.walkers},
        {"tau", cfg.dmc.tau},
        {"equilibration_steps", cfg.dmc.equilibration_steps},
        {"measurement_steps", cfg.dmc.measurement_steps},
        {"guided", cfg.dmc.guided},
        {"harmonic", cfg.dmc.harmonic},
        {"eta", cfg.dmc.eta}}},
      {"heatmap",
       {{"u_max", cfg.heatmap.u_max},
        {"v_max", cfg.heatmap.v_max},
        {"u_points", cfg.heatmap.u_points},
        {"v_points", cfg.heatmap.v_points}}},
  };
  j["shape"] = cfg.shape ? nlohmann::json(*cfg.shape) : nlohmann::json(nullptr);
}

void merge_json(const nlohmann::json& j, RunConfig& cfg) {
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  reject_unknown(j, {"kappa", "seed", "tol", "mc_samples", "out", "strict", "workers", "dmc", "heatmap", "shape"}, "");
  take(j, "kappa", cfg.kappa);
  take(j, "seed", cfg.seed);
  take(j, "tol", cfg.tol);
  take(j, "mc_samples", cfg.mc_samples);
  take(j, "out", cfg.out);
  take(j, "strict", cfg.strict);
  take(j, "workers", cfg.workers);
  if (j.contains("dmc")) {
    const auto& d = j.at("dmc");
    reject_unknown(d, {"walkers", "tau", "equilibration_steps", "measurement_steps", "guided", "harmonic", "eta"},
                   "dmc.");
    take(d, "walkers", cfg.dmc.walkers);
    take(d, "tau", cfg.dmc.tau);
    take(d, "equilibration_steps", cfg.dmc.equilibration_steps);
    take(d, "measurement_steps", cfg.dmc.measurement_steps);
    take(d, "guided", cfg.dmc.guided);
    take(d, "harmonic", cfg.dmc.harmonic);
    take(d, "eta", cfg.dmc.eta);
  }
  if (j.contains("heatmap")) {
    const auto& h = j.at("heatmap");
    reject_unknown(h, {"u_max", "v_max", "u_points", "v_points"}, "heatmap.");
    take(h, "u_max", cfg.heatmap.u_max);
    take(h, "v_max", cfg.heatmap.v_max);
    take(h, "u_points", cfg.heatmap.u_points);
    take(h, "v_points", cfg.heatmap.v_points);
  }
  if (j.contains("shape")) {
    if (j.at("shape").is_null()) cfg.shape.reset();
    else cfg.shape = j.at("shape").get<double>();
  }
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config: " + path.string() + ": " + e.what());
  }
  merge_json(j, base);
  return base;
}

}  // namespace fuzzy::app
