#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fuzzy/dmc.hpp"
#include "fuzzy/membrane.hpp"
#include "json.hpp"

namespace fuzzy::app {

struct DmcSettings {
  std::size_t walkers = 10000;
  double tau = 0.002;
  std::size_t equilibration_steps = 1000;
  std::size_t measurement_steps = 2000;
  bool guided = true;
  bool harmonic = false;
  double eta = 0.1;
};

struct HeatmapSettings {
  double u_max = 4.0;
  double v_max = 8.0;
  std::size_t u_points = 100;
  std::size_t v_points = 100;
};

/// Everything a command needs. Defaults reproduce the reference setting:
/// kappa = (4 pi)^2 / 27.
struct RunConfig {
  double kappa = kDefaultKappa;
  std::uint64_t seed = 20240601;
  double tol = 1e-11;
  std::size_t mc_samples = 1000000;
  std::string out = "fuzzy-out";
  bool strict = false;
  unsigned workers = 1;
  DmcSettings dmc;
  HeatmapSettings heatmap;
  /// Shape parameter for render-typical; the ground-state <S> when unset.
  std::optional<double> shape;
};

/// Throws std::invalid_argument on a field outside its domain.
void validate(const RunConfig& cfg);

dmc::DmcConfig to_dmc_config(const RunConfig& cfg);

void to_json(nlohmann::json& j, const RunConfig& cfg);
/// Missing keys keep their current values, so a partial file overlays the
/// defaults. Unknown keys are rejected.
void merge_json(const nlohmann::json& j, RunConfig& cfg);

RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

}  // namespace fuzzy::app
