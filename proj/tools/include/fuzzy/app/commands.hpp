#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include "fuzzy/app/acceptance.hpp"
#include "fuzzy/app/config.hpp"
#include "fuzzy/variational.hpp"
#include "json.hpp"

namespace fuzzy::app {

/// Exit codes shared by all commands.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,     ///< a check failed or (with --strict) a row was flagged
  kUsage = 2,       ///< bad arguments or configuration
  kMismatch = 3,    ///< internal cross-check outside tolerance
};

nlohmann::json ground_state_json(const GroundStateModel& model);
GroundStateModel ground_state_from_json(const nlohmann::json& j);

int cmd_ground_state(const RunConfig& cfg, std::ostream& out);
int cmd_expect(const RunConfig& cfg, std::ostream& out);
int cmd_sample(const RunConfig& cfg, std::ostream& out);
int cmd_dmc(const RunConfig& cfg, std::ostream& out);
int cmd_ellipse(const std::array<double, 6>& xy, bool json, std::ostream& out);
int cmd_render_heatmap(const RunConfig& cfg, std::ostream& out);
int cmd_render_typical(const RunConfig& cfg, std::ostream& out);
/// Runs the selected criteria (all when empty); nonzero if any fails.
int cmd_verify(const RunConfig& cfg, const std::vector<int>& only, double kappa_perturbation, std::ostream& out);
int cmd_show_config(const RunConfig& cfg, std::ostream& out);

}  // namespace fuzzy::app
