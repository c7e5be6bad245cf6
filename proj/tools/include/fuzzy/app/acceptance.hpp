#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fuzzy/membrane.hpp"

namespace fuzzy::app {

struct AcceptanceOptions {
  double kappa = kDefaultKappa;
  /// Relative offset applied to kappa inside the minimizer only. Nonzero
  /// values are a mutation check: the stationarity test must then fail.
  double kappa_perturbation = 0.0;
  std::uint64_t seed = 20240601;
  unsigned workers = 1;
};

struct CriterionInfo {
  int id = 0;
  std::string title;
  double budget_seconds = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  std::vector<std::string> details;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

const std::vector<CriterionInfo>& acceptance_criteria();

/// Runs one criterion. Exceptions thrown by the library are caught and
/// reported as a failure. Unknown ids throw std::out_of_range.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

/// One "[PASS]"/"[FAIL]" headline followed by indented detail lines.
std::string format_result(const CriterionResult& r, bool with_details = true);

}  // namespace fuzzy::app
