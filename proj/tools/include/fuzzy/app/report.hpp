#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fuzzy/app/config.hpp"
#include "fuzzy/observables.hpp"
#include "json.hpp"

namespace fuzzy::app {

enum class Status { match, flagged };

struct ReportRow {
  std::string name;
  /// The published value at the configured kappa.
  std::optional<double> published;
  std::optional<double> closed_form;
  /// Quadrature, or the numeric minimizer for the parameter rows.
  std::optional<double> quadrature;
  std::optional<double> mc_mean;
  std::optional<double> mc_error;
  double tolerance = 0.0;
  Status status = Status::match;
  std::string note;
};

struct Flag {
  std::string name;
  std::string detail;
};

struct VerificationReport {
  std::vector<ReportRow> rows;
  /// Known discrepancies between published expressions and the computed values.
  std::vector<Flag> flags;
  double kappa = 0.0;
  std::uint64_t seed = 0;
  double tol = 0.0;
  std::size_t mc_samples = 0;
  double mc_acceptance = 0.0;
  std::string version;
  std::string compiler;

  bool any_flagged() const;
  const ReportRow* find(const std::string& name) const;
};

/// Runs all evaluation routes for the parameters, the energy and the four
/// ground-state constants.
VerificationReport build_report(const RunConfig& cfg);

nlohmann::json to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& j);
std::string render_table(const VerificationReport& report);

/// Published energy expression kappa^(-1/3) 3 (3/4)^(1/3) at the given kappa.
double printed_energy(double kappa);

}  // namespace fuzzy::app
