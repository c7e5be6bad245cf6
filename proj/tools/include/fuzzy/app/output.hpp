#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fuzzy/app/config.hpp"
#include "fuzzy/dmc.hpp"
#include "fuzzy/ellipse.hpp"
#include "fuzzy/observables.hpp"
#include "fuzzy/variational.hpp"

namespace fuzzy::app {

/// Creates the directory if needed; throws std::runtime_error when the path
/// cannot be used for output.
void ensure_directory(const std::filesystem::path& dir);
/// Writes text to path, throwing std::runtime_error on failure.
void write_text(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double x);

void write_samples_csv(std::ostream& os, const SampleBatch& batch);
std::vector<UVSample> read_samples_csv(std::istream& is);

/// Ground-state density on the node grid U_i = i u_max / (u_points - 1),
/// V_j = j v_max / (v_points - 1); zero above V = U^2.
struct HeatmapGrid {
  std::vector<double> u;
  std::vector<double> v;
  std::vector<double> density;  ///< row-major, u index outer

  double at(std::size_t i, std::size_t j) const { return density[i * v.size() + j]; }
  /// Riemann sum of the density times the cell area.
  double riemann_mass() const;
};

HeatmapGrid evaluate_heatmap(const GroundStateModel& model, const HeatmapSettings& settings);
void write_heatmap_csv(std::ostream& os, const HeatmapGrid& grid);
HeatmapGrid read_heatmap_csv(std::istream& is);
/// Linear colour scale normalized to the density at the origin, with the
/// boundary V = U^2 drawn on top.
std::string heatmap_svg(const HeatmapGrid& grid);

/// Outline of an ellipse of unit minor axis and the given aspect ratio,
/// annotated with the ratio and the shape parameter.
std::string typical_svg(const EllipseGeometry& geom, double shape, std::size_t points = 256);

void write_dmc_trace_csv(std::ostream& os, const dmc::DmcResult& result);
void write_dmc_histogram_csv(std::ostream& os, const dmc::Histogram2D& hist);

}  // namespace fuzzy::app
