#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fuzzy/membrane.hpp"
#include "fuzzy/variational.hpp"

namespace fuzzy::dmc {

enum class PotentialKind {
  membrane,  ///< kappa |x cross y|^2
  harmonic,  ///< |r|^2 / 2 on R^6, ground energy exactly 3
};

struct HistogramSpec {
  std::size_t u_bins = 40;
  std::size_t v_bins = 40;
  double u_max = 4.0;
  double v_max = 4.0;
};

struct DmcConfig {
  std::size_t walkers = 10000;
  double tau = 0.002;
  std::size_t equilibration_steps = 1500;
  std::size_t measurement_steps = 3000;
  std::uint64_t seed = 1;
  bool guided = true;
  double kappa = kDefaultKappa;
  PotentialKind potential = PotentialKind::membrane;
  /// Starting E_target; defaults to 3 for the harmonic potential and to the
  /// variational energy for the membrane.
  std::optional<double> energy_guess;
  /// Population feedback strength in E_ref = E_target + eta ln(N0 / N) / tau.
  double eta = 0.1;
  unsigned workers = 1;
  /// Walkers with |r| beyond this radius are removed.
  double wall_radius = 50.0;
  /// Gaussian width c of the harmonic trial function exp(-c |r|^2 / 2).
  double harmonic_trial_width = 0.8;
  /// Walkers are binned every `histogram_stride` measurement steps.
  std::size_t histogram_stride = 10;
  HistogramSpec histogram;
};

/// Throws std::invalid_argument for tau outside (0, 0.1], fewer than 100
/// walkers, or other nonsensical fields.
void validate(const DmcConfig& cfg);

class PopulationError : public std::runtime_error {
 public:
  PopulationError(const std::string& what, std::size_t step, std::size_t population, double e_ref)
      : std::runtime_error(what), step(step), population(population), e_ref(e_ref) {}
  std::size_t step;
  std::size_t population;
  double e_ref;
};

/// Walker counts in (U, V) bins. Bins lying wholly above V = U^2 are
/// structurally empty and flagged in `allowed`.
struct Histogram2D {
  HistogramSpec spec;
  std::vector<double> mass;  ///< row-major, u index outer; sums to 1 over in-range walkers
  std::vector<bool> allowed;
  double overflow_fraction = 0.0;
  std::size_t entries = 0;

  double u_width() const { return spec.u_max / static_cast<double>(spec.u_bins); }
  double v_width() const { return spec.v_max / static_cast<double>(spec.v_bins); }
  double at(std::size_t iu, std::size_t iv) const { return mass[iu * spec.v_bins + iv]; }
  double total_mass() const;
};

struct DmcResult {
  double energy = 0.0;  ///< average of E_ref over the measurement phase
  double error = 0.0;   ///< blocked standard error of `energy`
  /// Mixed local-energy estimator (guided mode only).
  std::optional<double> mixed_energy;
  std::optional<double> mixed_error;
  /// Population average of the potential during measurement.
  double potential_mean = 0.0;
  std::vector<std::size_t> population;  ///< one entry per step, both phases
  std::vector<double> e_ref_trace;      ///< one entry per step, both phases
  std::vector<double> mixed_trace;      ///< guided mode, one entry per step
  Histogram2D histogram;
  double tau = 0.0;
  bool guided = false;
  PotentialKind potential = PotentialKind::membrane;
  double acceptance = 1.0;  ///< Metropolis acceptance in guided mode
  std::size_t walker_steps = 0;
  std::size_t wall_kills = 0;
  /// Set when wall kills exceed 1e-4 of all walker steps.
  bool wall_flag = false;
  std::size_t equilibration_steps = 0;
};

DmcResult run_dmc(const DmcConfig& cfg);

/// The histogram stored in the result, mass normalized to 1.
const Histogram2D& uv_histogram(const DmcResult& result);

/// Ground-state density integrated over each bin of `spec` (restricted to
/// V <= U^2) and renormalized over the histogram support.
std::vector<double> binned_pdf(const GroundStateModel& model, const HistogramSpec& spec);

struct HistogramComparison {
  double total_variation = 0.0;
  double u_mode_histogram = 0.0;
  double u_mode_pdf = 0.0;
  /// u_mode_histogram / u_mode_pdf lies in [1/2, 2].
  bool mode_within_factor_two = false;
};

/// Qualitative comparison with the variational density. The constant
/// R^6 -> (U, V) measure factor drops out after both sides are normalized.
HistogramComparison compare_histogram(const Histogram2D& hist, const GroundStateModel& model);

/// Standard error of the mean from successive block doubling, taking the
/// largest estimate seen while at least `min_blocks` blocks remain.
double blocked_standard_error(const std::vector<double>& series, std::size_t min_blocks = 16);

struct TauPoint {
  double tau = 0.0;
  double energy = 0.0;
  double error = 0.0;
};

struct TauExtrapolation {
  double energy = 0.0;  ///< intercept at tau = 0
  double error = 0.0;
  double slope = 0.0;
  double slope_error = 0.0;
  double chi2 = 0.0;
  /// Successive estimates ordered by tau never reverse by more than the
  /// combined 2-sigma error.
  bool monotone = false;
};

/// Weighted least-squares fit E(tau) = E0 + b tau. Needs at least two points
/// with positive errors.
TauExtrapolation tau_extrapolate(const std::vector<TauPoint>& points);

}  // namespace fuzzy::dmc
