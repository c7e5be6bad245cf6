#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fuzzy/quadrature.hpp"
#include "fuzzy/rng.hpp"
#include "fuzzy/variational.hpp"

namespace fuzzy {

/// Reference constants for the ground-state expectations, in their
/// kappa-free form: <A> kappa^(1/3), <E3>, <L> kappa^(1/6), <S>.
inline constexpr double kReferenceAreaScaled = 4.890;
inline constexpr double kReferenceE3 = 0.8337;
inline constexpr double kReferencePerimeterScaled = 6.789;
inline constexpr double kReferenceShape = 2.225;

struct UVSample {
  double U = 0.0;
  double V = 0.0;
};

struct SampleBatch {
  std::vector<UVSample> samples;
  VariationalParams params;
  std::uint64_t seed = 0;
  std::size_t proposals = 0;
  double acceptance_rate = 0.0;
};

/// Exact draws from the ground-state density by rejection: U ~ Exp(2 mu),
/// t ~ Gamma(2, 2 nu), accepted when t <= U, V = t^2.
SampleBatch sample_uv(const GroundStateModel& model, std::size_t n, num::RngStream& stream);

/// Splits n draws over `workers` threads with streams (seed, 0..workers-1);
/// the concatenation order is fixed, so the batch depends only on
/// (seed, workers).
SampleBatch sample_uv_parallel(const GroundStateModel& model, std::size_t n, std::uint64_t seed,
                               unsigned workers);

/// Expected rejection acceptance nu^2 / (mu + nu)^2.
double expected_acceptance(const VariationalParams& p);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
};

using UVFunction = std::function<double(double U, double V)>;

/// Sample mean and standard error sd / sqrt(n). Throws on an empty batch.
McEstimate mc_moment(const SampleBatch& batch, const UVFunction& observable);

enum class Observable { area, eccentricity3, perimeter, shape };

std::string observable_name(Observable o);
/// Observable as a function of (U, V).
double observable_value(Observable o, double U, double V);

/// <f> under the ground-state density, integrand given in (U, t = sqrt V).
num::Integral expectation_quadrature(const GroundStateModel& model,
                                     const std::function<double(double U, double t)>& f,
                                     double tol = 1e-11);

struct NamedValue {
  std::string label;
  double value = 0.0;
};

struct MomentReport {
  std::string name;
  std::optional<double> closed_form;
  /// Every evaluated reading of the closed-form expression.
  std::vector<NamedValue> variants;
  num::Integral quadrature;
  std::optional<McEstimate> monte_carlo;
  std::optional<double> reference;
  double reference_tolerance = 0.0;
  std::vector<NamedValue> diagnostics;
  std::vector<std::string> notes;

  /// |closed - quadrature| <= rel_tol |quadrature|.
  bool closed_form_agrees(double rel_tol = 1e-4) const;
  /// |MC - quadrature| <= k standard errors.
  bool monte_carlo_agrees(double k = 3.0) const;
  /// |quadrature - reference| <= reference_tolerance.
  bool reference_agrees() const;
};

struct MomentOptions {
  double tol = 1e-11;
  const SampleBatch* batch = nullptr;
};

MomentReport expected_area(const GroundStateModel& model, const MomentOptions& opts = {});
MomentReport expected_e3(const GroundStateModel& model, const MomentOptions& opts = {});
MomentReport expected_perimeter(const GroundStateModel& model, const MomentOptions& opts = {});
MomentReport expected_shape(const GroundStateModel& model, const MomentOptions& opts = {});

/// Closed-form evaluators. The *_general forms take arbitrary trial
/// parameters; the *_substituted forms are the expressions with the
/// minimizer ratio nu / mu = sqrt 2 - 1 already inserted.
namespace closed {

double area_general(const VariationalParams& p);
double area_substituted(double kappa);

enum class ArccotBranch {
  principal,   ///< atan(1/x), range (-pi/2, pi/2]
  continuous,  ///< pi/2 - atan(x), range (0, pi)
};
double arccot(double x, ArccotBranch branch);

/// Readings of the E3 coefficient block. B2 either pairs arctan with
/// arccot or uses arccot twice; B3 either reads 3 sqrt2 mu^3 {1 + 2 nu^2/mu^2 ln R}
/// or 3 sqrt2 mu^3 (1 - 2 nu^2/mu^2) ln R.
enum class B2Form { arctan_arccot, arccot_arccot };
enum class B3Form { one_plus_log, factored_log };

/// Requires 0 < nu < mu with nu^2 / mu^2 <= 0.9.
double e3_general(const VariationalParams& p, B2Form b2, B3Form b3,
                  ArccotBranch branch = ArccotBranch::principal);
double e3_substituted(ArccotBranch branch = ArccotBranch::principal);

double perimeter_general(const VariationalParams& p);
double perimeter_substituted(double kappa);

double shape_general(const VariationalParams& p);
double shape_substituted();

}  // namespace closed

/// Marginal CDFs of U and t = sqrt V under the ground-state density.
double marginal_cdf_u(const GroundStateModel& model, double u);
double marginal_cdf_sqrt_v(const GroundStateModel& model, double t);

}  // namespace fuzzy
