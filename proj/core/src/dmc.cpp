#include "fuzzy/dmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <thread>

#include "fuzzy/observables.hpp"
#include "fuzzy/quadrature.hpp"
#include "fuzzy/rng.hpp"

namespace fuzzy::dmc {

namespace {

using Point = std::array<double, 6>;

struct Walker {
  Point r{};
  double log_psi = 0.0;
  Point drift{};
  double local_energy = 0.0;
  double potential = 0.0;
};

double radius_sq(const Point& r) {
  double s = 0.0;
  for (double c : r) s += c * c;
  return s;
}

InvariantCoords point_invariants(const Point& r) {
  return invariants(MembraneConfig{{r[0], r[1], r[2]}, {r[3], r[4], r[5]}});
}

// Everything the walk needs about the Hamiltonian and the guiding function.
class System {
 public:
  explicit System(const DmcConfig& cfg) : cfg_(cfg) {
    if (cfg.potential == PotentialKind::membrane) params_ = minimize_closed(cfg.kappa).params;
  }

  double potential(const Point& r) const {
    if (cfg_.potential == PotentialKind::harmonic) return 0.5 * radius_sq(r);
    return cfg_.kappa * point_invariants(r).V;
  }

  // Fills log_psi, drift, local_energy and potential for walker.r.
  void evaluate(Walker& w) const {
    w.potential = potential(w.r);
    if (!cfg_.guided) return;
    if (cfg_.potential == PotentialKind::harmonic) {
      const double c = cfg_.harmonic_trial_width;
      const double r2 = radius_sq(w.r);
      w.log_psi = -0.5 * c * r2;
      for (int k = 0; k < 6; ++k) w.drift[k] = -c * w.r[k];
      w.local_energy = 3.0 * c + 0.5 * (1.0 - c * c) * r2;
      return;
    }
    const Vec3 x{w.r[0], w.r[1], w.r[2]};
    const Vec3 y{w.r[3], w.r[4], w.r[5]};
    const InvariantCoords inv = point_invariants(w.r);
    const double t = std::max(std::sqrt(inv.V), 1e-300);
    const double xy = dot(x, y);
    const double xx = norm_sq(x);
    const double yy = norm_sq(y);
    // grad sqrt V = grad V / (2 t), grad_x V = 2 (x |y|^2 - (x.y) y).
    const double g = inv.V > 0.0 ? params_.nu / t : 0.0;
    for (int k = 0; k < 3; ++k) {
      w.drift[k] = -params_.mu * x[k] - g * (x[k] * yy - xy * y[k]);
      w.drift[k + 3] = -params_.mu * y[k] - g * (y[k] * xx - xy * x[k]);
    }
    w.log_psi = -params_.mu * inv.U - params_.nu * std::sqrt(inv.V);
    w.local_energy = trial_local_energy(params_, cfg_.kappa, inv.U, t);
  }

  const VariationalParams& params() const { return params_; }

 private:
  DmcConfig cfg_;
  VariationalParams params_;
};

std::vector<Walker> initial_walkers(const DmcConfig& cfg, const System& sys) {
  num::RngStream rng(cfg.seed, std::numeric_limits<std::uint64_t>::max());
  std::vector<Walker> walkers(cfg.walkers);
  if (cfg.potential == PotentialKind::harmonic) {
    const double sigma = 1.0 / std::sqrt(2.0 * cfg.harmonic_trial_width);
    for (auto& w : walkers)
      for (double& c : w.r) c = sigma * rng.normal();
  } else {
    GroundStateModel model;
    model.params = sys.params();
    model.kappa = cfg.kappa;
    const auto batch = sample_uv(model, cfg.walkers, rng);
    for (std::size_t i = 0; i < cfg.walkers; ++i) {
      const auto conf = config_with_invariants(batch.samples[i].U, batch.samples[i].V, rng);
      walkers[i].r = {conf.x[0], conf.x[1], conf.x[2], conf.y[0], conf.y[1], conf.y[2]};
    }
  }
  for (auto& w : walkers) sys.evaluate(w);
  return walkers;
}

struct ChunkStats {
  std::vector<Walker> offspring;
  std::size_t accepted = 0;
  std::size_t moves = 0;
  std::size_t kills = 0;
};

// Moves walkers [begin, end) one step and appends their offspring.
void advance_chunk(const std::vector<Walker>& walkers, std::size_t begin, std::size_t end,
                   const System& sys, const DmcConfig& cfg, double e_ref, num::RngStream& rng,
                   ChunkStats& out) {
  const double tau = cfg.tau;
  const double sqrt_tau = std::sqrt(tau);
  const double wall_sq = cfg.wall_radius * cfg.wall_radius;
  const double cap = 2.0 / sqrt_tau;
  for (std::size_t i = begin; i < end; ++i) {
    const Walker& old = walkers[i];
    Walker next;
    double weight_energy;
    ++out.moves;
    if (!cfg.guided) {
      for (int k = 0; k < 6; ++k) next.r[k] = old.r[k] + sqrt_tau * rng.normal();
      sys.evaluate(next);
      weight_energy = 0.5 * (old.potential + next.potential);
      ++out.accepted;
    } else {
      Point chi;
      for (int k = 0; k < 6; ++k) {
        chi[k] = rng.normal();
        next.r[k] = old.r[k] + tau * old.drift[k] + sqrt_tau * chi[k];
      }
      sys.evaluate(next);
      double forward = 0.0;
      double backward = 0.0;
      for (int k = 0; k < 6; ++k) {
        forward += chi[k] * chi[k] * tau;
        const double d = old.r[k] - next.r[k] - tau * next.drift[k];
        backward += d * d;
      }
      const double log_ratio =
          2.0 * (next.log_psi - old.log_psi) + (forward - backward) / (2.0 * tau);
      const double u = rng.uniform();
      const bool accept = log_ratio >= 0.0 || u < std::exp(log_ratio);
      if (!accept) next = old;
      else ++out.accepted;
      const double el_old = std::clamp(old.local_energy, e_ref - cap, e_ref + cap);
      const double el_new = std::clamp(next.local_energy, e_ref - cap, e_ref + cap);
      weight_energy = 0.5 * (el_old + el_new);
    }
    const double weight = std::exp(-tau * (weight_energy - e_ref));
    const auto copies = static_cast<std::size_t>(weight + rng.uniform());
    if (copies == 0) continue;
    if (radius_sq(next.r) > wall_sq) {
      ++out.kills;
      continue;
    }
    for (std::size_t c = 0; c < copies; ++c) out.offspring.push_back(next);
  }
}

void accumulate_histogram(const std::vector<Walker>& walkers, const HistogramSpec& spec,
                          std::vector<double>& counts, std::size_t& inside, std::size_t& total) {
  const double du = spec.u_max / static_cast<double>(spec.u_bins);
  const double dv = spec.v_max / static_cast<double>(spec.v_bins);
  for (const auto& w : walkers) {
    const InvariantCoords inv = point_invariants(w.r);
    ++total;
    if (inv.U >= spec.u_max || inv.V >= spec.v_max) continue;
    const auto iu = std::min(spec.u_bins - 1, static_cast<std::size_t>(inv.U / du));
    const auto iv = std::min(spec.v_bins - 1, static_cast<std::size_t>(inv.V / dv));
    counts[iu * spec.v_bins + iv] += 1.0;
    ++inside;
  }
}

std::vector<bool> allowed_bins(const HistogramSpec& spec) {
  const double du = spec.u_max / static_cast<double>(spec.u_bins);
  const double dv = spec.v_max / static_cast<double>(spec.v_bins);
  std::vector<bool> allowed(spec.u_bins * spec.v_bins);
  for (std::size_t iu = 0; iu < spec.u_bins; ++iu) {
    const double u1 = du * static_cast<double>(iu + 1);
    for (std::size_t iv = 0; iv < spec.v_bins; ++iv) {
      allowed[iu * spec.v_bins + iv] = dv * static_cast<double>(iv) < u1 * u1;
    }
  }
  return allowed;
}

double mean_of(const std::vector<double>& xs, std::size_t from) {
  num::CompensatedSum s;
  for (std::size_t i = from; i < xs.size(); ++i) s += xs[i];
  return s.value() / static_cast<double>(xs.size() - from);
}

}  // namespace

void validate(const DmcConfig& cfg) {
  if (!(cfg.tau > 0.0 && cfg.tau <= 0.1)) throw std::invalid_argument("DmcConfig: tau must lie in (0, 0.1]");
  if (cfg.walkers < 100) throw std::invalid_argument("DmcConfig: need at least 100 walkers");
  if (cfg.measurement_steps < 32) throw std::invalid_argument("DmcConfig: need at least 32 measurement steps");
  if (!(cfg.kappa > 0.0)) throw std::invalid_argument("DmcConfig: kappa must be positive");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("DmcConfig: eta must be positive");
  if (cfg.workers == 0) throw std::invalid_argument("DmcConfig: workers must be positive");
  if (!(cfg.wall_radius > 0.0)) throw std::invalid_argument("DmcConfig: wall radius must be positive");
  if (!(cfg.harmonic_trial_width > 0.0)) throw std::invalid_argument("DmcConfig: harmonic trial width must be positive");
  if (cfg.histogram_stride == 0) throw std::invalid_argument("DmcConfig: histogram stride must be positive");
  const auto& h = cfg.histogram;
  if (h.u_bins == 0 || h.v_bins == 0 || !(h.u_max > 0.0) || !(h.v_max > 0.0)) {
    throw std::invalid_argument("DmcConfig: bad histogram spec");
  }
}

double Histogram2D::total_mass() const {
  num::CompensatedSum s;
  for (double m : mass) s += m;
  return s.value();
}

DmcResult run_dmc(const DmcConfig& cfg) {
  validate(cfg);
  const System sys(cfg);
  std::vector<Walker> walkers = initial_walkers(cfg, sys);

  std::vector<num::RngStream> streams;
  streams.reserve(cfg.workers);
  for (unsigned w = 0; w < cfg.workers; ++w) streams.emplace_back(cfg.seed, w);

  DmcResult res;
  res.tau = cfg.tau;
  res.guided = cfg.guided;
  res.potential = cfg.potential;
  res.equilibration_steps = cfg.equilibration_steps;
  res.histogram.spec = cfg.histogram;
  std::vector<double> counts(cfg.histogram.u_bins * cfg.histogram.v_bins, 0.0);
  std::size_t hist_inside = 0;
  std::size_t hist_total = 0;

  const double target = static_cast<double>(cfg.walkers);
  double e_target;
  if (cfg.energy_guess) {
    e_target = *cfg.energy_guess;
  } else if (cfg.potential == PotentialKind::harmonic) {
    e_target = 3.0;
  } else {
    e_target = energy_closed(sys.params(), cfg.kappa);
  }
  // E_target follows E_ref with a memory of half a time unit.
  const double smoothing = std::min(1.0, cfg.tau / 0.5);

  std::size_t accepted = 0;
  std::size_t moves = 0;
  num::CompensatedSum potential_sum;
  std::size_t potential_count = 0;

  const std::size_t total_steps = cfg.equilibration_steps + cfg.measurement_steps;
  std::vector<ChunkStats> chunks(cfg.workers);
  for (std::size_t step = 0; step < total_steps; ++step) {
    const bool measuring = step >= cfg.equilibration_steps;
    const double n = static_cast<double>(walkers.size());
    const double e_ref = e_target + cfg.eta * std::log(target / n) / cfg.tau;

    for (auto& c : chunks) {
      c.offspring.clear();
      c.accepted = c.moves = c.kills = 0;
    }
    const std::size_t per = walkers.size() / cfg.workers;
    const std::size_t extra = walkers.size() % cfg.workers;
    auto bounds = [&](unsigned w) {
      const std::size_t b = w * per + std::min<std::size_t>(w, extra);
      return std::pair{b, b + per + (w < extra ? 1 : 0)};
    };
    if (cfg.workers == 1) {
      advance_chunk(walkers, 0, walkers.size(), sys, cfg, e_ref, streams[0], chunks[0]);
    } else {
      std::vector<std::jthread> threads;
      threads.reserve(cfg.workers);
      for (unsigned w = 0; w < cfg.workers; ++w) {
        threads.emplace_back([&, w] {
          const auto [b, e] = bounds(w);
          advance_chunk(walkers, b, e, sys, cfg, e_ref, streams[w], chunks[w]);
        });
      }
    }

    std::vector<Walker> next;
    next.reserve(walkers.size() + walkers.size() / 8);
    for (auto& c : chunks) {
      next.insert(next.end(), c.offspring.begin(), c.offspring.end());
      accepted += c.accepted;
      moves += c.moves;
      res.wall_kills += c.kills;
    }
    walkers.swap(next);

    if (walkers.size() < target / 10.0 || walkers.size() > target * 10.0) {
      throw PopulationError(walkers.size() < target / 10.0 ? "dmc: population collapse"
                                                           : "dmc: population explosion",
                            step, walkers.size(), e_ref);
    }

    res.population.push_back(walkers.size());
    res.e_ref_trace.push_back(e_ref);
    if (cfg.guided) {
      num::CompensatedSum el;
      for (const auto& w : walkers) el += w.local_energy;
      res.mixed_trace.push_back(el.value() / static_cast<double>(walkers.size()));
    }
    if (measuring) {
      for (const auto& w : walkers) potential_sum += w.potential;
      potential_count += walkers.size();
      if ((step - cfg.equilibration_steps) % cfg.histogram_stride == 0) {
        accumulate_histogram(walkers, cfg.histogram, counts, hist_inside, hist_total);
      }
    }
    e_target += smoothing * (e_ref - e_target);
  }

  res.walker_steps = moves;
  res.acceptance = moves > 0 ? static_cast<double>(accepted) / static_cast<double>(moves) : 1.0;
  res.wall_flag = static_cast<double>(res.wall_kills) > 1e-4 * static_cast<double>(moves);
  res.potential_mean = potential_count > 0 ? potential_sum.value() / static_cast<double>(potential_count) : 0.0;

  const std::vector<double> e_meas(res.e_ref_trace.begin() + static_cast<std::ptrdiff_t>(cfg.equilibration_steps),
                                   res.e_ref_trace.end());
  res.energy = mean_of(e_meas, 0);
  res.error = blocked_standard_error(e_meas);
  if (cfg.guided) {
    const std::vector<double> m_meas(res.mixed_trace.begin() + static_cast<std::ptrdiff_t>(cfg.equilibration_steps),
                                     res.mixed_trace.end());
    res.mixed_energy = mean_of(m_meas, 0);
    res.mixed_error = blocked_standard_error(m_meas);
  }

  auto& h = res.histogram;
  h.allowed = allowed_bins(cfg.histogram);
  h.entries = hist_total;
  h.mass.assign(counts.size(), 0.0);
  if (hist_inside > 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) h.mass[i] = counts[i] / static_cast<double>(hist_inside);
  }
  h.overflow_fraction =
      hist_total > 0 ? static_cast<double>(hist_total - hist_inside) / static_cast<double>(hist_total) : 0.0;
  return res;
}

const Histogram2D& uv_histogram(const DmcResult& result) { return result.histogram; }

std::vector<double> binned_pdf(const GroundStateModel& model, const HistogramSpec& spec) {
  const auto& rule = num::cached_gauss_legendre(20);
  const double du = spec.u_max / static_cast<double>(spec.u_bins);
  const double dv = spec.v_max / static_cast<double>(spec.v_bins);

  // Gauss-Legendre on [a, b] of g.
  auto gl = [&rule](double a, double b, auto&& g) {
    if (!(b > a)) return 0.0;
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.order(); ++k) s += rule.weights[k] * g(mid + half * rule.nodes[k]);
    return half * s;
  };

  std::vector<double> out(spec.u_bins * spec.v_bins, 0.0);
  num::CompensatedSum total;
  for (std::size_t iu = 0; iu < spec.u_bins; ++iu) {
    const double u0 = du * static_cast<double>(iu);
    const double u1 = u0 + du;
    for (std::size_t iv = 0; iv < spec.v_bins; ++iv) {
      const double v0 = dv * static_cast<double>(iv);
      const double v1 = v0 + dv;
      if (v0 >= u1 * u1) continue;
      // In t = sqrt V the inner integrand 2 t pdf is smooth; the inner upper
      // limit min(sqrt v1, U) has kinks where U crosses sqrt v0 and sqrt v1.
      const double t0 = std::sqrt(v0);
      const double t1 = std::sqrt(v1);
      auto inner = [&](double U) {
        return gl(t0, std::min(t1, U), [&](double t) { return 2.0 * t * pdf(model, U, t * t); });
      };
      std::array<double, 4> cuts{u0, std::clamp(t0, u0, u1), std::clamp(t1, u0, u1), u1};
      double cell = 0.0;
      for (int k = 0; k < 3; ++k) cell += gl(cuts[k], cuts[k + 1], inner);
      out[iu * spec.v_bins + iv] = cell;
      total += cell;
    }
  }
  if (total.value() > 0.0)
    for (double& x : out) x /= total.value();
  return out;
}

HistogramComparison compare_histogram(const Histogram2D& hist, const GroundStateModel& model) {
  const auto p = binned_pdf(model, hist.spec);
  HistogramComparison c;
  num::CompensatedSum tv;
  for (std::size_t i = 0; i < p.size(); ++i) tv += std::abs(hist.mass[i] - p[i]);
  c.total_variation = 0.5 * tv.value();

  auto u_mode = [&](const std::vector<double>& m) {
    std::size_t best = 0;
    double best_mass = -1.0;
    for (std::size_t iu = 0; iu < hist.spec.u_bins; ++iu) {
      double s = 0.0;
      for (std::size_t iv = 0; iv < hist.spec.v_bins; ++iv) s += m[iu * hist.spec.v_bins + iv];
      if (s > best_mass) {
        best_mass = s;
        best = iu;
      }
    }
    return hist.u_width() * (static_cast<double>(best) + 0.5);
  };
  c.u_mode_histogram = u_mode(hist.mass);
  c.u_mode_pdf = u_mode(p);
  const double ratio = c.u_mode_histogram / c.u_mode_pdf;
  c.mode_within_factor_two = ratio >= 0.5 && ratio <= 2.0;
  return c;
}

double blocked_standard_error(const std::vector<double>& series, std::size_t min_blocks) {
  if (series.size() < 2) throw std::invalid_argument("blocked_standard_error: need at least 2 values");
  min_blocks = std::max<std::size_t>(min_blocks, 2);
  double best = 0.0;
  for (std::size_t size = 1;; size *= 2) {
    const std::size_t blocks = series.size() / size;
    if (blocks < min_blocks && size > 1) break;
    std::vector<double> means(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
      num::CompensatedSum s;
      for (std::size_t k = 0; k < size; ++k) s += series[b * size + k];
      means[b] = s.value() / static_cast<double>(size);
    }
    const double m = mean_of(means, 0);
    num::CompensatedSum sq;
    for (double x : means) sq += (x - m) * (x - m);
    const double nb = static_cast<double>(blocks);
    best = std::max(best, std::sqrt(sq.value() / (nb - 1.0) / nb));
    if (blocks < 2 * min_blocks) break;
  }
  return best;
}

TauExtrapolation tau_extrapolate(const std::vector<TauPoint>& points) {
  if (points.size() < 2) throw std::invalid_argument("tau_extrapolate: need at least two points");
  double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : points) {
    if (!(p.error > 0.0)) throw std::invalid_argument("tau_extrapolate: errors must be positive");
    const double w = 1.0 / (p.error * p.error);
    sw += w;
    sx += w * p.tau;
    sy += w * p.energy;
    sxx += w * p.tau * p.tau;
    sxy += w * p.tau * p.energy;
  }
  const double det = sw * sxx - sx * sx;
  if (!(det > 0.0)) throw std::invalid_argument("tau_extrapolate: need two distinct tau values");
  TauExtrapolation out;
  out.energy = (sxx * sy - sx * sxy) / det;
  out.slope = (sw * sxy - sx * sy) / det;
  out.error = std::sqrt(sxx / det);
  out.slope_error = std::sqrt(sw / det);
  for (const auto& p : points) {
    const double r = (p.energy - out.energy - out.slope * p.tau) / p.error;
    out.chi2 += r * r;
  }

  auto sorted = points;
  std::sort(sorted.begin(), sorted.end(), [](const TauPoint& a, const TauPoint& b) { return a.tau < b.tau; });
  const double direction = out.slope >= 0.0 ? 1.0 : -1.0;
  out.monotone = true;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    const double step = direction * (sorted[i + 1].energy - sorted[i].energy);
    const double sigma = std::hypot(sorted[i].error, sorted[i + 1].error);
    if (step < -2.0 * sigma) out.monotone = false;
  }
  return out;
}

}  // namespace fuzzy::dmc
