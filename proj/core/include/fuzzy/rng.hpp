#pragma once

#include <cstdint>
#include <random>

namespace fuzzy::num {

/// Seeded random stream. Identical (seed, stream) pairs replay identical
/// sequences bit for bit; distinct stream ids give independent sequences.
/// The variate transforms are implemented here rather than through
/// <random> distributions, whose output is not portable across libraries.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal via the Marsaglia polar transform.
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }
  /// Exponential with the given rate, by inverse CDF.
  double exponential(double rate);
  /// Gamma with shape 2 and the given rate: sum of two exponentials.
  double gamma_shape2(double rate);

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fuzzy::num
