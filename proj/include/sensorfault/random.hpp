#pragma once

#include <cstdint>
#include <optional>
#include <random>

namespace sensorfault {

/// Seedable random source whose outputs are fixed by the algorithms below
/// rather than by the standard library's distribution implementations:
///   engine:   std::mt19937_64 (bit-exact across conforming implementations)
///   integers: rejection sampling on the raw 64-bit output
///   uniform:  top 53 bits scaled into [0, 1)
///   normal:   Marsaglia polar method, second variate cached
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  /// Uniform double in [0, 1).
  double uniform01();

  /// Standard normal variate.
  double standard_normal();

  double normal(double mean, double stddev) { return mean + stddev * standard_normal(); }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

/// SplitMix64 finalizer, used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace sensorfault
