#pragma once

#include "pointkin/numerics.hpp"

#include <cstdint>
#include <random>

namespace pointkin {

/// Seedable random stream for one sample path. The same seed gives the same
/// variate sequence within one build.
class NoiseSource {
 public:
  explicit NoiseSource(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  /// Standard normal variate.
  double normal() { return normal_(engine_); }

  /// Uniform variate on [0, 1).
  double uniform() { return uniform_(engine_); }

  /// Exponential variate with the given rate (> 0).
  double exponential(double rate);

  /// Overwrites every entry of `out` with independent N(0,1) draws.
  void fill_normal(DenseVector& out);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Per-path seed derived from a master seed and a path index (splitmix64
/// finalizer). Distinct indices give decorrelated streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace pointkin
