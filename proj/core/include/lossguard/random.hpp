#pragma once

#include <cstdint>
#include <random>

namespace lossguard {

/// Seedable random stream. Every stochastic operation takes one of these
/// explicitly; there is no global generator. Not thread-safe: give each
/// thread (or each Monte Carlo trial) its own stream.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for trial `index` of a run seeded with `base_seed`.
  /// The seed is `base_seed + index` passed through a splitmix64 finalizer,
  /// so neighbouring trials do not get correlated mt19937 states.
  static RandomStream for_trial(std::uint64_t base_seed, std::uint64_t index);

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  bool bernoulli(double p);
  double normal();

  /// True iff `count` independent Bernoulli(p) draws all succeed. Sampled
  /// in O(1) via the length of the initial run of successes.
  bool all_succeed(std::uint64_t count, double p);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lossguard
