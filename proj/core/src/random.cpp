#include "lossguard/random.hpp"

#include <cmath>
#include <limits>

namespace lossguard {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::for_trial(std::uint64_t base_seed, std::uint64_t index) {
  return RandomStream(splitmix64(base_seed + index));
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

bool RandomStream::bernoulli(double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return uniform() < p;
}

double RandomStream::normal() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(engine_);
}

bool RandomStream::all_succeed(std::uint64_t count, double p) {
  if (count == 0 || p >= 1.0) return true;
  if (p <= 0.0) return false;
  // Number of successes before the first failure is Geometric(1 - p):
  // P(run >= count) = p^count.
  const double u = 1.0 - uniform();  // (0, 1]
  const double run = std::floor(std::log(u) / std::log(p));
  return run >= static_cast<double>(count);
}

}  // namespace lossguard
