#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace qesn {

/// SplitMix64 finalizer; used to derive well-separated stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Purpose tags keep the streams used for different things independent.
enum class StreamTag : std::uint64_t {
  ReservoirWeights = 1,
  ResidualNoise = 2,
  LorenzInitial = 3,
  LorenzNoise = 4,
  Synthetic = 5,
};

/// Seed for one (base seed, purpose, index) triple. The result depends only on
/// its arguments, so member k draws the same numbers whatever the ensemble size.
constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag, std::uint64_t index) {
  return mix64(seed ^ mix64(static_cast<std::uint64_t>(tag) ^ mix64(index)));
}

/// mt19937_64 with portable uniform/normal transforms. The std:: distributions
/// are implementation-defined, which would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, StreamTag tag, std::uint64_t index) : engine_(derive_seed(seed, tag, index)) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

  /// Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace qesn
