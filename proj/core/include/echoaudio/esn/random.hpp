#pragma once

#include <cstdint>
#include <random>

namespace echoaudio::esn {

/// Portable seeded generator: std::mt19937_64 (fixed by the standard) with
/// our own 53-bit mantissa conversion, since std::uniform_real_distribution
/// is implementation-defined. Same seed -> same draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  bool bernoulli(double p) { return uniform01() < p; }
  std::uint64_t next_u64() { return engine_(); }
  /// Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 finalizer over (seed, stream); used to derive independent
/// sub-seeds for retries, folds and per-channel reservoirs.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace echoaudio::esn
