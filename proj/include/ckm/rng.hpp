#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ckm {

/// SplitMix64 finalizer; used to decorrelate seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seeded random stream. Engine is std::mt19937_64 (fully specified by the
/// standard); the distributions below are implemented here so that a given
/// seed produces the same values under every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  /// Independent stream for a labelled role, e.g. substream(seed, "phase2.Vb", j).
  static Rng substream(std::uint64_t seed, std::string_view label, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

  /// Standard normal (Box-Muller, one spare cached).
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ckm
