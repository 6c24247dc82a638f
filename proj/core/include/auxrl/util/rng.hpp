#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace auxrl::util {

/// Derives an independent stream seed from a master seed and a stream name.
/// Seeding named streams separately keeps the action-selection, clustering,
/// task-sampling and generation draws independent of each other, so adding
/// draws to one stream never perturbs another.
std::uint64_t derive_stream_seed(std::uint64_t master, std::string_view stream_name);

/// Seeded random source with platform-stable draw functions.
///
/// std::mt19937_64 output is fixed by the standard, but the std distribution
/// objects are not; reproducible runs therefore sample through these helpers
/// only.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). n must be positive.
  std::size_t uniform_index(std::size_t n);

  /// Uniform double in [lo, hi).
  double uniform_real(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  /// Standard normal draw (Box-Muller; consumes two uniforms per pair).
  double next_gaussian();

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace auxrl::util
