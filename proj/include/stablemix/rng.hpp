#pragma once

#include <cstdint>
#include <random>

namespace stablemix {

/// Seed-explicit random stream. Uniforms are built from the top 53 bits of a
/// 64-bit Mersenne twister so draws are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard exponential.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

/// Seed of the `stream`-th independent substream derived from `seed`
/// (splitmix64 finalizer over the pair).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace stablemix
