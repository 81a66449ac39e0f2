#pragma once

#include <cmath>
#include <cstdint>

namespace secmeas {

/// Counter-based generator: output i is the SplitMix64 finalizer applied to
/// key + (i+1) * golden-ratio increment. Streams derived from (seed, stream)
/// pairs are independent and reproducible across platforms.
class CounterRng {
 public:
  static constexpr const char* kAlgorithm = "splitmix64-counter-v1";

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream * 0x9E3779B97F4A7C15ull + 0x1ull))) {}

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ull;
    return mix(key_ + counter_);
  }

  /// uniform double in [0, 1)
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// standard normal via Box-Muller; consumes two uniforms per pair
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double mag = std::sqrt(-2.0 * std::log(u1));
    spare_ = mag * std::sin(6.283185307179586476925286766559 * u2);
    have_spare_ = true;
    return mag * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace secmeas
