#pragma once

#include <cmath>
#include <cstdint>

namespace gmc {

/// Counter-based 64-bit generator (splitmix64 finalizer over a keyed
/// counter). Output k of stream s under seed q depends only on (q, s, k),
/// so draws are reproducible and streams can be split without coupling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x9E3779B97F4A7C15ull))) {}

  std::uint64_t next_u64() {
    return mix(key_ + (++counter_) * 0x9E3779B97F4A7C15ull);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound). Multiply-shift map; the bias is
  /// below bound/2^64 which is negligible at the index ranges used here.
  std::uint64_t uniform_index(std::uint64_t bound) {
    const unsigned __int128 wide =
        static_cast<unsigned __int128>(next_u64()) * bound;
    return static_cast<std::uint64_t>(wide >> 64);
  }

  /// Standard normal via Box-Muller; caches the second variate.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Independent derived stream; used to hand one seed to parallel trials.
  CounterRng substream(std::uint64_t id) const {
    CounterRng derived(0);
    derived.key_ = mix(key_ ^ mix(id + 0xD1B54A32D192ED03ull));
    return derived;
  }

  std::uint64_t derive_seed(std::uint64_t id) const {
    return mix(key_ ^ mix(id + 0xD1B54A32D192ED03ull));
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

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace gmc
