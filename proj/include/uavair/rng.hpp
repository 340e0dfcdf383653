#pragma once

#include <cstdint>
#include <string_view>

namespace uavair {

/// Counter-based 64-bit generator.
///
/// Draw k (k = 1, 2, ...) of a stream with key K is
/// `splitmix64_mix(K + k * 0x9E3779B97F4A7C15)`, where `splitmix64_mix` is the
/// SplitMix64 output finalizer (shifts 30/27/31, multipliers
/// 0xBF58476D1CE4E5B9 and 0x94D049BB133111EB). Because every draw depends only
/// on (key, counter), streams are reproducible in any language.
///
/// Independent streams for different purposes come from one root seed:
/// `key = splitmix64_mix(root ^ fnv1a64(label))`.
class Rng {
 public:
  explicit Rng(std::uint64_t key = 0, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  static Rng derive(std::uint64_t root_seed, std::string_view label);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal via Box-Muller; consumes exactly two draws.
  double normal();
  /// Uniform index in [0, n), n > 0 (multiply-high reduction).
  std::uint64_t index(std::uint64_t n);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

std::uint64_t splitmix64_mix(std::uint64_t z);
std::uint64_t fnv1a64(std::string_view s);

}  // namespace uavair
