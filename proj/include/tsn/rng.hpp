#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tsn {

/// Seedable generator with named substreams. A substream depends only on
/// the root seed and its key, so drawing from one never shifts another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent generator keyed by `key` (e.g. "B1/residence").
  Rng substream(std::string_view key) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform();

  /// Standard normal via Box-Muller (one variate per call, no caching).
  double normal();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace tsn
