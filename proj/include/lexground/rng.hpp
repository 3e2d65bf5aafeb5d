#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lexground {

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a(std::string_view text, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Derives an independent seed for a named substream of a root seed.
/// Every random component draws from `substream_seed(root, "<name>", index)`
/// so it can be reproduced in isolation.
std::uint64_t substream_seed(std::uint64_t root, std::string_view stream,
                             std::uint64_t index = 0);

/// Seeded generator with platform-independent uniform/integer draws.
/// Gaussian draws use Box-Muller on top of mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n);

  double gaussian();

  template <typename It>
  void shuffle(It first, It last) {
    const auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = below(i);
      std::swap(first[i - 1], first[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace lexground
