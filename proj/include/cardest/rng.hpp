#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace cardest {

/// Deterministic RNG wrapper. mt19937_64 output is fully specified by the
/// standard, so seeded streams are bit-identical across platforms; we avoid
/// std::uniform_*_distribution because their mapping is not.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n), n > 0, by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % n;
  }

  /// Draw an index from unnormalized non-negative weights.
  std::size_t next_weighted(const std::vector<double>& weights, double total) {
    double u = next_double() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace cardest
