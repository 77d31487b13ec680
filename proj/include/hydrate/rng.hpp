#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace hydrate {

/// Counter-based 64-bit generator. Output i of stream (seed, stream) is
/// mix(key + (i + 1) * kGamma) where mix is the SplitMix64 finalizer and
/// key = mix(seed ^ mix(stream * kGamma + kGamma)). Each output depends only
/// on (seed, stream, i), so corpora are reproducible on any platform that
/// implements the same integer arithmetic.
class CounterRng {
 public:
  static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix(seed ^ mix(stream * kGamma + kGamma))) {}

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t next() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGamma);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, bound). Rejection sampling keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  /// Standard normal deviate (Box-Muller, one output per two uniforms).
  double normal() noexcept {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Fisher-Yates shuffle driven by CounterRng.
template <class Vec>
void shuffle(Vec& items, CounterRng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace hydrate
