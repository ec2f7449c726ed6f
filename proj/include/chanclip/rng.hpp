// Copyright 2026 The chanclip Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chanclip {

/// Stateless 64-bit finaliser (splitmix64).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a string.
constexpr std::uint64_t hash_string(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Combine a seed with further keys into a derived seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t key) noexcept {
  return mix64(mix64(seed) ^ key);
}

/**
 * Seeded generator with platform-independent draws.
 *
 * Standard distributions are implementation-defined, so integer and real
 * draws are done here directly on top of the (fully specified) mt19937_64
 * output stream. Same seed gives the same sequence on every toolchain.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Generator for one clip; depends only on (global seed, clip id).
  static Rng for_clip(std::uint64_t seed, std::string_view clip_id) {
    return Rng(derive_seed(seed, hash_string(clip_id)));
  }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [lo, hi] (inclusive). Requires lo <= hi.
  std::uint64_t uniform(std::uint64_t lo, std::uint64_t hi) {
    const std::uint64_t span = hi - lo;
    if (span == ~0ull) return next_u64();
    const std::uint64_t range = span + 1;
    // Lemire's nearly-divisionless rejection.
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
      const std::uint64_t threshold = (0 - range) % range;
      while (low < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * range;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return lo + static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Fisher-Yates shuffle.
  template <typename Range>
  void shuffle(Range& r) {
    const auto n = static_cast<std::uint64_t>(std::size(r));
    for (std::uint64_t i = n; i > 1; --i) {
      const auto j = uniform(0, i - 1);
      using std::swap;
      swap(r[i - 1], r[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace chanclip
