// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qvmc {

/**
 * Philox4x32-10 counter-based generator. A block is a pure function of
 * (counter, key), so parallel draws are reproducible for a fixed seed
 * regardless of thread count or evaluation order.
 */
struct Philox4x32 {
  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> counter,
                                            std::array<std::uint32_t, 2> key) noexcept;
};

/// Gumbel noise via inverse transform sampling, -log(-log u).
inline double gumbel_from_uniform(double u) noexcept {
  return -std::log(-std::log(u));
}

/**
 * Keyed random stream addressed by a 4x32-bit counter. The caller chooses
 * counter coordinates (e.g. iteration, level, beam slot, child value) so
 * that every logical draw has a unique address.
 */
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint32_t stream = 0) noexcept
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32) ^ stream} {}

  [[nodiscard]] std::uint64_t bits64(std::uint32_t c0, std::uint32_t c1,
                                     std::uint32_t c2, std::uint32_t c3) const noexcept {
    const auto out = Philox4x32::block({c0, c1, c2, c3}, key_);
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
  }

  /// Uniform on (0,1), clamped to [1e-300, 1 - 1e-16] so the double log
  /// in the Gumbel transform never produces an infinity.
  [[nodiscard]] double uniform(std::uint32_t c0, std::uint32_t c1,
                               std::uint32_t c2, std::uint32_t c3) const noexcept {
    const double u = static_cast<double>(bits64(c0, c1, c2, c3) >> 11) * 0x1.0p-53;
    if (u < 1e-300) return 1e-300;
    if (u > 1.0 - 1e-16) return 1.0 - 1e-16;
    return u;
  }

  [[nodiscard]] double gumbel(std::uint32_t c0, std::uint32_t c1,
                              std::uint32_t c2, std::uint32_t c3) const noexcept {
    return gumbel_from_uniform(uniform(c0, c1, c2, c3));
  }

 private:
  std::array<std::uint32_t, 2> key_;
};

/// Sequential convenience view over a counter stream (init, fixtures, tests).
class SequentialRng {
 public:
  explicit SequentialRng(std::uint64_t seed, std::uint32_t stream = 0) noexcept
      : rng_(seed, stream) {}

  std::uint64_t bits64() noexcept { return rng_.bits64(next(), 0, 0, 0); }

  double uniform() noexcept {
    const double u = static_cast<double>(bits64() >> 11) * 0x1.0p-53;
    return u < 1e-300 ? 1e-300 : (u > 1.0 - 1e-16 ? 1.0 - 1e-16 : u);
  }

  /// Uniform on [-scale, scale].
  double uniform_symmetric(double scale) noexcept {
    return scale * (2.0 * uniform() - 1.0);
  }

  /// Uniform integer in [0, n).
  std::uint64_t uniform_int(std::uint64_t n) noexcept { return bits64() % n; }

  double gumbel() noexcept { return gumbel_from_uniform(uniform()); }

 private:
  std::uint32_t next() noexcept { return counter_++; }

  CounterRng rng_;
  std::uint32_t counter_ = 0;
};

}  // namespace qvmc
