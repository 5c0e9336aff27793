// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qvmc {

/**
 * N-qubit computational basis state, bit-packed into 64-bit words.
 *
 * Qubit i is stored at word i/64, bit position i%64. The string form is
 * x0 x1 ... x_{N-1} with qubit i as the i-th character; decimal display
 * treats x0 as the most significant bit, so "1100" prints as 12.
 * Bits at positions >= n_bits() are always zero (canonical form), which
 * makes whole-word XOR/AND/popcount valid without trailing-bit fixups.
 *
 * Equality, ordering and hashing are over the word sequence only.
 */
class BasisVector {
 public:
  static constexpr int kMaxBits = 256;
  static constexpr int kWordBits = 64;
  static constexpr int kMaxWords = kMaxBits / kWordBits;

  BasisVector() = default;

  explicit BasisVector(int n_bits) : n_bits_(check_width(n_bits)) {}

  /// Parses a string of '0'/'1' characters (qubit i = character i).
  static BasisVector parse(std::string_view s);

  /// Inverse of parse().
  [[nodiscard]] std::string str() const;

  [[nodiscard]] int n_bits() const noexcept { return n_bits_; }
  [[nodiscard]] int n_words() const noexcept {
    return (n_bits_ + kWordBits - 1) / kWordBits;
  }

  [[nodiscard]] bool bit(int i) const noexcept {
    return (words_[static_cast<std::size_t>(i) / kWordBits] >>
            (static_cast<unsigned>(i) % kWordBits)) & 1u;
  }

  void set_bit(int i, bool value) {
    if (i < 0 || i >= n_bits_) throw std::out_of_range("BasisVector::set_bit");
    const std::uint64_t mask = std::uint64_t{1} << (static_cast<unsigned>(i) % kWordBits);
    auto& w = words_[static_cast<std::size_t>(i) / kWordBits];
    w = value ? (w | mask) : (w & ~mask);
  }

  [[nodiscard]] int popcount() const noexcept {
    int c = 0;
    for (auto w : words_) c += std::popcount(w);
    return c;
  }

  /// Number of set bits at positions < pos.
  [[nodiscard]] int popcount_below(int pos) const noexcept {
    int c = 0;
    const int full = pos / kWordBits;
    for (int w = 0; w < full; ++w) c += std::popcount(words_[static_cast<std::size_t>(w)]);
    const int rem = pos % kWordBits;
    if (rem > 0 && full < kMaxWords) {
      c += std::popcount(words_[static_cast<std::size_t>(full)] &
                         ((std::uint64_t{1} << rem) - 1));
    }
    return c;
  }

  /// Decimal value of the string form (x0 is the most significant bit).
  [[nodiscard]] std::uint64_t dec_value() const;

  friend BasisVector operator^(const BasisVector& a, const BasisVector& b) {
    check_match(a, b);
    BasisVector r(a.n_bits_);
    for (int w = 0; w < kMaxWords; ++w) r.words_[w] = a.words_[w] ^ b.words_[w];
    return r;
  }

  friend BasisVector operator|(const BasisVector& a, const BasisVector& b) {
    check_match(a, b);
    BasisVector r(a.n_bits_);
    for (int w = 0; w < kMaxWords; ++w) r.words_[w] = a.words_[w] | b.words_[w];
    return r;
  }

  /// Hamming weight of the bitwise AND, |a & b|.
  friend int and_popcount(const BasisVector& a, const BasisVector& b) {
    check_match(a, b);
    int c = 0;
    for (int w = 0; w < kMaxWords; ++w) c += std::popcount(a.words_[w] & b.words_[w]);
    return c;
  }

  friend bool operator==(const BasisVector& a, const BasisVector& b) noexcept {
    return a.words_ == b.words_;
  }

  // Total order: lexicographic over the word sequence.
  friend bool operator<(const BasisVector& a, const BasisVector& b) noexcept {
    return a.words_ < b.words_;
  }

  [[nodiscard]] std::size_t hash() const noexcept {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (auto w : words_) {
      h ^= w + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h *= 0xff51afd7ed558ccdull;
      h ^= h >> 33;
    }
    return static_cast<std::size_t>(h);
  }

 private:
  static int check_width(int n_bits) {
    if (n_bits < 1 || n_bits > kMaxBits)
      throw std::invalid_argument("BasisVector: qubit count must be in [1, 256]");
    return n_bits;
  }

  static void check_match(const BasisVector& a, const BasisVector& b) {
    if (a.n_bits_ != b.n_bits_)
      throw std::invalid_argument("BasisVector: length mismatch");
  }

  std::array<std::uint64_t, kMaxWords> words_{};
  std::uint16_t n_bits_ = 0;
};

struct BasisVectorHash {
  std::size_t operator()(const BasisVector& v) const noexcept { return v.hash(); }
};

/// Value of bits [offset, offset+count), read MSB-first: the qubit at
/// `offset` lands in bit count-1 of the result.
[[nodiscard]] std::uint32_t extract_bits(const BasisVector& v, int offset, int count);

/// Inverse of extract_bits.
void deposit_bits(BasisVector& v, int offset, int count, std::uint32_t value);

}  // namespace qvmc
