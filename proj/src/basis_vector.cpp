// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/basis_vector.hpp"

namespace qvmc {

BasisVector BasisVector::parse(std::string_view s) {
  if (s.empty()) throw std::invalid_argument("BasisVector::parse: empty string");
  BasisVector v(static_cast<int>(s.size()));
  for (int i = 0; i < v.n_bits_; ++i) {
    const char c = s[static_cast<std::size_t>(i)];
    if (c == '1') {
      v.words_[static_cast<std::size_t>(i) / kWordBits] |=
          std::uint64_t{1} << (static_cast<unsigned>(i) % kWordBits);
    } else if (c != '0') {
      throw std::invalid_argument("BasisVector::parse: illegal character '" +
                                  std::string(1, c) + "'");
    }
  }
  return v;
}

std::string BasisVector::str() const {
  std::string s(static_cast<std::size_t>(n_bits_), '0');
  for (int i = 0; i < n_bits_; ++i)
    if (bit(i)) s[static_cast<std::size_t>(i)] = '1';
  return s;
}

std::uint64_t BasisVector::dec_value() const {
  if (n_bits_ > kWordBits)
    throw std::invalid_argument("BasisVector::dec_value: more than 64 qubits");
  std::uint64_t d = 0;
  for (int i = 0; i < n_bits_; ++i)
    if (bit(i)) d |= std::uint64_t{1} << (n_bits_ - 1 - i);
  return d;
}

std::uint32_t extract_bits(const BasisVector& v, int offset, int count) {
  std::uint32_t value = 0;
  for (int t = 0; t < count; ++t)
    if (v.bit(offset + t)) value |= 1u << (count - 1 - t);
  return value;
}

void deposit_bits(BasisVector& v, int offset, int count, std::uint32_t value) {
  for (int t = 0; t < count; ++t)
    v.set_bit(offset + t, (value >> (count - 1 - t)) & 1u);
}

}  // namespace qvmc
