// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qvmc/basis_vector.hpp"

namespace qvmc {

/**
 * Level-indexed trie over a set of distinct equal-length bit vectors.
 * Level 0 holds the single root; a node at level i+1 extends a level-i
 * prefix by one bit. Nodes live in flat per-level arrays with integer
 * parent/child references for cache locality. Each final-level node is a
 * leaf tagged with the index of the inserted vector.
 */
class PrefixTree {
 public:
  static constexpr std::int32_t kNone = -1;

  struct Node {
    std::int32_t parent = kNone;
    std::int32_t child[2] = {kNone, kNone};
    std::uint8_t value = 0;
  };

  /// Builds from distinct vectors; throws on empty input or duplicates.
  static PrefixTree build(std::span<const BasisVector> vectors);

  [[nodiscard]] int n_bits() const noexcept { return n_bits_; }
  [[nodiscard]] std::span<const Node> level(int i) const {
    return levels_[static_cast<std::size_t>(i)];
  }
  [[nodiscard]] std::size_t level_size(int i) const {
    return levels_[static_cast<std::size_t>(i)].size();
  }

  /// Input index of the vector ending at the given final-level node.
  [[nodiscard]] std::int32_t leaf_payload(std::int32_t node) const {
    return leaf_index_[static_cast<std::size_t>(node)];
  }

  /// Root-to-node walk reconstructing the stored prefix (testing aid).
  [[nodiscard]] BasisVector reconstruct(int level, std::int32_t node) const;

 private:
  int n_bits_ = 0;
  std::vector<std::vector<Node>> levels_;  // size n_bits_ + 1
  std::vector<std::int32_t> leaf_index_;   // aligned with the last level
};

}  // namespace qvmc
