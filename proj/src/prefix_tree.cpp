// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/prefix_tree.hpp"

#include <stdexcept>

namespace qvmc {

PrefixTree PrefixTree::build(std::span<const BasisVector> vectors) {
  if (vectors.empty()) throw std::invalid_argument("PrefixTree: empty input");
  PrefixTree tree;
  tree.n_bits_ = vectors.front().n_bits();
  tree.levels_.assign(static_cast<std::size_t>(tree.n_bits_) + 1, {});
  tree.levels_[0].push_back(Node{});  // root

  for (std::size_t idx = 0; idx < vectors.size(); ++idx) {
    const BasisVector& x = vectors[idx];
    if (x.n_bits() != tree.n_bits_)
      throw std::invalid_argument("PrefixTree: mixed vector lengths");
    std::int32_t node = 0;
    bool created = false;
    for (int i = 0; i < tree.n_bits_; ++i) {
      const int bit = x.bit(i) ? 1 : 0;
      auto& cur = tree.levels_[static_cast<std::size_t>(i)][static_cast<std::size_t>(node)];
      if (cur.child[bit] == kNone) {
        auto& next_level = tree.levels_[static_cast<std::size_t>(i) + 1];
        Node fresh;
        fresh.parent = node;
        fresh.value = static_cast<std::uint8_t>(bit);
        cur.child[bit] = static_cast<std::int32_t>(next_level.size());
        next_level.push_back(fresh);
        created = true;
      }
      node = cur.child[bit];
    }
    if (!created) throw std::invalid_argument("PrefixTree: duplicate vector");
    tree.leaf_index_.resize(tree.levels_.back().size(), kNone);
    tree.leaf_index_[static_cast<std::size_t>(node)] = static_cast<std::int32_t>(idx);
  }
  return tree;
}

BasisVector PrefixTree::reconstruct(int level, std::int32_t node) const {
  BasisVector v(n_bits_);
  for (int i = level; i > 0; --i) {
    const Node& n = levels_[static_cast<std::size_t>(i)][static_cast<std::size_t>(node)];
    v.set_bit(i - 1, n.value != 0);
    node = n.parent;
  }
  return v;
}

}  // namespace qvmc
