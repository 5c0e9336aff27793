// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/coupling.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <unordered_map>

#include "qvmc/parallel.hpp"

namespace qvmc {

CouplingBackend parse_backend(const std::string& name) {
  if (name == "terms") return CouplingBackend::kTerms;
  if (name == "batch") return CouplingBackend::kBatch;
  if (name == "trie") return CouplingBackend::kTrie;
  if (name == "auto") return CouplingBackend::kAuto;
  throw std::invalid_argument("unknown coupling backend: " + name);
}

std::string backend_name(CouplingBackend b) {
  switch (b) {
    case CouplingBackend::kTerms: return "terms";
    case CouplingBackend::kBatch: return "batch";
    case CouplingBackend::kTrie: return "trie";
    case CouplingBackend::kAuto: return "auto";
  }
  return "?";
}

namespace {

// per-source emission with a final flatten keeps the parallel outer loop
// deterministic in output order
struct PerSource {
  std::vector<std::vector<CoupledPairs::Entry>> rows;
  std::vector<std::uint64_t> ops;

  explicit PerSource(std::size_t n) : rows(n), ops(n, 0) {}

  CoupledPairs flatten(CouplingBackend backend) && {
    CoupledPairs out;
    out.backend = backend;
    std::size_t total = 0;
    for (const auto& r : rows) total += r.size();
    out.entries.reserve(total);
    for (auto& r : rows) {
      std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) {
        return a.x_prime < b.x_prime;
      });
      out.entries.insert(out.entries.end(), r.begin(), r.end());
    }
    for (auto c : ops) out.ops += c;
    return out;
  }
};

}  // namespace

CoupledPairs loop_over_terms(std::span<const BasisVector> batch,
                             const HamiltonianIndex& index, int threads) {
  std::unordered_map<BasisVector, std::uint32_t, BasisVectorHash> members;
  members.reserve(batch.size() * 2);
  for (std::size_t i = 0; i < batch.size(); ++i)
    members.emplace(batch[i], static_cast<std::uint32_t>(i));

  const auto& xy_set = index.xy_set();
  PerSource acc(batch.size());
  parallel_for(static_cast<int>(batch.size()), threads, [&](int i) {
    const auto iu = static_cast<std::size_t>(i);
    std::uint64_t ops = 0;
    for (std::uint32_t g = 0; g < xy_set.size(); ++g) {
      ++ops;
      const BasisVector candidate = batch[iu] ^ xy_set[g];
      auto it = members.find(candidate);
      if (it != members.end())
        acc.rows[iu].push_back({static_cast<std::uint32_t>(i), it->second, g});
    }
    acc.ops[iu] = ops;
  });
  return std::move(acc).flatten(CouplingBackend::kTerms);
}

CoupledPairs loop_over_batch(std::span<const BasisVector> batch,
                             const HamiltonianIndex& index, int threads) {
  PerSource acc(batch.size());
  parallel_for(static_cast<int>(batch.size()), threads, [&](int i) {
    const auto iu = static_cast<std::size_t>(i);
    std::uint64_t ops = 0;
    for (std::size_t j = 0; j < batch.size(); ++j) {
      ++ops;
      const auto g = index.find_xy(batch[iu] ^ batch[j]);
      if (g)
        acc.rows[iu].push_back(
            {static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), *g});
    }
    acc.ops[iu] = ops;
  });
  return std::move(acc).flatten(CouplingBackend::kBatch);
}

CoupledPairs loop_over_trie(std::span<const BasisVector> batch,
                            const HamiltonianIndex& index, int threads) {
  if (batch.empty() || index.xy_set().empty()) {
    CoupledPairs out;
    out.backend = CouplingBackend::kTrie;
    return out;
  }
  const PrefixTree u_tree = PrefixTree::build(batch);
  const PrefixTree xy_tree = PrefixTree::build(index.xy_set());
  const int n = u_tree.n_bits();

  PerSource acc(batch.size());
  parallel_for(static_cast<int>(batch.size()), threads, [&](int i) {
    const auto iu = static_cast<std::size_t>(i);
    const BasisVector& x = batch[iu];
    std::uint64_t ops = 0;

    // frontier of (batch node, flip-mask node) pairs, one per surviving path
    std::vector<std::pair<std::int32_t, std::int32_t>> frontier{{0, 0}}, next;
    for (int level = 0; level < n; ++level) {
      next.clear();
      const auto u_nodes = u_tree.level(level);
      const auto xy_nodes = xy_tree.level(level);
      const int xi = x.bit(level) ? 1 : 0;
      for (const auto& [un, xn] : frontier) {
        for (int b = 0; b < 2; ++b) {
          ++ops;
          const std::int32_t u_child = u_nodes[static_cast<std::size_t>(un)].child[b];
          if (u_child == PrefixTree::kNone) continue;
          const std::int32_t xy_child =
              xy_nodes[static_cast<std::size_t>(xn)].child[xi ^ b];
          if (xy_child == PrefixTree::kNone) continue;
          next.emplace_back(u_child, xy_child);
        }
      }
      frontier.swap(next);
      if (frontier.empty()) break;
    }

    for (const auto& [un, xn] : frontier) {
      acc.rows[iu].push_back({static_cast<std::uint32_t>(i),
                              static_cast<std::uint32_t>(u_tree.leaf_payload(un)),
                              static_cast<std::uint32_t>(xy_tree.leaf_payload(xn))});
    }
    acc.ops[iu] = ops;
  });
  return std::move(acc).flatten(CouplingBackend::kTrie);
}

CoupledPairs find_coupled_pairs(std::span<const BasisVector> batch,
                                const HamiltonianIndex& index,
                                const CouplingOptions& options) {
  CouplingBackend backend = options.backend;
  if (backend == CouplingBackend::kAuto) {
    backend = static_cast<int>(batch.size()) < options.auto_batch_threshold
                  ? CouplingBackend::kBatch
                  : CouplingBackend::kTrie;
  }
  switch (backend) {
    case CouplingBackend::kTerms: return loop_over_terms(batch, index, options.threads);
    case CouplingBackend::kBatch: return loop_over_batch(batch, index, options.threads);
    case CouplingBackend::kTrie: return loop_over_trie(batch, index, options.threads);
    case CouplingBackend::kAuto: break;
  }
  throw std::logic_error("find_coupled_pairs: unreachable");
}

}  // namespace qvmc
