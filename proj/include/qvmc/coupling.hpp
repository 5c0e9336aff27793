// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qvmc/basis_vector.hpp"
#include "qvmc/hamiltonian.hpp"
#include "qvmc/prefix_tree.hpp"

namespace qvmc {

enum class CouplingBackend { kTerms, kBatch, kTrie, kAuto };

CouplingBackend parse_backend(const std::string& name);
std::string backend_name(CouplingBackend b);

/**
 * All ordered pairs (x, x') in the batch coupled by the Hamiltonian,
 * in canonical order (by x index, then x' index). `xy` is the position of
 * x^x' in the Hamiltonian's unique flip-mask set. `ops` counts the inner
 * operations the backend performed (candidate generations, pair lookups or
 * trie child visits), used by the complexity instrumentation.
 */
struct CoupledPairs {
  struct Entry {
    std::uint32_t x;
    std::uint32_t x_prime;
    std::uint32_t xy;
  };
  std::vector<Entry> entries;
  std::uint64_t ops = 0;
  CouplingBackend backend = CouplingBackend::kTerms;
};

/// For each x, tries every unique flip mask and keeps candidates that land
/// in the batch (hash membership). Work scales with N_unq * |xy_set|.
CoupledPairs loop_over_terms(std::span<const BasisVector> batch,
                             const HamiltonianIndex& index, int threads = 1);

/// Tests every ordered pair (x, x') against the flip-mask lookup.
/// Work scales with N_unq^2, independent of the term count.
CoupledPairs loop_over_batch(std::span<const BasisVector> batch,
                             const HamiltonianIndex& index, int threads = 1);

/// Co-traverses prefix trees over the batch and the flip-mask set,
/// extending a path only while both the candidate x' prefix and the
/// implied xy prefix exist. Visits at most O(N * N_unq) nodes per source.
CoupledPairs loop_over_trie(std::span<const BasisVector> batch,
                            const HamiltonianIndex& index, int threads = 1);

struct CouplingOptions {
  CouplingBackend backend = CouplingBackend::kAuto;
  int auto_batch_threshold = 4096;  // batch loop below, trie above
  int threads = 1;
};

CoupledPairs find_coupled_pairs(std::span<const BasisVector> batch,
                                const HamiltonianIndex& index,
                                const CouplingOptions& options = {});

}  // namespace qvmc
