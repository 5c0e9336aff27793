// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/synthetic.hpp"

#include <stdexcept>
#include <unordered_set>
#include <utility>

#include "qvmc/rng.hpp"

namespace qvmc {

namespace {
constexpr std::uint32_t kSyntheticStream = 0x53594e54;  // "SYNT"
}

HamiltonianIndex random_hamiltonian(int n_qubits, int n_terms, std::uint64_t seed,
                                    int max_weight) {
  if (n_terms < 1) throw std::invalid_argument("random_hamiltonian: n_terms >= 1");
  if (max_weight < 2 || max_weight > n_qubits)
    throw std::invalid_argument("random_hamiltonian: bad max_weight");
  SequentialRng rng(seed, kSyntheticStream);

  std::vector<std::pair<double, std::string>> terms;
  terms.emplace_back(rng.uniform_symmetric(1.0), std::string(static_cast<std::size_t>(n_qubits), 'I'));

  std::unordered_set<std::string> seen;
  const char letters[3] = {'X', 'Y', 'Z'};
  int guard = 0;
  while (static_cast<int>(terms.size()) < n_terms) {
    if (++guard > 1000 * n_terms)
      throw std::runtime_error("random_hamiltonian: cannot place distinct terms");
    std::string s(static_cast<std::size_t>(n_qubits), 'I');
    const int weight = 2 + static_cast<int>(rng.uniform_int(
                               static_cast<std::uint64_t>(max_weight - 1)));
    int placed = 0;
    while (placed < weight) {
      const auto site = static_cast<std::size_t>(rng.uniform_int(
          static_cast<std::uint64_t>(n_qubits)));
      if (s[site] != 'I') continue;
      s[site] = letters[rng.uniform_int(3)];
      ++placed;
    }
    if (!seen.insert(s).second) continue;
    terms.emplace_back(rng.uniform_symmetric(1.0), std::move(s));
  }
  return HamiltonianIndex::from_terms(n_qubits, terms);
}

std::vector<BasisVector> random_distinct_vectors(int n_qubits, int count,
                                                 std::uint64_t seed) {
  if (n_qubits < 63 &&
      static_cast<std::uint64_t>(count) > (std::uint64_t{1} << n_qubits))
    throw std::invalid_argument("random_distinct_vectors: count exceeds 2^N");
  SequentialRng rng(seed, kSyntheticStream + 1);
  std::unordered_set<BasisVector, BasisVectorHash> seen;
  std::vector<BasisVector> out;
  out.reserve(static_cast<std::size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    BasisVector v(n_qubits);
    std::uint64_t word = 0;
    for (int i = 0; i < n_qubits; ++i) {
      if (i % 64 == 0) word = rng.bits64();
      if ((word >> (i % 64)) & 1) v.set_bit(i, true);
    }
    if (seen.insert(v).second) out.push_back(v);
  }
  return out;
}

}  // namespace qvmc
