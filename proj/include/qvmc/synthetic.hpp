// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "qvmc/basis_vector.hpp"
#include "qvmc/hamiltonian.hpp"

namespace qvmc {

/**
 * Random Pauli-string Hamiltonian for benchmarks: n_terms distinct strings
 * with 2..max_weight non-identity letters on random sites (mimicking the
 * bounded-body structure of molecular terms), coefficients uniform on
 * [-1, 1], plus an identity term so diagonal couplings exist.
 */
HamiltonianIndex random_hamiltonian(int n_qubits, int n_terms, std::uint64_t seed,
                                    int max_weight = 4);

/// Distinct uniformly random basis vectors (count must not exceed 2^N).
std::vector<BasisVector> random_distinct_vectors(int n_qubits, int count,
                                                 std::uint64_t seed);

}  // namespace qvmc
