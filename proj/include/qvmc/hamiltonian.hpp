// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qvmc/basis_vector.hpp"

namespace qvmc {

/**
 * One Pauli string h * P_0 P_1 ... P_{N-1} encoded as bit masks.
 *
 * x/y/z masks mark qubits carrying that letter (pairwise disjoint);
 * xy = x|y marks the bit flips the term applies, yz = y|z the positions
 * that contribute phase. A term couples x only to x ^ xy_mask, and the
 * matrix element is h * i^q with q = |y| + 2*|x' & yz| (mod 4).
 */
struct EncodedTerm {
  double coeff = 0.0;
  BasisVector x_mask, y_mask, z_mask;
  BasisVector xy_mask, yz_mask;
  int y_weight = 0;
};

/// Builds an EncodedTerm from a coefficient and a string over {I,X,Y,Z}.
EncodedTerm encode_term(double coeff, std::string_view paulis);

/**
 * A Pauli-string Hamiltonian with real coefficients, reorganised by unique
 * flip mask: terms sharing an xy mask sit contiguously so a matrix element
 * is one hash lookup plus a short scan. Immutable after construction.
 */
class HamiltonianIndex {
 public:
  /// Builds from (coefficient, pauli string) pairs. Duplicate strings are
  /// merged by summing; merged terms below 1e-12 in magnitude are dropped.
  static HamiltonianIndex from_terms(
      int n_qubits, std::span<const std::pair<double, std::string>> terms);

  /// Parses the text format: `qubits: <N>` header, then one `<coeff>
  /// <pauli_string>` per line; '#' starts a comment. Errors carry line
  /// numbers.
  static HamiltonianIndex parse(std::istream& in);
  static HamiltonianIndex load(const std::string& path);

  [[nodiscard]] int n_qubits() const noexcept { return n_qubits_; }
  [[nodiscard]] std::size_t n_terms() const noexcept { return terms_.size(); }
  [[nodiscard]] const std::vector<EncodedTerm>& terms() const noexcept { return terms_; }
  [[nodiscard]] const std::vector<BasisVector>& xy_set() const noexcept { return xy_set_; }

  [[nodiscard]] std::span<const EncodedTerm> group(std::size_t xy_index) const {
    return {terms_.data() + group_offsets_[xy_index],
            group_offsets_[xy_index + 1] - group_offsets_[xy_index]};
  }

  [[nodiscard]] std::optional<std::uint32_t> find_xy(const BasisVector& xy) const {
    auto it = xy_lookup_.find(xy);
    if (it == xy_lookup_.end()) return std::nullopt;
    return it->second;
  }

  /// Index of the zero flip mask in the xy set, if the Hamiltonian has
  /// diagonal terms.
  [[nodiscard]] std::optional<std::uint32_t> diagonal_xy_index() const {
    return diagonal_xy_;
  }

  /// The state coupled to x by any term with the given flip mask.
  [[nodiscard]] static BasisVector apply_xy(const BasisVector& x, const BasisVector& xy) {
    return x ^ xy;
  }

  /// <x|H|x'>; zero when x^x' is not an xy mask of any term. Phases are
  /// exact multiples of pi/2, evaluated by table without trigonometry.
  [[nodiscard]] std::complex<double> matrix_element(const BasisVector& x,
                                                    const BasisVector& x_prime) const;

  /// <x|H|x'> when x^x' is already known to be xy_set()[xy_index].
  [[nodiscard]] std::complex<double> group_element(const BasisVector& x_prime,
                                                   std::uint32_t xy_index) const;

  /// Dense 2^N x 2^N matrix built by Kronecker products of 2x2 Pauli
  /// matrices -- an independent construction used as a verification oracle.
  /// Requires N <= 16 (and enough memory: the matrix has 4^N entries).
  [[nodiscard]] Eigen::MatrixXcd dense_matrix() const;

 private:
  int n_qubits_ = 0;
  std::vector<EncodedTerm> terms_;                 // contiguous by xy group
  std::vector<BasisVector> xy_set_;                // first-occurrence order
  std::vector<std::size_t> group_offsets_;         // size |xy_set|+1
  std::unordered_map<BasisVector, std::uint32_t, BasisVectorHash> xy_lookup_;
  std::optional<std::uint32_t> diagonal_xy_;
};

}  // namespace qvmc
