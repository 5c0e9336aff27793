// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qvmc/basis_vector.hpp"
#include "qvmc/hamiltonian.hpp"
#include "qvmc/model.hpp"
#include "qvmc/rng.hpp"

namespace qvmc {
namespace oracle {

/// All basis states of a particle sector (or the full space when n_e is
/// absent), enumerated in the BasisVector total order. Single-threaded
/// brute-force ground truth for desk-scale verification.
struct SectorBasis {
  int n_qubits = 0;
  std::optional<int> n_electrons;
  std::optional<int> n_spin_up;  // count on even-indexed qubits
  std::vector<BasisVector> states;

  static SectorBasis enumerate(int n_qubits, std::optional<int> n_electrons,
                               std::optional<int> n_spin_up = std::nullopt);
};

/// Lowest eigenvalue of H restricted to the sector, built entry-wise via
/// matrix_element and diagonalised densely. Requires sector size <= 4096.
double exact_ground_energy(const HamiltonianIndex& index, const SectorBasis& sector);

/// The unrestricted local energy, summing over every flip mask with
/// on-demand amplitude evaluation. Reference for the sampled surrogate.
std::complex<double> full_local_energy(const BasisVector& x, const AnqsModel& model,
                                       const HamiltonianIndex& index);

/// Draws K distinct states one-by-one, removing the mass of already drawn
/// states and renormalising before each draw. Distributional reference for
/// the Gumbel sampler.
std::vector<std::size_t> sequential_swor(std::span<const double> probabilities, int k,
                                         SequentialRng& rng);
std::vector<BasisVector> sequential_swor(const AnqsModel& model, int k, SequentialRng& rng);

/// Inverse participation ratio sum p^2 of a normalized distribution.
double ipr(std::span<const double> probabilities);

/// Central difference (f(theta+h e_i) - f(theta-h e_i)) / 2h.
double finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& theta, Eigen::Index coordinate,
                         double step);

}  // namespace oracle
}  // namespace qvmc
