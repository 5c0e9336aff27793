// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "qvmc/coupling.hpp"
#include "qvmc/hamiltonian.hpp"
#include "qvmc/sampler.hpp"

namespace qvmc {

/**
 * Subspace-restricted local energies: for each sampled x, the sum over
 * coupled sampled x' of H_{xx'} psi(x')/psi(x), with amplitude ratios
 * formed as exp(log-amp difference + i * phase difference). Requires the
 * batch amplitudes to be filled and pairs in canonical order.
 */
Eigen::VectorXcd local_energies(const CoupledPairs& pairs, const SampleBatch& batch,
                                const HamiltonianIndex& index, int threads = 1);

/// Weighted energy of the instantly sampled state and its ingredients.
struct EnergyReport {
  double e_var = 0.0;        // real part of the weighted local-energy mean
  double im_residual = 0.0;  // imaginary remainder, vanishes for Hermitian H
  Eigen::VectorXcd locals;
  Eigen::VectorXd weights;   // p(x)/N, sum to 1
  double norm = 0.0;         // N = sum p(x), in (0, 1]
  double log_norm = 0.0;
  double ipr = 0.0;          // sum of squared renormalised weights
};

/// E = sum_x E_loc(x) p(x)/N. Throws when the norm underflows to zero or
/// the imaginary residual is not small.
EnergyReport variational_energy(const SampleBatch& batch, const Eigen::VectorXcd& locals);

/**
 * Energy gradient in the centered-covariance form,
 *   g = 2 Re{ sum_x w_x (E_loc(x) - <E>) * row_x },
 * where row_x is the conjugate log-derivative (as from grad_log_psi) and
 * <E> the weighted local-energy mean. Exactly zero when all locals agree.
 */
class GradientAccumulator {
 public:
  GradientAccumulator(Eigen::Index n_params, std::complex<double> e_mean);
  void add(double weight, std::complex<double> e_loc, const Eigen::VectorXcd& row);
  [[nodiscard]] Eigen::VectorXd take();

 private:
  Eigen::VectorXd grad_;
  std::complex<double> e_mean_;
};

/// Convenience form over a full Jacobian (rows aligned with the batch).
Eigen::VectorXd energy_gradient(const Eigen::VectorXd& weights,
                                const Eigen::VectorXcd& locals,
                                const Eigen::MatrixXcd& jacobian);

}  // namespace qvmc
