// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "qvmc/basis_vector.hpp"
#include "qvmc/model.hpp"
#include "qvmc/rng.hpp"

namespace qvmc {

/// One partially sampled vector in the beam: exact prefix log-probability
/// and the conditioned perturbed log-probability (monotone along the tree).
struct BeamEntry {
  BasisVector prefix;
  double log_prob = 0.0;
  double perturbed = 0.0;
};

/**
 * Conditions a child's perturbed log-probability on its parent's value:
 *   L~ = -log(exp(-L~_parent) - exp(-Z) + exp(-L_child)),
 * where z is the maximum of the unconditioned child values. Evaluated with
 * the dominant exponent factored out; returns exactly parent_perturbed when
 * the child achieves the maximum, and never exceeds parent_perturbed.
 */
double condition_max(double parent_perturbed, double z, double child_perturbed);

/// The distinct sampled basis vectors, ranked by conditioned perturbed
/// log-probability. log_probs come from the sampler's own accumulation;
/// log_amps/phases and the norm are filled by fill_amplitudes().
struct SampleBatch {
  std::vector<BasisVector> vectors;
  Eigen::VectorXd log_probs;
  Eigen::VectorXd log_amps;
  Eigen::VectorXd phases;
  double norm = 0.0;      // N = sum of p(x) over the batch
  double log_norm = 0.0;

  [[nodiscard]] int size() const noexcept { return static_cast<int>(vectors.size()); }
};

/**
 * Exact autoregressive sampling without replacement via the ancestral
 * Gumbel top-K trick. Returns min(K, sector size) distinct vectors. At
 * each qudit level every beam entry expands to its allowed children,
 * children receive independent Gumbel perturbations conditioned through
 * condition_max, and the top K by conditioned value survive. Ties break
 * by (perturbed value, then prefix order) for determinism.
 *
 * Gumbel draws are addressed by (iteration, level, beam slot, child value)
 * on a counter-based stream, so results do not depend on thread count.
 */
SampleBatch sample_without_replacement(const AnqsModel& model, int k_samples,
                                       const CounterRng& rng, std::uint32_t iteration,
                                       int threads = 1);

/// Evaluates model amplitudes for every vector in the batch and fills
/// log_amps, phases and the norm.
void fill_amplitudes(SampleBatch& batch, const AnqsModel& model, int threads = 1);

}  // namespace qvmc
