// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Core>

#include "qvmc/sampler.hpp"

namespace qvmc {

/// Indices of the n_sr highest-probability batch entries, ties broken by
/// sample order.
std::vector<int> top_probability_indices(const SampleBatch& batch, int n_sr);

/**
 * Sample-space context for the stochastic-reconfiguration solve. Built
 * from the top-n_sr samples by probability with weights re-renormalised
 * over that subset. `stacked` holds the centered, sqrt(weight)-scaled
 * conjugate log-derivative rows split into real and imaginary blocks
 * (rows x, then rows n_sr + x), so stacked^T stacked equals the real part
 * of the sampled quantum geometric tensor. `f_stacked` is the matching
 * split of sqrt(w) * conj(E_loc - <E>).
 */
struct SrContext {
  Eigen::MatrixXd stacked;    // 2*n_sr x N_p
  Eigen::VectorXd f_stacked;  // 2*n_sr
  double lambda = 0.0;
  int n_sr = 0;
  std::vector<int> sample_indices;
};

/**
 * Builds the context from raw Jacobian rows (grad_log_psi rows for the
 * selected samples, aligned with `selected`). A non-positive lambda picks
 * the scale-aware default 1e-4 * (1 + ||stacked||_F^2 / n_sr).
 */
SrContext build_sr_context(const SampleBatch& batch, const Eigen::VectorXcd& locals,
                           const std::vector<int>& selected,
                           const Eigen::MatrixXcd& jac_rows, double lambda = 0.0);

/**
 * Applies the regularised inverse of the sampled geometric tensor:
 * solves (Re S + lambda I) delta = grad without materialising the
 * N_p x N_p tensor, via the push-through identity
 *   (A^T A + l I)^{-1} g = (g - A^T (A A^T + l I)^{-1} A g) / l.
 * Throws when the small system is ill-conditioned beyond 1e14, with a
 * condition estimate in the message.
 */
Eigen::VectorXd sr_direction(const SrContext& ctx, const Eigen::VectorXd& grad);

}  // namespace qvmc
