// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/sr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace qvmc {

std::vector<int> top_probability_indices(const SampleBatch& batch, int n_sr) {
  std::vector<int> order(static_cast<std::size_t>(batch.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return batch.log_probs[a] > batch.log_probs[b];
  });
  order.resize(static_cast<std::size_t>(std::min(n_sr, batch.size())));
  return order;
}

SrContext build_sr_context(const SampleBatch& batch, const Eigen::VectorXcd& locals,
                           const std::vector<int>& selected,
                           const Eigen::MatrixXcd& jac_rows, double lambda) {
  const int n = static_cast<int>(selected.size());
  if (n < 1) throw std::invalid_argument("build_sr_context: empty selection");
  if (jac_rows.rows() != n)
    throw std::invalid_argument("build_sr_context: jacobian rows/selection mismatch");

  // weights re-renormalised over the subset
  double mx = batch.log_probs[selected[0]];
  for (int i : selected) mx = std::max(mx, batch.log_probs[i]);
  Eigen::VectorXd w(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    w[i] = std::exp(batch.log_probs[selected[static_cast<std::size_t>(i)]] - mx);
    sum += w[i];
  }
  w /= sum;

  Eigen::VectorXcd row_mean = Eigen::VectorXcd::Zero(jac_rows.cols());
  std::complex<double> e_mean{0.0, 0.0};
  for (int i = 0; i < n; ++i) {
    row_mean += w[i] * jac_rows.row(i).transpose();
    e_mean += w[i] * locals[selected[static_cast<std::size_t>(i)]];
  }

  SrContext ctx;
  ctx.n_sr = n;
  ctx.sample_indices = selected;
  ctx.stacked.resize(2 * n, jac_rows.cols());
  ctx.f_stacked.resize(2 * n);
  for (int i = 0; i < n; ++i) {
    const double s = std::sqrt(w[i]);
    const Eigen::VectorXcd centered = (jac_rows.row(i).transpose() - row_mean) * s;
    ctx.stacked.row(i) = centered.real().transpose();
    ctx.stacked.row(n + i) = centered.imag().transpose();
    const std::complex<double> f =
        s * std::conj(locals[selected[static_cast<std::size_t>(i)]] - e_mean);
    ctx.f_stacked[i] = f.real();
    ctx.f_stacked[n + i] = f.imag();
  }

  ctx.lambda = lambda > 0.0
                   ? lambda
                   : 1e-4 * (1.0 + ctx.stacked.squaredNorm() / static_cast<double>(n));
  return ctx;
}

Eigen::VectorXd sr_direction(const SrContext& ctx, const Eigen::VectorXd& grad) {
  if (grad.size() != ctx.stacked.cols())
    throw std::invalid_argument("sr_direction: gradient size mismatch");
  const double lambda = ctx.lambda;

  Eigen::MatrixXd gram = ctx.stacked * ctx.stacked.transpose();
  gram.diagonal().array() += lambda;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("sr_direction: eigendecomposition failed");
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e14)
    throw std::runtime_error("sr_direction: ill-conditioned system, cond ~ " +
                             std::to_string(hi / std::max(lo, 1e-300)));

  const Eigen::VectorXd t = ctx.stacked * grad;
  const Eigen::VectorXd s = eig.eigenvectors() *
                            (eig.eigenvectors().transpose() * t).cwiseQuotient(
                                eig.eigenvalues());
  return (grad - ctx.stacked.transpose() * s) / lambda;
}

}  // namespace qvmc
