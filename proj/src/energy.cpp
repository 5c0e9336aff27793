// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "qvmc/parallel.hpp"

namespace qvmc {

Eigen::VectorXcd local_energies(const CoupledPairs& pairs, const SampleBatch& batch,
                                const HamiltonianIndex& index, int threads) {
  const int n = batch.size();
  Eigen::VectorXcd locals = Eigen::VectorXcd::Zero(n);

  // canonical ordering makes each source a contiguous run
  std::vector<std::pair<std::size_t, std::size_t>> runs(static_cast<std::size_t>(n),
                                                        {0, 0});
  std::size_t begin = 0;
  while (begin < pairs.entries.size()) {
    std::size_t end = begin;
    const std::uint32_t x = pairs.entries[begin].x;
    while (end < pairs.entries.size() && pairs.entries[end].x == x) ++end;
    runs[x] = {begin, end};
    begin = end;
  }

  parallel_for(n, threads, [&](int i) {
    const auto iu = static_cast<std::size_t>(i);
    if (std::isinf(batch.log_amps[i]))
      throw std::logic_error("local_energies: sampled state has zero amplitude");
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t e = runs[iu].first; e < runs[iu].second; ++e) {
      const auto& pair = pairs.entries[e];
      const auto j = static_cast<Eigen::Index>(pair.x_prime);
      const std::complex<double> h =
          index.group_element(batch.vectors[pair.x_prime], pair.xy);
      const double dlog = batch.log_amps[j] - batch.log_amps[i];
      const double dphase = batch.phases[j] - batch.phases[i];
      sum += h * std::exp(std::complex<double>(dlog, 0.0)) *
             std::complex<double>(std::cos(dphase), std::sin(dphase));
    }
    locals[i] = sum;
  });
  return locals;
}

EnergyReport variational_energy(const SampleBatch& batch, const Eigen::VectorXcd& locals) {
  if (locals.size() != batch.size())
    throw std::invalid_argument("variational_energy: locals/batch size mismatch");
  EnergyReport report;
  report.locals = locals;
  report.norm = batch.norm;
  report.log_norm = batch.log_norm;
  if (!(batch.norm > 0.0))
    throw std::runtime_error("variational_energy: sampled norm is zero");

  const int n = batch.size();
  report.weights.resize(n);
  for (int i = 0; i < n; ++i)
    report.weights[i] = std::exp(batch.log_probs[i] - batch.log_norm);

  std::complex<double> mean{0.0, 0.0};
  double ipr = 0.0;
  for (int i = 0; i < n; ++i) {
    mean += report.weights[i] * locals[i];
    ipr += report.weights[i] * report.weights[i];
  }
  report.e_var = mean.real();
  report.im_residual = mean.imag();
  report.ipr = ipr;
  if (std::abs(report.im_residual) > 1e-6 * std::max(1.0, std::abs(report.e_var)))
    throw std::runtime_error("variational_energy: imaginary residual " +
                             std::to_string(report.im_residual));
  return report;
}

GradientAccumulator::GradientAccumulator(Eigen::Index n_params, std::complex<double> e_mean)
    : grad_(Eigen::VectorXd::Zero(n_params)), e_mean_(e_mean) {}

void GradientAccumulator::add(double weight, std::complex<double> e_loc,
                              const Eigen::VectorXcd& row) {
  const std::complex<double> c = weight * (e_loc - e_mean_);
  if (c == std::complex<double>{0.0, 0.0}) return;
  // 2 Re{ c * row }
  grad_.noalias() += 2.0 * (c.real() * row.real() - c.imag() * row.imag());
}

Eigen::VectorXd GradientAccumulator::take() { return std::move(grad_); }

Eigen::VectorXd energy_gradient(const Eigen::VectorXd& weights,
                                const Eigen::VectorXcd& locals,
                                const Eigen::MatrixXcd& jacobian) {
  if (weights.size() != locals.size() || jacobian.rows() != weights.size())
    throw std::invalid_argument("energy_gradient: misaligned inputs");
  std::complex<double> mean{0.0, 0.0};
  for (Eigen::Index i = 0; i < weights.size(); ++i) mean += weights[i] * locals[i];
  GradientAccumulator acc(jacobian.cols(), mean);
  Eigen::VectorXcd row;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    row = jacobian.row(i).transpose();
    acc.add(weights[i], locals[i], row);
  }
  return acc.take();
}

}  // namespace qvmc
