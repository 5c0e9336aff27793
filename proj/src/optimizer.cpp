// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qvmc/parallel.hpp"
#include "qvmc/sampler.hpp"
#include "qvmc/sr.hpp"

namespace qvmc {

void adam_step(AdamState& state, const AdamParams& p, Eigen::VectorXd& theta,
               const Eigen::VectorXd& direction) {
  if (theta.size() != direction.size() || theta.size() != state.m.size())
    throw std::invalid_argument("adam_step: size mismatch");
  if (!direction.allFinite())
    throw std::runtime_error("adam_step: non-finite direction entry");
  ++state.step;
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(state.step));
  state.m = p.beta1 * state.m + (1.0 - p.beta1) * direction;
  state.v = p.beta2 * state.v + (1.0 - p.beta2) * direction.cwiseProduct(direction);
  theta.array() -=
      p.learning_rate * (state.m.array() / c1) /
      ((state.v.array() / c2).sqrt() + p.epsilon);
}

namespace {

constexpr std::uint32_t kSamplerStream = 0x53414d50;  // "SAMP"

class StageClock {
 public:
  void start() { t0_ = std::chrono::steady_clock::now(); }
  double lap() {
    const auto t1 = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(t1 - t0_).count();
    t0_ = t1;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace

RunResult run_optimisation(const HamiltonianIndex& index, AnqsModel& model,
                           const RunConfig& config,
                           const std::function<void(const IterationRecord&)>& on_iteration) {
  config.validate();
  const CounterRng rng(config.seed, kSamplerStream);
  const AdamParams adam_params{config.learning_rate, config.beta1, config.beta2,
                               config.epsilon};
  AdamState adam(model.n_params());
  Eigen::VectorXd theta = model.params();

  CouplingOptions coupling;
  coupling.backend = config.backend;
  coupling.auto_batch_threshold = config.auto_batch_threshold;
  coupling.threads = config.threads;

  RunResult result;
  result.best_e_var = std::numeric_limits<double>::infinity();
  const long n_evals = std::max(config.iterations, 1L);
  result.trace.reserve(static_cast<std::size_t>(n_evals));

  for (long it = 0; it < n_evals; ++it) {
    try {
      StageClock clock;
      IterationRecord rec;
      rec.iteration = it;

      clock.start();
      SampleBatch batch = sample_without_replacement(
          model, config.n_unq, rng, static_cast<std::uint32_t>(it), config.threads);
      rec.times.sampling = clock.lap();

      fill_amplitudes(batch, model, config.threads);
      rec.times.amplitudes = clock.lap();

      const CoupledPairs pairs = find_coupled_pairs(batch.vectors, index, coupling);
      rec.times.find_coupled_pairs = clock.lap();

      const Eigen::VectorXcd locals = local_energies(pairs, batch, index, config.threads);
      rec.times.matrix_elements = clock.lap();

      EnergyReport report = variational_energy(batch, locals);
      rec.e_var = report.e_var;
      rec.norm = report.norm;
      rec.ipr = report.ipr;
      rec.n_unq = batch.size();

      if (rec.e_var < result.best_e_var) {
        result.best_e_var = rec.e_var;
        result.best_iteration = it;
        result.best_params = theta;
      }

      if (config.iterations > 0) {
        // stream Jacobian rows: accumulate the gradient, keep only the rows
        // entering the geometric tensor
        const bool use_sr = config.sr_enabled &&
                            (config.sr_iterations == 0 || it < config.sr_iterations);
        std::vector<int> selected;
        Eigen::MatrixXcd sr_rows;
        std::vector<int> row_of(static_cast<std::size_t>(batch.size()), -1);
        if (use_sr) {
          selected = top_probability_indices(batch, config.n_unq_sr);
          sr_rows.resize(static_cast<Eigen::Index>(selected.size()), model.n_params());
          for (std::size_t r = 0; r < selected.size(); ++r)
            row_of[static_cast<std::size_t>(selected[r])] = static_cast<int>(r);
        }

        std::complex<double> e_mean{0.0, 0.0};
        for (int i = 0; i < batch.size(); ++i)
          e_mean += report.weights[i] * locals[i];
        GradientAccumulator acc(model.n_params(), e_mean);

        // rows are computed in fixed-size blocks (parallel) and accumulated
        // sequentially, so results do not depend on the thread count
        constexpr int kBlock = 16;
        std::vector<Eigen::VectorXcd> scratch(static_cast<std::size_t>(kBlock));
        for (int lo = 0; lo < batch.size(); lo += kBlock) {
          const int hi = std::min(batch.size(), lo + kBlock);
          parallel_for(hi - lo, config.threads, [&](int t) {
            model.grad_log_psi(batch.vectors[static_cast<std::size_t>(lo + t)],
                               scratch[static_cast<std::size_t>(t)]);
          });
          for (int t = 0; t < hi - lo; ++t) {
            const int i = lo + t;
            acc.add(report.weights[i], locals[i], scratch[static_cast<std::size_t>(t)]);
            if (use_sr && row_of[static_cast<std::size_t>(i)] >= 0)
              sr_rows.row(row_of[static_cast<std::size_t>(i)]) =
                  scratch[static_cast<std::size_t>(t)].transpose();
          }
        }
        Eigen::VectorXd grad = acc.take();
        rec.times.gradient = clock.lap();

        Eigen::VectorXd direction;
        if (use_sr) {
          const SrContext ctx =
              build_sr_context(batch, locals, selected, sr_rows, config.sr_lambda);
          direction = sr_direction(ctx, grad);
        } else {
          direction = std::move(grad);
        }
        rec.times.sr = clock.lap();

        adam_step(adam, adam_params, theta, direction);
        model.set_params(theta);
        rec.times.update = clock.lap();
      }

      result.trace.push_back(rec);
      if (it + 1 == n_evals) result.final_report = std::move(report);
      if (on_iteration) on_iteration(rec);
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(it) + ": " + e.what());
    }
  }
  return result;
}

RunResult run_optimisation(const RunConfig& config,
                           const std::function<void(const IterationRecord&)>& on_iteration) {
  config.validate();
  const HamiltonianIndex index = HamiltonianIndex::load(config.hamiltonian_path);
  AnqsModel model(QuditLayout::make(index.n_qubits(), config.bits_per_qudit),
                  SectorConstraint{config.n_electrons, config.spin_constraint});
  model.init_params(config.seed);
  return run_optimisation(index, model, config, on_iteration);
}

}  // namespace qvmc
