// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>

#include "qvmc/config.hpp"
#include "qvmc/energy.hpp"
#include "qvmc/hamiltonian.hpp"
#include "qvmc/model.hpp"

namespace qvmc {

struct AdamParams {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  Eigen::VectorXd m, v;
  long step = 0;

  explicit AdamState(Eigen::Index n)
      : m(Eigen::VectorXd::Zero(n)), v(Eigen::VectorXd::Zero(n)) {}
};

/// Standard bias-corrected Adam update along `direction` (the plain or
/// SR-preconditioned gradient). Throws on non-finite direction entries.
void adam_step(AdamState& state, const AdamParams& params, Eigen::VectorXd& theta,
               const Eigen::VectorXd& direction);

struct StageTimes {
  double sampling = 0.0;
  double amplitudes = 0.0;
  double find_coupled_pairs = 0.0;
  double matrix_elements = 0.0;
  double gradient = 0.0;
  double sr = 0.0;
  double update = 0.0;
};

struct IterationRecord {
  long iteration = 0;
  double e_var = 0.0;
  double norm = 0.0;
  int n_unq = 0;
  double ipr = 0.0;
  StageTimes times;
};

struct RunResult {
  double best_e_var = 0.0;
  long best_iteration = 0;
  Eigen::VectorXd best_params;
  EnergyReport final_report;
  std::vector<IterationRecord> trace;
};

/**
 * The full training loop: sample -> amplitudes -> coupled pairs -> local
 * energies -> energy/gradient -> optional SR -> Adam update, with per-stage
 * wall times. Each record carries the pre-update energy of that iteration;
 * `iterations = 0` evaluates the initial state once without updating.
 */
RunResult run_optimisation(const HamiltonianIndex& index, AnqsModel& model,
                           const RunConfig& config,
                           const std::function<void(const IterationRecord&)>& on_iteration = {});

/// Convenience overload: loads the Hamiltonian and builds the model from
/// the config (hidden width 64, parameters initialised from config.seed).
RunResult run_optimisation(const RunConfig& config,
                           const std::function<void(const IterationRecord&)>& on_iteration = {});

}  // namespace qvmc
