// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qvmc/model.hpp"
#include "qvmc/sampler.hpp"

namespace qvmc {
namespace checks {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// The four-qubit reference Hamiltonian used across the validation suite.
const char* toy_hamiltonian_text();

/// Reference batch for the toy Hamiltonian: states {1100, 1001, 0110}
/// with amplitudes (2, 1, -1) encoded as log-amplitudes and phases.
SampleBatch make_toy_batch();

/// Pearson statistic sum (obs - n*p)^2 / (n*p) over categories.
double chi_square_statistic(std::span<const long> observed,
                            std::span<const double> expected_probs);

/// 99th-percentile chi-square critical values for small dof (pass iff the
/// statistic stays below, i.e. p-value > 0.01).
double chi_square_critical_99(int dof);

/// Four-state model (one qudit, single-particle sector) whose Born
/// distribution equals `probs` exactly; used by the sampler law checks.
AnqsModel make_four_state_model(const std::array<double, 4>& probs);

/// Runs the oracle-comparison suite. When fixtures_dir is non-empty the
/// committed Hamiltonian files are re-parsed and checked against frozen
/// ground energies.
std::vector<CheckResult> run_validation_checks(const std::string& fixtures_dir = "");

}  // namespace checks
}  // namespace qvmc
