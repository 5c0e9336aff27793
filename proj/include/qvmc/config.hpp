// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "qvmc/coupling.hpp"

namespace qvmc {

/// Full description of one optimisation run. Parsed from a line-based
/// `key = value` file; see the README for the key list.
struct RunConfig {
  std::string hamiltonian_path;
  int n_electrons = -1;
  bool spin_constraint = false;
  int bits_per_qudit = 6;
  int n_unq = 256;            // requested distinct samples per iteration
  int n_unq_sr = 100;         // samples entering the geometric tensor
  bool sr_enabled = true;
  double sr_lambda = 0.0;     // <= 0 selects the scale-aware default
  long sr_iterations = 0;     // apply SR only for the first M iterations; 0 = all
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long iterations = 1000;
  std::uint64_t seed = 1;
  CouplingBackend backend = CouplingBackend::kAuto;
  int auto_batch_threshold = 4096;
  std::string output_dir = ".";
  std::string run_name = "run";
  int threads = 1;
  bool trace_timings = true;  // write stage wall times into the trace CSV

  /// Throws with an actionable message when a field is out of contract.
  void validate() const;

  static RunConfig from_file(const std::string& path);
  static RunConfig from_string(const std::string& text);
};

}  // namespace qvmc
