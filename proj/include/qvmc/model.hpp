// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "qvmc/basis_vector.hpp"

namespace qvmc {

/// Partition of N qubits into qudits of `bits_per_qudit` bits each, with a
/// smaller final qudit when N is not a multiple.
struct QuditLayout {
  int n_qubits = 0;
  int bits_per_qudit = 6;
  std::vector<int> sizes;
  std::vector<int> offsets;

  static QuditLayout make(int n_qubits, int bits_per_qudit);
  [[nodiscard]] int count() const noexcept { return static_cast<int>(sizes.size()); }
};

/// Particle-number sector, with an optional equal-split spin constraint
/// (n_electrons/2 particles on even-indexed "up" orbitals).
struct SectorConstraint {
  int n_electrons = 0;
  bool spin_constraint = false;
};

/// One qudit's conditional wave function given a prefix: per-value mask,
/// normalized log-probability (-inf on masked values), log-amplitude
/// (= log_prob / 2) and raw phase.
struct ConditionalTable {
  std::vector<std::uint8_t> allowed;
  std::vector<double> log_prob;
  std::vector<double> log_amp;
  std::vector<double> phase;
};

/**
 * Qudit-grouped autoregressive ansatz. Each qudit carries two real MLP
 * subnetworks (log-amplitude and phase): two hidden layers of width 64,
 * tanh activations, a residual connection adding the first hidden output
 * to the second pre-activation, and a linear output of size 2^k. The
 * log-amplitude outputs are shifted by their average over the 2^k values
 * (global activation) and then normalized by a log-softmax over allowed
 * values, so the state is normalized by construction.
 *
 * The prefix fed to qudit j is the +/-1 encoding of the qubits before
 * qudit j, zero-padded to full length N.
 *
 * Parameters are immutable during an evaluation pass; updates must be
 * exclusive.
 */
class AnqsModel {
 public:
  AnqsModel(QuditLayout layout, SectorConstraint sector, int hidden = 64);

  [[nodiscard]] const QuditLayout& layout() const noexcept { return layout_; }
  [[nodiscard]] const SectorConstraint& sector() const noexcept { return sector_; }
  [[nodiscard]] int hidden() const noexcept { return hidden_; }
  [[nodiscard]] Eigen::Index n_params() const noexcept { return params_.size(); }
  [[nodiscard]] const Eigen::VectorXd& params() const noexcept { return params_; }
  void set_params(const Eigen::VectorXd& p);

  /// Deterministic init: weights uniform on +/- 1/sqrt(fan_in), biases zero.
  void init_params(std::uint64_t seed);

  /// Mask of allowed values for one qudit given prefix occupation counts.
  /// Value v is allowed iff the particle budget can still close exactly
  /// (and likewise for spin-up when the constraint is active).
  [[nodiscard]] std::vector<std::uint8_t> allowed_values(int qudit, int prefix_weight,
                                                         int prefix_up_weight) const;

  /// Conditional wave function of `qudit` given the bits of the preceding
  /// qudits in `prefix`. Throws if the prefix admits no completion.
  [[nodiscard]] ConditionalTable conditional(const BasisVector& prefix, int qudit) const;

  struct Amplitude {
    double log_amp;  // -inf when x is masked
    double phase;    // reported as 0 when masked
  };

  /// log|psi(x)| and phase, as the sum of conditional contributions along
  /// the qudit chain. 2*log|psi(x)| is the normalized log-probability.
  [[nodiscard]] Amplitude log_psi(const BasisVector& x) const;

  /// Conjugate log-derivative row: d log|psi| / d theta - i * d phase / d theta.
  /// Exact reverse-mode differentiation; throws when x is masked.
  void grad_log_psi(const BasisVector& x, Eigen::VectorXcd& out) const;

  /// Batched variant: one grad_log_psi row per vector, sharded over threads.
  [[nodiscard]] Eigen::MatrixXcd batched_grad_log_psi(std::span<const BasisVector> xs,
                                                      int threads = 1) const;

  [[nodiscard]] bool in_sector(const BasisVector& x) const;

  enum class Head { kAmplitude, kPhase };
  enum class Block { kW1, kB1, kW2, kB2, kW3, kB3 };

  /// (offset, length) of one weight/bias block in the flat parameter
  /// vector. Weight matrices are row-major.
  [[nodiscard]] std::pair<int, int> param_range(int qudit, Head head, Block block) const;

  /// Text checkpoint: layout metadata, seed and hexfloat parameters.
  void save_checkpoint(std::ostream& out, std::uint64_t seed) const;

 private:
  struct MlpBlock {
    int base = 0;  // offset into the flat parameter vector
    int in = 0, hidden = 0, out = 0;
    int o_w1 = 0, o_b1 = 0, o_w2 = 0, o_b2 = 0, o_w3 = 0, o_b3 = 0;
    int total = 0;
  };

  struct QuditInfo {
    int remaining_after = 0;      // qubits after this qudit
    int remaining_up_after = 0;   // even-indexed qubits after this qudit
    std::uint32_t up_value_mask = 0;  // value bits on even-indexed qubits
    BasisVector up_prefix_mask;   // even-indexed qubits before this qudit
  };

  void encode_prefix(const BasisVector& x, int n_prefix_bits, Eigen::VectorXd& e) const;
  void mlp_forward(const MlpBlock& b, const Eigen::VectorXd& e, Eigen::VectorXd& h1,
                   Eigen::VectorXd& h2, Eigen::VectorXd& out) const;
  void mlp_backward(const MlpBlock& b, const Eigen::VectorXd& e, const Eigen::VectorXd& h1,
                    const Eigen::VectorXd& h2, const Eigen::VectorXd& gout,
                    Eigen::VectorXd& gbuf) const;

  QuditLayout layout_;
  SectorConstraint sector_;
  int hidden_;
  int n_up_ = 0;
  std::vector<QuditInfo> qudit_info_;
  std::vector<MlpBlock> amp_blocks_, phase_blocks_;
  BasisVector even_mask_;
  Eigen::VectorXd params_;
};

struct ModelCheckpoint {
  AnqsModel model;
  std::uint64_t seed;
};

/// Inverse of AnqsModel::save_checkpoint.
ModelCheckpoint load_checkpoint(std::istream& in);

}  // namespace qvmc
