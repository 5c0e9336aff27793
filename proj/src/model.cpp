// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/model.hpp"

#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "qvmc/parallel.hpp"
#include "qvmc/rng.hpp"

namespace qvmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::uint32_t kInitStream = 0x494e4954;  // "INIT"

using RowMajorMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatMap = Eigen::Map<const RowMajorMat>;
using ConstVecMap = Eigen::Map<const Eigen::VectorXd>;
using MatMap = Eigen::Map<RowMajorMat>;
using VecMap = Eigen::Map<Eigen::VectorXd>;

}  // namespace

QuditLayout QuditLayout::make(int n_qubits, int bits_per_qudit) {
  if (n_qubits < 1 || n_qubits > BasisVector::kMaxBits)
    throw std::invalid_argument("QuditLayout: qubit count out of range");
  if (bits_per_qudit < 1 || bits_per_qudit > 8)
    throw std::invalid_argument("QuditLayout: bits_per_qudit must be in [1, 8]");
  QuditLayout l;
  l.n_qubits = n_qubits;
  l.bits_per_qudit = bits_per_qudit;
  for (int o = 0; o < n_qubits; o += bits_per_qudit) {
    l.offsets.push_back(o);
    l.sizes.push_back(std::min(bits_per_qudit, n_qubits - o));
  }
  return l;
}

AnqsModel::AnqsModel(QuditLayout layout, SectorConstraint sector, int hidden)
    : layout_(std::move(layout)), sector_(sector), hidden_(hidden) {
  const int n = layout_.n_qubits;
  if (sector_.n_electrons < 0 || sector_.n_electrons > n)
    throw std::invalid_argument("AnqsModel: electron count out of range");
  if (sector_.spin_constraint) {
    if (sector_.n_electrons % 2 != 0)
      throw std::invalid_argument("AnqsModel: spin constraint requires even n_electrons");
    n_up_ = sector_.n_electrons / 2;
  }
  if (hidden_ < 1) throw std::invalid_argument("AnqsModel: hidden width must be positive");

  even_mask_ = BasisVector(n);
  for (int i = 0; i < n; i += 2) even_mask_.set_bit(i, true);

  int cursor = 0;
  auto add_block = [&](int out_dim) {
    MlpBlock b;
    b.base = cursor;
    b.in = n;
    b.hidden = hidden_;
    b.out = out_dim;
    b.o_w1 = 0;
    b.o_b1 = b.o_w1 + b.hidden * b.in;
    b.o_w2 = b.o_b1 + b.hidden;
    b.o_b2 = b.o_w2 + b.hidden * b.hidden;
    b.o_w3 = b.o_b2 + b.hidden;
    b.o_b3 = b.o_w3 + b.out * b.hidden;
    b.total = b.o_b3 + b.out;
    cursor += b.total;
    return b;
  };

  for (int j = 0; j < layout_.count(); ++j) {
    const int k = layout_.sizes[static_cast<std::size_t>(j)];
    const int offset = layout_.offsets[static_cast<std::size_t>(j)];
    amp_blocks_.push_back(add_block(1 << k));
    phase_blocks_.push_back(add_block(1 << k));

    QuditInfo info;
    info.remaining_after = n - offset - k;
    for (int i = offset + k; i < n; ++i)
      if (i % 2 == 0) ++info.remaining_up_after;
    for (int t = 0; t < k; ++t)
      if ((offset + t) % 2 == 0) info.up_value_mask |= 1u << (k - 1 - t);
    info.up_prefix_mask = BasisVector(n);
    for (int i = 0; i < offset; i += 2) info.up_prefix_mask.set_bit(i, true);
    qudit_info_.push_back(std::move(info));
  }
  params_ = Eigen::VectorXd::Zero(cursor);
}

void AnqsModel::set_params(const Eigen::VectorXd& p) {
  if (p.size() != params_.size())
    throw std::invalid_argument("AnqsModel::set_params: size mismatch");
  params_ = p;
}

void AnqsModel::init_params(std::uint64_t seed) {
  SequentialRng rng(seed, kInitStream);
  // Amplitude biases start at zero. Phase biases get a small symmetric
  // perturbation: with exactly zero phase output the state is real and
  // every phase gradient vanishes identically (an exact saddle), so a
  // qudit whose prefix encoding is all-zero could never learn a sign
  // structure. The perturbation is kept small so optimisation still
  // starts near the sign-free configuration.
  constexpr double kPhaseBiasScale = 0.1;
  auto fill = [&](const MlpBlock& b, double bias_scale) {
    double* p = params_.data() + b.base;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(b.in));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(b.hidden));
    for (int i = 0; i < b.hidden * b.in; ++i) p[b.o_w1 + i] = rng.uniform_symmetric(s1);
    for (int i = 0; i < b.hidden; ++i) p[b.o_b1 + i] = rng.uniform_symmetric(bias_scale * s1);
    for (int i = 0; i < b.hidden * b.hidden; ++i) p[b.o_w2 + i] = rng.uniform_symmetric(s2);
    for (int i = 0; i < b.hidden; ++i) p[b.o_b2 + i] = rng.uniform_symmetric(bias_scale * s2);
    for (int i = 0; i < b.out * b.hidden; ++i) p[b.o_w3 + i] = rng.uniform_symmetric(s2);
    for (int i = 0; i < b.out; ++i) p[b.o_b3 + i] = rng.uniform_symmetric(bias_scale * s2);
  };
  for (int j = 0; j < layout_.count(); ++j) {
    fill(amp_blocks_[static_cast<std::size_t>(j)], 0.0);
    fill(phase_blocks_[static_cast<std::size_t>(j)], kPhaseBiasScale);
  }
}

std::vector<std::uint8_t> AnqsModel::allowed_values(int qudit, int prefix_weight,
                                                    int prefix_up_weight) const {
  const auto& info = qudit_info_[static_cast<std::size_t>(qudit)];
  const int k = layout_.sizes[static_cast<std::size_t>(qudit)];
  const int n_e = sector_.n_electrons;
  std::vector<std::uint8_t> mask(std::size_t{1} << k, 0);
  for (std::uint32_t v = 0; v < mask.size(); ++v) {
    const int w = prefix_weight + std::popcount(v);
    bool ok = w <= n_e && w + info.remaining_after >= n_e;
    if (ok && sector_.spin_constraint) {
      // both spin species must be able to close their budgets
      const int wu = prefix_up_weight + std::popcount(v & info.up_value_mask);
      const int wd = w - wu;
      const int n_down = n_e - n_up_;
      const int rem_down = info.remaining_after - info.remaining_up_after;
      ok = wu <= n_up_ && wu + info.remaining_up_after >= n_up_ &&
           wd <= n_down && wd + rem_down >= n_down;
    }
    mask[v] = ok ? 1 : 0;
  }
  return mask;
}

void AnqsModel::encode_prefix(const BasisVector& x, int n_prefix_bits,
                              Eigen::VectorXd& e) const {
  e.setZero(layout_.n_qubits);
  for (int i = 0; i < n_prefix_bits; ++i) e[i] = x.bit(i) ? 1.0 : -1.0;
}

void AnqsModel::mlp_forward(const MlpBlock& b, const Eigen::VectorXd& e,
                            Eigen::VectorXd& h1, Eigen::VectorXd& h2,
                            Eigen::VectorXd& out) const {
  const double* p = params_.data() + b.base;
  ConstMatMap W1(p + b.o_w1, b.hidden, b.in);
  ConstVecMap b1(p + b.o_b1, b.hidden);
  ConstMatMap W2(p + b.o_w2, b.hidden, b.hidden);
  ConstVecMap b2(p + b.o_b2, b.hidden);
  ConstMatMap W3(p + b.o_w3, b.out, b.hidden);
  ConstVecMap b3(p + b.o_b3, b.out);

  h1 = ((W1 * e + b1).array().tanh()).matrix();
  h2 = ((W2 * h1 + b2 + h1).array().tanh()).matrix();
  out.noalias() = W3 * h2;
  out += b3;
}

void AnqsModel::mlp_backward(const MlpBlock& b, const Eigen::VectorXd& e,
                             const Eigen::VectorXd& h1, const Eigen::VectorXd& h2,
                             const Eigen::VectorXd& gout, Eigen::VectorXd& gbuf) const {
  const double* p = params_.data() + b.base;
  ConstMatMap W2(p + b.o_w2, b.hidden, b.hidden);
  ConstMatMap W3(p + b.o_w3, b.out, b.hidden);

  gbuf.resize(b.total);
  MatMap gW3(gbuf.data() + b.o_w3, b.out, b.hidden);
  gW3.noalias() = gout * h2.transpose();
  VecMap(gbuf.data() + b.o_b3, b.out) = gout;

  Eigen::VectorXd gz2 =
      (W3.transpose() * gout).cwiseProduct((1.0 - h2.array().square()).matrix());
  MatMap gW2(gbuf.data() + b.o_w2, b.hidden, b.hidden);
  gW2.noalias() = gz2 * h1.transpose();
  VecMap(gbuf.data() + b.o_b2, b.hidden) = gz2;

  // residual: h1 feeds both W2 and the second pre-activation directly
  Eigen::VectorXd gh1 = W2.transpose() * gz2 + gz2;
  Eigen::VectorXd gz1 = gh1.cwiseProduct((1.0 - h1.array().square()).matrix());
  MatMap gW1(gbuf.data() + b.o_w1, b.hidden, b.in);
  gW1.noalias() = gz1 * e.transpose();
  VecMap(gbuf.data() + b.o_b1, b.hidden) = gz1;
}

ConditionalTable AnqsModel::conditional(const BasisVector& prefix, int qudit) const {
  const int offset = layout_.offsets[static_cast<std::size_t>(qudit)];
  const auto& info = qudit_info_[static_cast<std::size_t>(qudit)];

  const int prefix_weight = prefix.popcount_below(offset);
  const int prefix_up = and_popcount(prefix, info.up_prefix_mask);

  ConditionalTable table;
  table.allowed = allowed_values(qudit, prefix_weight, prefix_up);
  const std::size_t m = table.allowed.size();

  bool any = false;
  for (auto a : table.allowed) any |= (a != 0);
  if (!any) throw std::runtime_error("AnqsModel::conditional: unreachable prefix");

  Eigen::VectorXd e, h1, h2, amp_out, phase_out;
  encode_prefix(prefix, offset, e);
  mlp_forward(amp_blocks_[static_cast<std::size_t>(qudit)], e, h1, h2, amp_out);
  mlp_forward(phase_blocks_[static_cast<std::size_t>(qudit)], e, h1, h2, phase_out);

  // global activation: shift raw log-amplitudes by their average
  amp_out.array() -= amp_out.mean();

  // log-softmax over 2*log|psi| restricted to allowed values
  double mx = kNegInf;
  for (std::size_t v = 0; v < m; ++v)
    if (table.allowed[v] && 2.0 * amp_out[static_cast<Eigen::Index>(v)] > mx)
      mx = 2.0 * amp_out[static_cast<Eigen::Index>(v)];
  double sum = 0.0;
  for (std::size_t v = 0; v < m; ++v)
    if (table.allowed[v]) sum += std::exp(2.0 * amp_out[static_cast<Eigen::Index>(v)] - mx);
  const double lse = mx + std::log(sum);

  table.log_prob.resize(m);
  table.log_amp.resize(m);
  table.phase.resize(m);
  for (std::size_t v = 0; v < m; ++v) {
    const auto vi = static_cast<Eigen::Index>(v);
    if (table.allowed[v]) {
      table.log_prob[v] = 2.0 * amp_out[vi] - lse;
      table.log_amp[v] = 0.5 * table.log_prob[v];
    } else {
      table.log_prob[v] = kNegInf;
      table.log_amp[v] = kNegInf;
    }
    table.phase[v] = phase_out[vi];
  }
  return table;
}

bool AnqsModel::in_sector(const BasisVector& x) const {
  if (x.n_bits() != layout_.n_qubits) return false;
  if (x.popcount() != sector_.n_electrons) return false;
  if (sector_.spin_constraint && and_popcount(x, even_mask_) != n_up_) return false;
  return true;
}

AnqsModel::Amplitude AnqsModel::log_psi(const BasisVector& x) const {
  if (!in_sector(x)) return {kNegInf, 0.0};
  double log_amp = 0.0, phase = 0.0;
  for (int j = 0; j < layout_.count(); ++j) {
    const ConditionalTable t = conditional(x, j);
    const std::uint32_t v = extract_bits(x, layout_.offsets[static_cast<std::size_t>(j)],
                                         layout_.sizes[static_cast<std::size_t>(j)]);
    log_amp += t.log_amp[v];
    phase += t.phase[v];
  }
  return {log_amp, phase};
}

void AnqsModel::grad_log_psi(const BasisVector& x, Eigen::VectorXcd& out) const {
  if (!in_sector(x))
    throw std::invalid_argument("grad_log_psi: state is masked (zero amplitude)");
  out.setZero(params_.size());

  Eigen::VectorXd e, h1a, h2a, h1p, h2p, amp_out, phase_out, gbuf;
  for (int j = 0; j < layout_.count(); ++j) {
    const auto ju = static_cast<std::size_t>(j);
    const int offset = layout_.offsets[ju];
    const int k = layout_.sizes[ju];
    const std::uint32_t v = extract_bits(x, offset, k);
    const auto m = Eigen::Index{1} << k;

    encode_prefix(x, offset, e);

    // amplitude head: d log|psi| / d raw = onehot(v) - softmax, then the
    // mean-shift pullback subtracts the gradient's own mean
    const MlpBlock& ab = amp_blocks_[ju];
    mlp_forward(ab, e, h1a, h2a, amp_out);
    amp_out.array() -= amp_out.mean();

    const int prefix_weight = x.popcount_below(offset);
    const int prefix_up = and_popcount(x, qudit_info_[ju].up_prefix_mask);
    const auto allowed = allowed_values(j, prefix_weight, prefix_up);

    double mx = kNegInf;
    for (Eigen::Index u = 0; u < m; ++u)
      if (allowed[static_cast<std::size_t>(u)] && 2.0 * amp_out[u] > mx) mx = 2.0 * amp_out[u];
    double sum = 0.0;
    for (Eigen::Index u = 0; u < m; ++u)
      if (allowed[static_cast<std::size_t>(u)]) sum += std::exp(2.0 * amp_out[u] - mx);

    Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
    for (Eigen::Index u = 0; u < m; ++u)
      if (allowed[static_cast<std::size_t>(u)])
        g[u] = -std::exp(2.0 * amp_out[u] - mx) / sum;
    g[v] += 1.0;
    g.array() -= g.mean();

    mlp_backward(ab, e, h1a, h2a, g, gbuf);
    for (int t = 0; t < ab.total; ++t)
      out[ab.base + t] = std::complex<double>(gbuf[t], 0.0);

    // phase head: d phase / d raw = onehot(v); row is d log|psi| - i d phase
    const MlpBlock& pb = phase_blocks_[ju];
    mlp_forward(pb, e, h1p, h2p, phase_out);
    Eigen::VectorXd gp = Eigen::VectorXd::Zero(m);
    gp[v] = 1.0;
    mlp_backward(pb, e, h1p, h2p, gp, gbuf);
    for (int t = 0; t < pb.total; ++t)
      out[pb.base + t] = std::complex<double>(0.0, -gbuf[t]);
  }
}

Eigen::MatrixXcd AnqsModel::batched_grad_log_psi(std::span<const BasisVector> xs,
                                                 int threads) const {
  Eigen::MatrixXcd jac(static_cast<Eigen::Index>(xs.size()), params_.size());
  parallel_for(static_cast<int>(xs.size()), threads, [&](int i) {
    Eigen::VectorXcd row;
    grad_log_psi(xs[static_cast<std::size_t>(i)], row);
    jac.row(i) = row.transpose();
  });
  return jac;
}

std::pair<int, int> AnqsModel::param_range(int qudit, Head head, Block block) const {
  const auto& b = (head == Head::kAmplitude ? amp_blocks_ : phase_blocks_)
      [static_cast<std::size_t>(qudit)];
  switch (block) {
    case Block::kW1: return {b.base + b.o_w1, b.hidden * b.in};
    case Block::kB1: return {b.base + b.o_b1, b.hidden};
    case Block::kW2: return {b.base + b.o_w2, b.hidden * b.hidden};
    case Block::kB2: return {b.base + b.o_b2, b.hidden};
    case Block::kW3: return {b.base + b.o_w3, b.out * b.hidden};
    case Block::kB3: return {b.base + b.o_b3, b.out};
  }
  throw std::logic_error("param_range: unreachable");
}

void AnqsModel::save_checkpoint(std::ostream& out, std::uint64_t seed) const {
  out << "qvmc-checkpoint v1\n";
  out << "n_qubits " << layout_.n_qubits << "\n";
  out << "bits_per_qudit " << layout_.bits_per_qudit << "\n";
  out << "hidden " << hidden_ << "\n";
  out << "n_electrons " << sector_.n_electrons << "\n";
  out << "spin_constraint " << (sector_.spin_constraint ? 1 : 0) << "\n";
  out << "seed " << seed << "\n";
  out << "n_params " << params_.size() << "\n";
  out << std::hexfloat;
  for (Eigen::Index i = 0; i < params_.size(); ++i) out << params_[i] << "\n";
  out << std::defaultfloat;
}

ModelCheckpoint load_checkpoint(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "qvmc-checkpoint v1")
    throw std::runtime_error("checkpoint: bad magic line");
  auto read_kv = [&](const std::string& key) -> long long {
    std::string k;
    long long v;
    if (!(in >> k >> v) || k != key)
      throw std::runtime_error("checkpoint: expected key '" + key + "'");
    return v;
  };
  const int n_qubits = static_cast<int>(read_kv("n_qubits"));
  const int bits = static_cast<int>(read_kv("bits_per_qudit"));
  const int hidden = static_cast<int>(read_kv("hidden"));
  const int n_e = static_cast<int>(read_kv("n_electrons"));
  const bool spin = read_kv("spin_constraint") != 0;
  const auto seed = static_cast<std::uint64_t>(read_kv("seed"));
  const auto n_params = read_kv("n_params");

  AnqsModel model(QuditLayout::make(n_qubits, bits), SectorConstraint{n_e, spin}, hidden);
  if (model.n_params() != n_params)
    throw std::runtime_error("checkpoint: parameter count mismatch");
  Eigen::VectorXd p(n_params);
  for (Eigen::Index i = 0; i < n_params; ++i) {
    std::string tok;
    if (!(in >> tok)) throw std::runtime_error("checkpoint: truncated parameters");
    p[i] = std::strtod(tok.c_str(), nullptr);
  }
  model.set_params(p);
  return {std::move(model), seed};
}

}  // namespace qvmc
