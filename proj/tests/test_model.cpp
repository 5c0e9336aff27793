// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "qvmc/model.hpp"
#include "qvmc/oracle.hpp"
#include "qvmc/rng.hpp"

using qvmc::AnqsModel;
using qvmc::BasisVector;
using qvmc::QuditLayout;
using qvmc::SectorConstraint;

namespace {

double sector_probability_sum(const AnqsModel& model) {
  const auto sector = qvmc::oracle::SectorBasis::enumerate(
      model.layout().n_qubits, model.sector().n_electrons,
      model.sector().spin_constraint ? std::optional<int>(model.sector().n_electrons / 2)
                                     : std::nullopt);
  double sum = 0.0;
  for (const auto& x : sector.states) sum += std::exp(2.0 * model.log_psi(x).log_amp);
  return sum;
}

}  // namespace

TEST_CASE("qudit layout splits with a smaller final qudit") {
  const QuditLayout l = QuditLayout::make(14, 6);
  REQUIRE(l.count() == 3);
  CHECK(l.sizes == std::vector<int>{6, 6, 2});
  CHECK(l.offsets == std::vector<int>{0, 6, 12});
  CHECK_THROWS_AS(QuditLayout::make(4, 0), std::invalid_argument);
}

TEST_CASE("allowed_values enforces the particle window") {
  AnqsModel model(QuditLayout::make(4, 4), SectorConstraint{2, false});

  // single qudit: exactly the weight-2 values
  const auto mask = model.allowed_values(0, 0, 0);
  int allowed = 0;
  for (std::uint32_t v = 0; v < 16; ++v) {
    if (mask[v]) ++allowed;
    CHECK(static_cast<bool>(mask[v]) == (std::popcount(v) == 2));
  }
  CHECK(allowed == 6);

  // closure at the last qudit: budget must land exactly
  AnqsModel chain(QuditLayout::make(4, 2), SectorConstraint{2, false});
  const auto last = chain.allowed_values(1, 1, 1);
  for (std::uint32_t v = 0; v < 4; ++v)
    CHECK(static_cast<bool>(last[v]) == (1 + std::popcount(v) == 2));

  // filled shell: only the all-ones value anywhere
  AnqsModel filled(QuditLayout::make(6, 3), SectorConstraint{6, false});
  const auto m0 = filled.allowed_values(0, 0, 0);
  for (std::uint32_t v = 0; v < 8; ++v) CHECK(static_cast<bool>(m0[v]) == (v == 7));
}

TEST_CASE("spin constraint masks both species") {
  AnqsModel model(QuditLayout::make(4, 4), SectorConstraint{2, true});
  // allowed: one particle on even qubits {0,2}, one on odd {1,3}
  const auto mask = model.allowed_values(0, 0, 0);
  int count = 0;
  for (std::uint32_t v = 0; v < 16; ++v) count += mask[v];
  CHECK(count == 4);
  CHECK(sector_probability_sum(model) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_THROWS_AS(AnqsModel(QuditLayout::make(4, 4), SectorConstraint{3, true}),
                  std::invalid_argument);
}

TEST_CASE("an unreachable prefix is rejected") {
  // two particles already placed in a single-particle sector: no value of
  // the next qudit can close the budget
  AnqsModel model(QuditLayout::make(4, 2), SectorConstraint{1, false}, 8);
  model.init_params(1);
  CHECK_THROWS_AS(static_cast<void>(model.conditional(BasisVector::parse("1100"), 1)),
                  std::runtime_error);
}

TEST_CASE("conditionals are normalized and masked") {
  AnqsModel model(QuditLayout::make(8, 3), SectorConstraint{3, false});
  model.init_params(11);
  const BasisVector prefix = BasisVector::parse("10100000");

  const auto t = model.conditional(prefix, 1);
  double sum = 0.0;
  for (std::size_t v = 0; v < t.allowed.size(); ++v) {
    if (t.allowed[v]) {
      sum += std::exp(t.log_prob[v]);
      CHECK(t.log_amp[v] == t.log_prob[v] / 2.0);
    } else {
      CHECK(std::exp(t.log_prob[v]) == 0.0);
    }
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("adding a constant to one qudit's raw log-amplitudes changes nothing") {
  AnqsModel a(QuditLayout::make(6, 3), SectorConstraint{2, false}, 16);
  a.init_params(3);
  AnqsModel b = a;
  Eigen::VectorXd p = b.params();
  const auto [off, len] = b.param_range(1, AnqsModel::Head::kAmplitude,
                                        AnqsModel::Block::kB3);
  for (int i = 0; i < len; ++i) p[off + i] += 0.37;
  b.set_params(p);

  const BasisVector prefix = BasisVector::parse("100000");
  const auto ta = a.conditional(prefix, 1);
  const auto tb = b.conditional(prefix, 1);
  for (std::size_t v = 0; v < ta.allowed.size(); ++v) {
    if (!ta.allowed[v]) continue;
    CHECK(ta.log_prob[v] == doctest::Approx(tb.log_prob[v]).epsilon(1e-12));
  }
}

TEST_CASE("log_psi: masking, normalization, consistency with conditionals") {
  AnqsModel model(QuditLayout::make(6, 3), SectorConstraint{2, false}, 16);
  model.init_params(5);

  const auto masked = model.log_psi(BasisVector::parse("111000"));
  CHECK(std::isinf(masked.log_amp));
  CHECK(masked.phase == 0.0);

  CHECK(sector_probability_sum(model) == doctest::Approx(1.0).epsilon(1e-10));

  const BasisVector x = BasisVector::parse("010010");
  double la = 0.0, ph = 0.0;
  for (int j = 0; j < model.layout().count(); ++j) {
    const auto t = model.conditional(x, j);
    const auto v = qvmc::extract_bits(x, model.layout().offsets[static_cast<std::size_t>(j)],
                                      model.layout().sizes[static_cast<std::size_t>(j)]);
    la += t.log_amp[v];
    ph += t.phase[v];
  }
  const auto amp = model.log_psi(x);
  CHECK(amp.log_amp == doctest::Approx(la).epsilon(1e-12));
  CHECK(amp.phase == doctest::Approx(ph).epsilon(1e-12));
}

TEST_CASE("normalization survives exhaustive enumeration up to 12 qubits") {
  AnqsModel model(QuditLayout::make(12, 6), SectorConstraint{4, false});
  model.init_params(17);
  CHECK(sector_probability_sum(model) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("autoregressive causality: later qudits never affect earlier tables") {
  AnqsModel model(QuditLayout::make(9, 3), SectorConstraint{3, false}, 16);
  model.init_params(23);
  const BasisVector x1 = BasisVector::parse("100010001");
  const BasisVector x2 = BasisVector::parse("100010110");  // differs in qudit 2 only
  for (int j = 0; j < 2; ++j) {
    const auto t1 = model.conditional(x1, j);
    const auto t2 = model.conditional(x2, j);
    for (std::size_t v = 0; v < t1.allowed.size(); ++v) {
      CHECK(t1.log_prob[v] == t2.log_prob[v]);
      CHECK(t1.phase[v] == t2.phase[v]);
    }
  }
}

TEST_CASE("init_params is deterministic and leaves the sector fully supported") {
  AnqsModel a(QuditLayout::make(4, 4), SectorConstraint{2, false});
  AnqsModel b = a;
  a.init_params(9);
  b.init_params(9);
  CHECK(a.params() == b.params());
  b.init_params(10);
  CHECK(a.params() != b.params());

  const auto sector = qvmc::oracle::SectorBasis::enumerate(4, 2);
  for (const auto& x : sector.states)
    CHECK(std::exp(2.0 * a.log_psi(x).log_amp) > 0.0);
}

TEST_CASE("gradients match central finite differences") {
  AnqsModel model(QuditLayout::make(6, 3), SectorConstraint{2, false}, 12);
  qvmc::SequentialRng rng(31, 77);

  int points = 0;
  double worst_rel = 0.0;
  while (points < 8) {
    model.init_params(100 + static_cast<std::uint64_t>(points));
    // random sector state
    BasisVector x(6);
    int placed = 0;
    while (placed < 2) {
      const int i = static_cast<int>(rng.uniform_int(6));
      if (!x.bit(i)) {
        x.set_bit(i, true);
        ++placed;
      }
    }
    Eigen::VectorXcd row;
    model.grad_log_psi(x, row);
    const Eigen::VectorXd theta = model.params();

    for (int probe = 0; probe < 12; ++probe) {
      const auto c = static_cast<Eigen::Index>(
          rng.uniform_int(static_cast<std::uint64_t>(model.n_params())));
      const double fd_amp = qvmc::oracle::finite_difference(
          [&](const Eigen::VectorXd& t) {
            AnqsModel m = model;
            m.set_params(t);
            return m.log_psi(x).log_amp;
          },
          theta, c, 1e-5);
      const double fd_phase = qvmc::oracle::finite_difference(
          [&](const Eigen::VectorXd& t) {
            AnqsModel m = model;
            m.set_params(t);
            return m.log_psi(x).phase;
          },
          theta, c, 1e-5);
      // floor the denominator above the finite-difference noise level
      const double got_amp = row[c].real();
      const double got_phase = -row[c].imag();
      const double rel_amp =
          std::abs(got_amp - fd_amp) / std::max(1e-3, std::abs(fd_amp));
      const double rel_phase =
          std::abs(got_phase - fd_phase) / std::max(1e-3, std::abs(fd_phase));
      worst_rel = std::max({worst_rel, rel_amp, rel_phase});
    }
    ++points;
  }
  CHECK(worst_rel < 1e-5);

  // determinism: repeated evaluation is bit-identical
  model.init_params(100);
  const BasisVector x = BasisVector::parse("110000");
  Eigen::VectorXcd r1, r2;
  model.grad_log_psi(x, r1);
  model.grad_log_psi(x, r2);
  CHECK(r1 == r2);

  CHECK_THROWS_AS(model.grad_log_psi(BasisVector::parse("111000"), r1),
                  std::invalid_argument);
}

TEST_CASE("parameter blocks tile the flat vector exactly") {
  AnqsModel model(QuditLayout::make(10, 4), SectorConstraint{3, false}, 12);
  std::vector<char> covered(static_cast<std::size_t>(model.n_params()), 0);
  using H = AnqsModel::Head;
  using B = AnqsModel::Block;
  for (int j = 0; j < model.layout().count(); ++j)
    for (const auto head : {H::kAmplitude, H::kPhase})
      for (const auto block : {B::kW1, B::kB1, B::kW2, B::kB2, B::kW3, B::kB3}) {
        const auto [off, len] = model.param_range(j, head, block);
        for (int t = 0; t < len; ++t) {
          REQUIRE(off + t < model.n_params());
          CHECK(covered[static_cast<std::size_t>(off + t)] == 0);
          covered[static_cast<std::size_t>(off + t)] = 1;
        }
      }
  for (const char c : covered) CHECK(c == 1);
}

TEST_CASE("checkpoint round trip") {
  AnqsModel model(QuditLayout::make(10, 6), SectorConstraint{4, true}, 16);
  model.init_params(42);
  std::stringstream buf;
  model.save_checkpoint(buf, 42);

  const auto restored = qvmc::load_checkpoint(buf);
  CHECK(restored.seed == 42);
  CHECK(restored.model.params() == model.params());
  CHECK(restored.model.layout().sizes == model.layout().sizes);
  const BasisVector x = BasisVector::parse("1100000011");
  if (restored.model.in_sector(x)) {
    CHECK(restored.model.log_psi(x).log_amp == model.log_psi(x).log_amp);
  }
}
