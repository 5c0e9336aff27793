// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/checks.hpp"

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>

#include <Eigen/Dense>

#include "qvmc/coupling.hpp"
#include "qvmc/energy.hpp"
#include "qvmc/hamiltonian.hpp"
#include "qvmc/oracle.hpp"
#include "qvmc/sr.hpp"
#include "qvmc/synthetic.hpp"

namespace qvmc {
namespace checks {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ground energies of the committed fixtures, frozen from the dense oracle
struct FixtureRef {
  const char* file;
  int n_terms;
  int n_electrons;
  double ground;
};
constexpr FixtureRef kFixtureRefs[] = {
    {"toy.ham", 5, 2, 0.352105793356118},
    {"h2.ham", 15, 2, -1.137271563036},
    {"h4.ham", 185, 4, -2.175411140951},
    {"h6.ham", 919, 6, -3.244517333839},
};

bool approx(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

const char* toy_hamiltonian_text() {
  return "qubits: 4\n"
         "0.9 IIII\n"
         "0.1 IZZI\n"
         "-0.2 XIXI\n"
         "-0.2 IXIX\n"
         "0.3 IYYI\n";
}

SampleBatch make_toy_batch() {
  SampleBatch batch;
  batch.vectors = {BasisVector::parse("1100"), BasisVector::parse("1001"),
                   BasisVector::parse("0110")};
  // |psi|^2 proportional to (4, 1, 1), normalized
  batch.log_probs.resize(3);
  batch.log_probs << std::log(4.0 / 6.0), std::log(1.0 / 6.0), std::log(1.0 / 6.0);
  batch.log_amps.resize(3);
  batch.log_amps << std::log(2.0), 0.0, 0.0;
  batch.phases.resize(3);
  batch.phases << 0.0, 0.0, kPi;  // psi = (2, 1, -1)
  batch.norm = 1.0;
  batch.log_norm = 0.0;
  return batch;
}

double chi_square_statistic(std::span<const long> observed,
                            std::span<const double> expected_probs) {
  long total = 0;
  for (long o : observed) total += o;
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double expectation = expected_probs[i] * static_cast<double>(total);
    const double d = static_cast<double>(observed[i]) - expectation;
    stat += d * d / expectation;
  }
  return stat;
}

double chi_square_critical_99(int dof) {
  // 0.99 quantiles of the chi-square distribution
  static const std::map<int, double> table = {
      {1, 6.634897},  {2, 9.210340},  {3, 11.344867},  {4, 13.276704},
      {5, 15.086272}, {6, 16.811894}, {7, 18.475307},  {8, 20.090235},
      {9, 21.665994}, {10, 23.209251}, {11, 24.724970}, {12, 26.216967},
  };
  return table.at(dof);
}

AnqsModel make_four_state_model(const std::array<double, 4>& probs) {
  // one 4-bit qudit, single-particle sector: allowed values are the four
  // one-hot codes 8, 4, 2, 1 (states 1000, 0100, 0010, 0001)
  AnqsModel model(QuditLayout::make(4, 4), SectorConstraint{1, false});
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(model.n_params());
  const int b3 = model.param_range(0, AnqsModel::Head::kAmplitude,
                                   AnqsModel::Block::kB3).first;
  const int codes[4] = {8, 4, 2, 1};
  for (int i = 0; i < 4; ++i)
    theta[b3 + codes[i]] = 0.5 * std::log(probs[static_cast<std::size_t>(i)]);
  model.set_params(theta);
  return model;
}

namespace {

CheckResult check_toy_fixture() {
  CheckResult r{"toy fixture: matrix elements, pairs, local energies", false, ""};
  std::istringstream in(toy_hamiltonian_text());
  const HamiltonianIndex h = HamiltonianIndex::parse(in);
  std::ostringstream detail;

  bool ok = h.n_terms() == 5 && h.xy_set().size() == 4;
  const std::array<std::uint64_t, 4> want_xy = {0, 10, 5, 6};
  for (std::size_t g = 0; ok && g < 4; ++g)
    ok = h.xy_set()[g].dec_value() == want_xy[g];
  if (!ok) {
    r.detail = "term grouping mismatch";
    return r;
  }

  const SampleBatch batch = make_toy_batch();
  const auto& x0 = batch.vectors[0];
  const auto& x1 = batch.vectors[1];
  const auto& x2 = batch.vectors[2];
  ok = approx(h.matrix_element(x0, x0).real(), 0.8, 1e-12) &&
       approx(h.matrix_element(x0, x1).real(), -0.2, 1e-12) &&
       approx(h.matrix_element(x0, x2).real(), -0.2, 1e-12) &&
       approx(h.matrix_element(x1, x1).real(), 1.0, 1e-12) &&
       approx(h.matrix_element(x2, x2).real(), 1.0, 1e-12) &&
       std::abs(h.matrix_element(x1, x2)) == 0.0;
  if (!ok) {
    r.detail = "matrix element mismatch";
    return r;
  }

  const CoupledPairs pairs = loop_over_batch(batch.vectors, h);
  ok = pairs.entries.size() == 7;
  if (ok) {
    const Eigen::VectorXcd locals = local_energies(pairs, batch, h);
    detail << "locals = (" << locals[0].real() << ", " << locals[1].real() << ", "
           << locals[2].real() << ")";
    ok = approx(locals[0].real(), 0.8, 1e-12) && approx(locals[1].real(), 0.6, 1e-12) &&
         approx(locals[2].real(), 1.4, 1e-12);
    const EnergyReport report = variational_energy(batch, locals);
    ok = ok && approx(report.e_var, 5.2 / 6.0, 1e-12);
  }
  r.pass = ok;
  r.detail = detail.str();
  return r;
}

CheckResult check_backend_equivalence() {
  CheckResult r{"coupled-pair backends agree on random instances", false, ""};
  int instances = 0;
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    SequentialRng rng(seed, 0xBAC0);
    const int n = 4 + static_cast<int>(rng.uniform_int(37));
    const int n_terms = 1 + static_cast<int>(rng.uniform_int(60));
    const int n_unq = 1 + static_cast<int>(rng.uniform_int(100));
    const HamiltonianIndex h =
        random_hamiltonian(n, n_terms, seed, std::min(4, n));
    const auto batch = random_distinct_vectors(n, std::min(n_unq, 1 << std::min(n, 20)), seed);
    const CoupledPairs a = loop_over_terms(batch, h);
    const CoupledPairs b = loop_over_batch(batch, h);
    const CoupledPairs c = loop_over_trie(batch, h);
    auto same = [](const CoupledPairs& u, const CoupledPairs& v) {
      if (u.entries.size() != v.entries.size()) return false;
      for (std::size_t i = 0; i < u.entries.size(); ++i)
        if (u.entries[i].x != v.entries[i].x ||
            u.entries[i].x_prime != v.entries[i].x_prime ||
            u.entries[i].xy != v.entries[i].xy)
          return false;
      return true;
    };
    if (!same(a, b) || !same(a, c)) {
      r.detail = "mismatch at seed " + std::to_string(seed);
      return r;
    }
    ++instances;
  }
  r.pass = true;
  r.detail = std::to_string(instances) + " instances";
  return r;
}

CheckResult check_sampler_law() {
  CheckResult r{"sampler ranked law matches the sequential oracle", false, ""};
  const std::array<double, 4> p = {0.7, 0.2, 0.08, 0.02};
  const AnqsModel model = make_four_state_model(p);
  const CounterRng rng(2024, 0x53);

  const int trials = 100000;
  std::array<long, 4> first_counts{};
  std::array<long, 12> pair_counts{};
  std::map<std::uint64_t, int> state_of = {{8, 0}, {4, 1}, {2, 2}, {1, 3}};
  for (int t = 0; t < trials; ++t) {
    const SampleBatch batch = sample_without_replacement(
        model, 2, rng, static_cast<std::uint32_t>(t));
    const int a = state_of.at(batch.vectors[0].dec_value());
    const int b = state_of.at(batch.vectors[1].dec_value());
    ++first_counts[static_cast<std::size_t>(a)];
    ++pair_counts[static_cast<std::size_t>(a * 3 + (b > a ? b - 1 : b))];
  }

  // ranked-pair law of sampling without replacement
  std::array<double, 12> pair_probs{};
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) {
      if (a == b) continue;
      pair_probs[static_cast<std::size_t>(a * 3 + (b > a ? b - 1 : b))] =
          p[static_cast<std::size_t>(a)] * p[static_cast<std::size_t>(b)] /
          (1.0 - p[static_cast<std::size_t>(a)]);
    }

  const double s1 = chi_square_statistic(first_counts, p);
  const double s2 = chi_square_statistic(pair_counts, pair_probs);
  r.pass = s1 < chi_square_critical_99(3) && s2 < chi_square_critical_99(11);
  std::ostringstream detail;
  detail << "chi2(first) = " << s1 << " < " << chi_square_critical_99(3)
         << ", chi2(pair) = " << s2 << " < " << chi_square_critical_99(11);
  r.detail = detail.str();
  return r;
}

CheckResult check_gradients() {
  CheckResult r{"reverse-mode gradients match finite differences", false, ""};
  AnqsModel model(QuditLayout::make(6, 3), SectorConstraint{2, false}, 16);
  model.init_params(7);
  const BasisVector x = BasisVector::parse("100100");

  Eigen::VectorXcd row;
  model.grad_log_psi(x, row);
  const Eigen::VectorXd theta = model.params();

  double worst = 0.0;
  SequentialRng pick(3, 0x6e);
  for (int trial = 0; trial < 24; ++trial) {
    const auto c = static_cast<Eigen::Index>(pick.uniform_int(
        static_cast<std::uint64_t>(model.n_params())));
    const double fd_amp = oracle::finite_difference(
        [&](const Eigen::VectorXd& t) {
          AnqsModel m = model;
          m.set_params(t);
          return m.log_psi(x).log_amp;
        },
        theta, c, 1e-5);
    const double fd_phase = oracle::finite_difference(
        [&](const Eigen::VectorXd& t) {
          AnqsModel m = model;
          m.set_params(t);
          return m.log_psi(x).phase;
        },
        theta, c, 1e-5);
    worst = std::max(worst, std::abs(fd_amp - row[c].real()));
    worst = std::max(worst, std::abs(fd_phase + row[c].imag()));
  }
  r.pass = worst < 1e-7;
  r.detail = "max abs deviation " + std::to_string(worst);
  return r;
}

CheckResult check_sr_solve() {
  CheckResult r{"SR solve matches the dense regularised inverse", false, ""};
  const int n = 4, np = 3;
  SampleBatch batch;
  batch.vectors = random_distinct_vectors(4, n, 5);
  batch.log_probs.resize(n);
  batch.log_probs << std::log(0.4), std::log(0.3), std::log(0.2), std::log(0.1);
  batch.norm = 1.0;
  batch.log_norm = 0.0;

  SequentialRng rng(11, 0x5a);
  Eigen::MatrixXcd rows(n, np);
  Eigen::VectorXcd locals(n);
  for (int i = 0; i < n; ++i) {
    locals[i] = {rng.uniform_symmetric(1.0), rng.uniform_symmetric(0.1)};
    for (int q = 0; q < np; ++q)
      rows(i, q) = {rng.uniform_symmetric(1.0), rng.uniform_symmetric(1.0)};
  }
  const std::vector<int> selected = {0, 1, 2, 3};
  const SrContext ctx = build_sr_context(batch, locals, selected, rows, 1e-3);

  // dense references with the same subset weights
  Eigen::VectorXd w(n);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(batch.log_probs[i]);
  for (int i = 0; i < n; ++i) w[i] = std::exp(batch.log_probs[i]) / sum;

  Eigen::VectorXcd row_mean = Eigen::VectorXcd::Zero(np);
  std::complex<double> e_mean{0, 0};
  for (int i = 0; i < n; ++i) {
    row_mean += w[i] * rows.row(i).transpose();
    e_mean += w[i] * locals[i];
  }
  Eigen::MatrixXcd s_full = Eigen::MatrixXcd::Zero(np, np);
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXcd c = rows.row(i).transpose() - row_mean;  // O* deviations
    // S_pq = E[conj(O_p - <O_p>) (O_q - <O_q>)] with O = conj(row)
    s_full += w[i] * c * c.adjoint();
    grad += 2.0 * (w[i] * (locals[i] - e_mean) * c).real();
  }
  Eigen::MatrixXd lhs = s_full.real();
  lhs.diagonal().array() += ctx.lambda;
  const Eigen::VectorXd want = lhs.ldlt().solve(grad);
  const Eigen::VectorXd got = sr_direction(ctx, grad);
  const double err = (want - got).norm();
  r.pass = err < 1e-10;
  r.detail = "deviation " + std::to_string(err);
  return r;
}

CheckResult check_ipr() {
  CheckResult r{"inverse participation ratio extremes", false, ""};
  std::vector<double> delta = {1.0, 0.0, 0.0, 0.0};
  std::vector<double> uniform(16, 1.0 / 16.0);
  std::vector<double> toy = {4.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0};
  r.pass = oracle::ipr(delta) == 1.0 && oracle::ipr(uniform) == 1.0 / 16.0 &&
           approx(oracle::ipr(toy), 0.5, 1e-15);
  return r;
}

CheckResult check_fixture_file(const std::string& dir, const FixtureRef& ref) {
  CheckResult r{std::string("fixture ") + ref.file, false, ""};
  try {
    const HamiltonianIndex h = HamiltonianIndex::load(dir + "/" + ref.file);
    if (static_cast<int>(h.n_terms()) != ref.n_terms) {
      r.detail = "expected " + std::to_string(ref.n_terms) + " terms, parsed " +
                 std::to_string(h.n_terms());
      return r;
    }
    const auto sector = oracle::SectorBasis::enumerate(h.n_qubits(), ref.n_electrons);
    const double e0 = oracle::exact_ground_energy(h, sector);
    r.pass = approx(e0, ref.ground, 1e-9);
    r.detail = "ground " + std::to_string(e0);
  } catch (const std::exception& e) {
    r.detail = e.what();
  }
  return r;
}

}  // namespace

std::vector<CheckResult> run_validation_checks(const std::string& fixtures_dir) {
  std::vector<CheckResult> results;
  results.push_back(check_toy_fixture());
  results.push_back(check_backend_equivalence());
  results.push_back(check_sampler_law());
  results.push_back(check_gradients());
  results.push_back(check_sr_solve());
  results.push_back(check_ipr());
  if (!fixtures_dir.empty())
    for (const auto& ref : kFixtureRefs)
      results.push_back(check_fixture_file(fixtures_dir, ref));
  return results;
}

}  // namespace checks
}  // namespace qvmc
