// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace qvmc {
namespace oracle {

SectorBasis SectorBasis::enumerate(int n_qubits, std::optional<int> n_electrons,
                                   std::optional<int> n_spin_up) {
  if (n_qubits < 1 || n_qubits > 24)
    throw std::invalid_argument("SectorBasis: enumeration limited to 24 qubits");
  SectorBasis basis;
  basis.n_qubits = n_qubits;
  basis.n_electrons = n_electrons;
  basis.n_spin_up = n_spin_up;

  // ascending word order == the BasisVector total order for one word
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n_qubits); ++m) {
    BasisVector v(n_qubits);
    for (int i = 0; i < n_qubits; ++i)
      if ((m >> i) & 1) v.set_bit(i, true);
    if (n_electrons && v.popcount() != *n_electrons) continue;
    if (n_spin_up) {
      int up = 0;
      for (int i = 0; i < n_qubits; i += 2) up += v.bit(i) ? 1 : 0;
      if (up != *n_spin_up) continue;
    }
    basis.states.push_back(v);
  }
  return basis;
}

double exact_ground_energy(const HamiltonianIndex& index, const SectorBasis& sector) {
  const auto n = static_cast<Eigen::Index>(sector.states.size());
  if (n == 0) throw std::invalid_argument("exact_ground_energy: empty sector");
  if (n > 4096) throw std::invalid_argument("exact_ground_energy: sector too large");
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c)
      h(r, c) = index.matrix_element(sector.states[static_cast<std::size_t>(r)],
                                     sector.states[static_cast<std::size_t>(c)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success)
    throw std::runtime_error("exact_ground_energy: eigensolver failed");
  return eig.eigenvalues().minCoeff();
}

std::complex<double> full_local_energy(const BasisVector& x, const AnqsModel& model,
                                       const HamiltonianIndex& index) {
  const auto ax = model.log_psi(x);
  if (std::isinf(ax.log_amp))
    throw std::invalid_argument("full_local_energy: psi(x) is zero");
  std::complex<double> sum{0.0, 0.0};
  const auto& xy_set = index.xy_set();
  for (std::uint32_t g = 0; g < xy_set.size(); ++g) {
    const BasisVector xp = x ^ xy_set[g];
    const auto axp = model.log_psi(xp);
    if (std::isinf(axp.log_amp)) continue;  // psi(x') = 0 contributes nothing
    const std::complex<double> h = index.group_element(xp, g);
    const double dphase = axp.phase - ax.phase;
    sum += h * std::exp(axp.log_amp - ax.log_amp) *
           std::complex<double>(std::cos(dphase), std::sin(dphase));
  }
  return sum;
}

std::vector<std::size_t> sequential_swor(std::span<const double> probabilities, int k,
                                         SequentialRng& rng) {
  const std::size_t n = probabilities.size();
  if (k < 0 || static_cast<std::size_t>(k) > n)
    throw std::invalid_argument("sequential_swor: K exceeds the support");
  std::vector<double> p(probabilities.begin(), probabilities.end());
  double remaining = 0.0;
  for (double v : p) {
    if (v < 0.0) throw std::invalid_argument("sequential_swor: negative probability");
    remaining += v;
  }

  std::vector<std::size_t> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int draw = 0; draw < k; ++draw) {
    if (!(remaining > 0.0))
      throw std::runtime_error("sequential_swor: probability mass exhausted");
    const double u = rng.uniform() * remaining;
    double acc = 0.0;
    std::size_t pick = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (p[i] <= 0.0) continue;
      acc += p[i];
      if (u <= acc) {
        pick = i;
        break;
      }
    }
    if (pick == n) {  // numerical edge: take the last state with mass
      for (std::size_t i = n; i-- > 0;)
        if (p[i] > 0.0) {
          pick = i;
          break;
        }
    }
    out.push_back(pick);
    remaining -= p[pick];
    p[pick] = 0.0;
  }
  return out;
}

std::vector<BasisVector> sequential_swor(const AnqsModel& model, int k, SequentialRng& rng) {
  const SectorBasis sector = SectorBasis::enumerate(
      model.layout().n_qubits, model.sector().n_electrons,
      model.sector().spin_constraint ? std::optional<int>(model.sector().n_electrons / 2)
                                     : std::nullopt);
  std::vector<double> p(sector.states.size());
  for (std::size_t i = 0; i < sector.states.size(); ++i)
    p[i] = std::exp(2.0 * model.log_psi(sector.states[i]).log_amp);
  const auto picks = sequential_swor(p, k, rng);
  std::vector<BasisVector> out;
  out.reserve(picks.size());
  for (auto i : picks) out.push_back(sector.states[i]);
  return out;
}

double ipr(std::span<const double> probabilities) {
  double sum = 0.0, sq = 0.0;
  for (double p : probabilities) {
    sum += p;
    sq += p * p;
  }
  if (std::abs(sum - 1.0) > 1e-8)
    throw std::invalid_argument("ipr: probabilities sum to " + std::to_string(sum));
  return sq;
}

double finite_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                         const Eigen::VectorXd& theta, Eigen::Index coordinate,
                         double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference: step must be > 0");
  Eigen::VectorXd t = theta;
  t[coordinate] = theta[coordinate] + step;
  const double hi = f(t);
  t[coordinate] = theta[coordinate] - step;
  const double lo = f(t);
  if (!std::isfinite(hi) || !std::isfinite(lo))
    throw std::runtime_error("finite_difference: non-finite function value");
  return (hi - lo) / (2.0 * step);
}

}  // namespace oracle
}  // namespace qvmc
