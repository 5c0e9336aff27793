// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/hamiltonian.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

namespace qvmc {

namespace {

constexpr double kDropThreshold = 1e-12;

// i^q for q in 0..3
constexpr std::complex<double> kQuarterTurn[4] = {
    {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};

struct TermKey {
  BasisVector x, y, z;
  bool operator==(const TermKey&) const = default;
};

struct TermKeyHash {
  std::size_t operator()(const TermKey& k) const noexcept {
    std::size_t h = k.x.hash();
    h ^= k.y.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= k.z.hash() + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace

EncodedTerm encode_term(double coeff, std::string_view paulis) {
  const int n = static_cast<int>(paulis.size());
  EncodedTerm t;
  t.coeff = coeff;
  t.x_mask = BasisVector(n);
  t.y_mask = BasisVector(n);
  t.z_mask = BasisVector(n);
  for (int i = 0; i < n; ++i) {
    switch (paulis[static_cast<std::size_t>(i)]) {
      case 'I': break;
      case 'X': t.x_mask.set_bit(i, true); break;
      case 'Y': t.y_mask.set_bit(i, true); break;
      case 'Z': t.z_mask.set_bit(i, true); break;
      default:
        throw std::invalid_argument(
            std::string("encode_term: illegal Pauli character '") +
            paulis[static_cast<std::size_t>(i)] + "'");
    }
  }
  t.xy_mask = t.x_mask | t.y_mask;
  t.yz_mask = t.y_mask | t.z_mask;
  t.y_weight = t.y_mask.popcount();
  return t;
}

HamiltonianIndex HamiltonianIndex::from_terms(
    int n_qubits, std::span<const std::pair<double, std::string>> raw) {
  if (n_qubits < 1 || n_qubits > BasisVector::kMaxBits)
    throw std::invalid_argument("HamiltonianIndex: qubit count out of range");

  // merge duplicate strings, keeping first-occurrence order
  std::vector<EncodedTerm> merged;
  std::unordered_map<TermKey, std::size_t, TermKeyHash> seen;
  for (const auto& [coeff, paulis] : raw) {
    if (static_cast<int>(paulis.size()) != n_qubits)
      throw std::invalid_argument("HamiltonianIndex: pauli string length " +
                                  std::to_string(paulis.size()) + " != qubits " +
                                  std::to_string(n_qubits));
    EncodedTerm t = encode_term(coeff, paulis);
    TermKey key{t.x_mask, t.y_mask, t.z_mask};
    auto it = seen.find(key);
    if (it == seen.end()) {
      seen.emplace(key, merged.size());
      merged.push_back(std::move(t));
    } else {
      merged[it->second].coeff += coeff;
    }
  }

  HamiltonianIndex h;
  h.n_qubits_ = n_qubits;

  // group surviving terms by unique xy mask, first-occurrence order
  std::vector<std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < merged.size(); ++i) {
    if (std::abs(merged[i].coeff) < kDropThreshold) continue;
    auto it = h.xy_lookup_.find(merged[i].xy_mask);
    std::uint32_t g;
    if (it == h.xy_lookup_.end()) {
      g = static_cast<std::uint32_t>(h.xy_set_.size());
      h.xy_lookup_.emplace(merged[i].xy_mask, g);
      h.xy_set_.push_back(merged[i].xy_mask);
      members.emplace_back();
    } else {
      g = it->second;
    }
    members[g].push_back(i);
  }

  h.group_offsets_.assign(h.xy_set_.size() + 1, 0);
  for (std::size_t g = 0; g < members.size(); ++g) {
    h.group_offsets_[g] = h.terms_.size();
    for (std::size_t i : members[g]) h.terms_.push_back(merged[i]);
  }
  h.group_offsets_[members.size()] = h.terms_.size();

  const BasisVector zero(n_qubits);
  h.diagonal_xy_ = h.find_xy(zero);
  return h;
}

HamiltonianIndex HamiltonianIndex::parse(std::istream& in) {
  std::string line;
  int line_no = 0;
  int n_qubits = -1;
  std::vector<std::pair<double, std::string>> raw;

  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("hamiltonian line " + std::to_string(line_no) +
                             ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    // strip comments and surrounding whitespace
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    std::string body = line.substr(b, e - b + 1);

    if (n_qubits < 0) {
      std::istringstream ss(body);
      std::string tag;
      ss >> tag >> n_qubits;
      if (tag != "qubits:" || ss.fail() || n_qubits < 1 ||
          n_qubits > BasisVector::kMaxBits)
        fail("expected header 'qubits: <N>'");
      continue;
    }

    std::istringstream ss(body);
    std::string coeff_str, paulis, extra;
    ss >> coeff_str >> paulis;
    if (ss.fail() || paulis.empty()) fail("expected '<coeff> <pauli_string>'");
    if (ss >> extra) fail("trailing content '" + extra + "'");

    char* end = nullptr;
    const double coeff = std::strtod(coeff_str.c_str(), &end);
    if (end == coeff_str.c_str() || *end != '\0')
      fail("cannot parse coefficient '" + coeff_str + "' as a real number");
    if (!std::isfinite(coeff)) fail("non-finite coefficient");
    if (static_cast<int>(paulis.size()) != n_qubits)
      fail("pauli string has length " + std::to_string(paulis.size()) +
           ", expected " + std::to_string(n_qubits));
    for (char c : paulis)
      if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
        fail(std::string("illegal Pauli character '") + c + "'");
    raw.emplace_back(coeff, std::move(paulis));
  }
  if (n_qubits < 0) throw std::runtime_error("hamiltonian: missing 'qubits:' header");
  return from_terms(n_qubits, raw);
}

HamiltonianIndex HamiltonianIndex::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open hamiltonian file: " + path);
  return parse(in);
}

std::complex<double> HamiltonianIndex::matrix_element(const BasisVector& x,
                                                      const BasisVector& x_prime) const {
  const BasisVector xy = x ^ x_prime;
  const auto g = find_xy(xy);
  if (!g) return {0.0, 0.0};
  return group_element(x_prime, *g);
}

std::complex<double> HamiltonianIndex::group_element(const BasisVector& x_prime,
                                                     std::uint32_t xy_index) const {
  std::complex<double> sum{0.0, 0.0};
  for (const EncodedTerm& t : group(xy_index)) {
    const int q = (t.y_weight + 2 * and_popcount(x_prime, t.yz_mask)) & 3;
    sum += t.coeff * kQuarterTurn[q];
  }
  return sum;
}

Eigen::MatrixXcd HamiltonianIndex::dense_matrix() const {
  if (n_qubits_ > 16)
    throw std::invalid_argument("dense_matrix: limited to 16 qubits");
  using Mat2 = Eigen::Matrix2cd;
  const std::complex<double> j{0.0, 1.0};
  Mat2 I2 = Mat2::Identity();
  Mat2 X{{0, 1}, {1, 0}};
  Mat2 Y{{0, -j}, {j, 0}};
  Mat2 Z{{1, 0}, {0, -1}};

  const Eigen::Index dim = Eigen::Index{1} << n_qubits_;
  Eigen::MatrixXcd total = Eigen::MatrixXcd::Zero(dim, dim);
  for (const EncodedTerm& t : terms_) {
    // iterated Kronecker product, innermost factor first, so that qubit 0
    // ends up as the most significant index
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Ones(1, 1);
    for (int i = n_qubits_ - 1; i >= 0; --i) {
      const Mat2& p = t.x_mask.bit(i) ? X : t.y_mask.bit(i) ? Y
                      : t.z_mask.bit(i) ? Z : I2;
      Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
          next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = p(r, c) * m;
      m = std::move(next);
    }
    total += t.coeff * m;
  }
  return total;
}

}  // namespace qvmc
