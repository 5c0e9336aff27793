// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qvmc/parallel.hpp"

namespace qvmc {

double condition_max(double parent_perturbed, double z, double child_perturbed) {
  if (child_perturbed == z) return parent_perturbed;
  const double m = std::max(-parent_perturbed, -child_perturbed);
  const double v = std::exp(-parent_perturbed - m) - std::exp(-z - m) +
                   std::exp(-child_perturbed - m);
  if (!(v > 0.0)) return parent_perturbed;  // total cancellation edge
  const double r = -(m + std::log(v));
  return std::min(r, parent_perturbed);
}

namespace {

struct ChildLess {
  // descending conditioned value, ties by prefix order
  bool operator()(const BeamEntry& a, const BeamEntry& b) const {
    if (a.perturbed != b.perturbed) return a.perturbed > b.perturbed;
    return a.prefix < b.prefix;
  }
};

}  // namespace

SampleBatch sample_without_replacement(const AnqsModel& model, int k_samples,
                                       const CounterRng& rng, std::uint32_t iteration,
                                       int threads) {
  if (k_samples < 1)
    throw std::invalid_argument("sample_without_replacement: K must be >= 1");
  const QuditLayout& layout = model.layout();

  std::vector<BeamEntry> beam;
  beam.push_back(BeamEntry{BasisVector(layout.n_qubits), 0.0, 0.0});

  std::vector<std::vector<BeamEntry>> expanded;
  std::vector<BeamEntry> children;
  for (int level = 0; level < layout.count(); ++level) {
    const int offset = layout.offsets[static_cast<std::size_t>(level)];
    const int k = layout.sizes[static_cast<std::size_t>(level)];

    expanded.assign(beam.size(), {});
    parallel_for(static_cast<int>(beam.size()), threads, [&](int b) {
      const BeamEntry& parent = beam[static_cast<std::size_t>(b)];
      const ConditionalTable cond = model.conditional(parent.prefix, level);
      auto& out = expanded[static_cast<std::size_t>(b)];

      // unconditioned perturbed values first; their maximum feeds the
      // conditioning formula
      double z = -std::numeric_limits<double>::infinity();
      for (std::uint32_t v = 0; v < cond.allowed.size(); ++v) {
        if (!cond.allowed[v]) continue;
        BeamEntry child;
        child.prefix = parent.prefix;
        deposit_bits(child.prefix, offset, k, v);
        child.log_prob = parent.log_prob + cond.log_prob[v];
        child.perturbed = child.log_prob +
                          rng.gumbel(iteration, static_cast<std::uint32_t>(level),
                                     static_cast<std::uint32_t>(b), v);
        z = std::max(z, child.perturbed);
        out.push_back(std::move(child));
      }
      for (auto& child : out)
        child.perturbed = condition_max(parent.perturbed, z, child.perturbed);
    });

    children.clear();
    for (auto& group : expanded)
      children.insert(children.end(), group.begin(), group.end());
    if (children.empty())
      throw std::runtime_error("sample_without_replacement: empty sector");

    // partial selection: keep the top K by conditioned perturbed value
    if (static_cast<int>(children.size()) > k_samples) {
      std::nth_element(children.begin(), children.begin() + k_samples, children.end(),
                       ChildLess{});
      children.resize(static_cast<std::size_t>(k_samples));
    }
    std::sort(children.begin(), children.end(), ChildLess{});
    beam.swap(children);
  }

  SampleBatch batch;
  batch.vectors.reserve(beam.size());
  batch.log_probs.resize(static_cast<Eigen::Index>(beam.size()));
  for (std::size_t i = 0; i < beam.size(); ++i) {
    batch.vectors.push_back(beam[i].prefix);
    batch.log_probs[static_cast<Eigen::Index>(i)] = beam[i].log_prob;
  }
  return batch;
}

void fill_amplitudes(SampleBatch& batch, const AnqsModel& model, int threads) {
  const int n = batch.size();
  batch.log_amps.resize(n);
  batch.phases.resize(n);
  parallel_for(n, threads, [&](int i) {
    const auto amp = model.log_psi(batch.vectors[static_cast<std::size_t>(i)]);
    batch.log_amps[i] = amp.log_amp;
    batch.phases[i] = amp.phase;
  });

  double mx = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) mx = std::max(mx, batch.log_probs[i]);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += std::exp(batch.log_probs[i] - mx);
  batch.log_norm = mx + std::log(sum);
  batch.norm = std::exp(batch.log_norm);
}

}  // namespace qvmc
