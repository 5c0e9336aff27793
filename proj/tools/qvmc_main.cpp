// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qvmc/checks.hpp"
#include "qvmc/config.hpp"
#include "qvmc/coupling.hpp"
#include "qvmc/optimizer.hpp"
#include "qvmc/synthetic.hpp"

namespace {

using nlohmann::json;

std::string output_dir(const qvmc::RunConfig& cfg) {
  if (const char* env = std::getenv("QVMC_OUTPUT_DIR"); env && *env) return env;
  return cfg.output_dir;
}

void write_trace_header(std::ostream& out) {
  out << "iteration,e_var,norm,n_unq,ipr,t_sampling,t_amplitudes,"
         "t_find_coupled_pairs,t_matrix_elements,t_gradient,t_sr,t_update\n";
}

void write_trace_row(std::ostream& out, const qvmc::IterationRecord& rec,
                     bool with_timings) {
  const auto& t = rec.times;
  out.precision(17);
  out << rec.iteration << ',' << rec.e_var << ',' << rec.norm << ',' << rec.n_unq
      << ',' << rec.ipr;
  if (with_timings) {
    out.precision(6);
    out << ',' << t.sampling << ',' << t.amplitudes << ',' << t.find_coupled_pairs
        << ',' << t.matrix_elements << ',' << t.gradient << ',' << t.sr << ','
        << t.update << '\n';
  } else {
    out << ",0,0,0,0,0,0,0\n";
  }
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<int> threads, std::optional<std::string> backend) {
  qvmc::RunConfig cfg = qvmc::RunConfig::from_file(config_path);
  if (seed) cfg.seed = *seed;
  if (threads) cfg.threads = *threads;
  if (backend) cfg.backend = qvmc::parse_backend(*backend);
  cfg.validate();
  if (!std::filesystem::exists(cfg.hamiltonian_path)) {
    std::cerr << "error: hamiltonian file not found: " << cfg.hamiltonian_path << "\n";
    return 2;
  }

  const std::string dir = output_dir(cfg);
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + cfg.run_name;
  std::ofstream trace(base + "_trace.csv");
  if (!trace) {
    std::cerr << "error: cannot write " << base << "_trace.csv\n";
    return 2;
  }
  write_trace_header(trace);

  const auto t0 = std::chrono::steady_clock::now();
  const qvmc::HamiltonianIndex index = qvmc::HamiltonianIndex::load(cfg.hamiltonian_path);
  qvmc::AnqsModel model(qvmc::QuditLayout::make(index.n_qubits(), cfg.bits_per_qudit),
                        qvmc::SectorConstraint{cfg.n_electrons, cfg.spin_constraint});
  model.init_params(cfg.seed);

  const qvmc::RunResult result = qvmc::run_optimisation(
      index, model, cfg,
      [&](const qvmc::IterationRecord& rec) { write_trace_row(trace, rec, cfg.trace_timings); });
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // checkpoint of the best iterate
  qvmc::AnqsModel best(qvmc::QuditLayout::make(index.n_qubits(), cfg.bits_per_qudit),
                       qvmc::SectorConstraint{cfg.n_electrons, cfg.spin_constraint});
  best.set_params(result.best_params.size() > 0 ? result.best_params : model.params());
  std::ofstream ckpt(base + "_checkpoint.txt");
  best.save_checkpoint(ckpt, cfg.seed);

  json summary;
  summary["best_e_var"] = result.best_e_var;
  summary["best_iteration"] = result.best_iteration;
  summary["iterations"] = static_cast<long>(result.trace.size());
  summary["wall_time_seconds"] = wall;
  summary["final_e_var"] = result.trace.back().e_var;
  summary["final_ipr"] = result.trace.back().ipr;
  summary["final_norm"] = result.trace.back().norm;
  summary["n_unq"] = cfg.n_unq;
  summary["seed"] = cfg.seed;
  summary["hamiltonian"] = cfg.hamiltonian_path;
  summary["trace"] = base + "_trace.csv";
  summary["checkpoint"] = base + "_checkpoint.txt";
  std::ofstream sum(base + "_summary.json");
  sum << summary.dump(2) << "\n";

  std::cout << "best E_var " << result.best_e_var << " at iteration "
            << result.best_iteration << " (" << wall << " s)\n";
  return 0;
}

int cmd_bench(const std::string& config_path, std::optional<std::uint64_t> seed_opt) {
  // line-based sweep config: n_qubits, n_terms list, n_unq list, seed
  std::ifstream in(config_path);
  if (!in) {
    std::cerr << "error: cannot open bench config: " << config_path << "\n";
    return 2;
  }
  int n_qubits = 20;
  std::vector<int> term_counts = {200};
  std::vector<int> unq_counts = {256, 1024, 4096};
  std::uint64_t seed = 1;
  std::string out_path = "bench.csv";

  std::string line;
  int line_no = 0;
  auto parse_list = [](const std::string& v) {
    std::vector<int> out;
    std::istringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stoi(tok));
    return out;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string::npos) return std::string();
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key == "n_qubits") n_qubits = std::stoi(val);
    else if (key == "n_terms") term_counts = parse_list(val);
    else if (key == "n_unq") unq_counts = parse_list(val);
    else if (key == "seed") seed = std::stoull(val);
    else if (key == "output") out_path = val;
    else {
      std::cerr << "error: bench config line " << line_no << ": unknown key '" << key
                << "'\n";
      return 2;
    }
  }
  if (seed_opt) seed = *seed_opt;

  std::ofstream out(out_path);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return 2;
  }
  out << "backend,N,N_T,N_unq,seconds,ops,pairs\n";
  for (const int n_terms : term_counts) {
    const qvmc::HamiltonianIndex h =
        qvmc::random_hamiltonian(n_qubits, n_terms, seed, std::min(4, n_qubits));
    for (const int n_unq : unq_counts) {
      const auto batch = qvmc::random_distinct_vectors(n_qubits, n_unq, seed + 17);
      for (const auto backend : {qvmc::CouplingBackend::kTerms,
                                 qvmc::CouplingBackend::kBatch,
                                 qvmc::CouplingBackend::kTrie}) {
        qvmc::CouplingOptions opt;
        opt.backend = backend;
        const auto t0 = std::chrono::steady_clock::now();
        const qvmc::CoupledPairs pairs = qvmc::find_coupled_pairs(batch, h, opt);
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out << qvmc::backend_name(backend) << ',' << n_qubits << ',' << h.n_terms()
            << ',' << n_unq << ',' << secs << ',' << pairs.ops << ','
            << pairs.entries.size() << '\n';
      }
    }
  }
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

int cmd_validate(const std::string& fixtures_dir) {
  std::string dir = fixtures_dir;
  if (dir.empty() && std::filesystem::exists("fixtures/toy.ham")) dir = "fixtures";
  const auto results = qvmc::checks::run_validation_checks(dir);
  bool all = true;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  for (const auto& r : results) {
    all = all && r.pass;
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name
              << std::string(width - r.name.size() + 2, ' ') << r.detail << "\n";
  }
  std::cout << (all ? "validation passed" : "validation FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"variational ground-state search for qubit-mapped Hamiltonians"};
  app.require_subcommand(1);

  std::string config_path;
  std::string fixtures_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::optional<std::string> backend;

  auto* run = app.add_subcommand("run", "optimise a model against a Hamiltonian file");
  run->add_option("--config", config_path, "run config file")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--threads", threads, "override the config thread count");
  run->add_option("--backend", backend, "coupled-pair backend: terms|batch|trie|auto");

  auto* bench = app.add_subcommand("bench", "benchmark the coupled-pair backends");
  bench->add_option("--config", config_path, "bench sweep config file")->required();
  bench->add_option("--seed", seed, "override the sweep seed");

  auto* validate = app.add_subcommand("validate", "run the oracle comparison suite");
  validate->add_option("--fixtures", fixtures_dir, "directory with committed fixtures");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run)) return cmd_run(config_path, seed, threads, backend);
    if (app.got_subcommand(bench)) return cmd_bench(config_path, seed);
    if (app.got_subcommand(validate)) return cmd_validate(fixtures_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
