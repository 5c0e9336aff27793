// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qvmc/config.hpp"
#include "qvmc/model.hpp"

namespace fs = std::filesystem;

namespace {

int run_command(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qvmc_cli_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int counter;
};
int TempDir::counter = 0;

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("config parsing and validation") {
  const auto cfg = qvmc::RunConfig::from_string(
      "hamiltonian = a.ham\n"
      "n_electrons = 2\n"
      "n_unq = 32   # inline comment\n"
      "n_unq_sr = 16\n"
      "backend = trie\n"
      "trace_timings = off\n");
  CHECK(cfg.hamiltonian_path == "a.ham");
  CHECK(cfg.n_unq == 32);
  CHECK(cfg.backend == qvmc::CouplingBackend::kTrie);
  CHECK_FALSE(cfg.trace_timings);
  cfg.validate();

  CHECK_THROWS_WITH_AS(qvmc::RunConfig::from_string("mystery = 1\n"),
                       doctest::Contains("unknown key"), std::runtime_error);
  auto bad = cfg;
  bad.n_unq_sr = 64;
  CHECK_THROWS_AS(bad.validate(), std::runtime_error);
}

TEST_CASE("run subcommand: outputs re-parse and reproduce byte-for-byte") {
  TempDir dir;
  const std::string ham = std::string(QVMC_FIXTURE_DIR) + "/toy.ham";
  const std::string config_text =
      "hamiltonian = " + ham + "\n" +
      "n_electrons = 2\nbits_per_qudit = 4\nn_unq = 6\nn_unq_sr = 6\n"
      "iterations = 25\nseed = 11\ntrace_timings = off\n"
      "output_dir = " + dir.path.string() + "\n";

  const fs::path cfg_a = dir.path / "a.cfg";
  std::ofstream(cfg_a) << config_text << "run_name = a\n";
  const fs::path cfg_b = dir.path / "b.cfg";
  std::ofstream(cfg_b) << config_text << "run_name = b\n";

  const std::string exe = QVMC_CLI_PATH;
  REQUIRE(run_command(exe + " run --config " + cfg_a.string() + " > /dev/null") == 0);
  REQUIRE(run_command(exe + " run --config " + cfg_b.string() + " > /dev/null") == 0);

  // identical config + seed => byte-identical trace
  const std::string trace_a = slurp(dir.path / "a_trace.csv");
  const std::string trace_b = slurp(dir.path / "b_trace.csv");
  CHECK(trace_a == trace_b);

  // trace re-parses with the declared columns
  const auto rows = parse_csv(trace_a);
  REQUIRE(rows.size() == 26);  // header + 25 records
  CHECK(rows[0][0] == "iteration");
  CHECK(rows[0].size() == 12);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    REQUIRE(rows[r].size() == 12);
    CHECK(std::stol(rows[r][0]) == static_cast<long>(r - 1));
    CHECK(std::isfinite(std::stod(rows[r][1])));
  }

  // summary JSON re-parses and is consistent with the trace
  const auto summary = nlohmann::json::parse(slurp(dir.path / "a_summary.json"));
  CHECK(summary["iterations"] == 25);
  CHECK(summary["seed"] == 11);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 1; r < rows.size(); ++r)
    best = std::min(best, std::stod(rows[r][1]));
  CHECK(summary["best_e_var"].get<double>() == doctest::Approx(best).epsilon(1e-15));

  // checkpoint re-loads
  std::ifstream ck(dir.path / "a_checkpoint.txt");
  const auto restored = qvmc::load_checkpoint(ck);
  CHECK(restored.seed == 11);
  CHECK(restored.model.layout().n_qubits == 4);
}

TEST_CASE("run subcommand: zero iterations and missing file") {
  TempDir dir;
  const std::string exe = QVMC_CLI_PATH;
  const std::string ham = std::string(QVMC_FIXTURE_DIR) + "/toy.ham";

  const fs::path cfg = dir.path / "zero.cfg";
  std::ofstream(cfg) << "hamiltonian = " << ham
                     << "\nn_electrons = 2\nbits_per_qudit = 4\nn_unq = 6\n"
                        "n_unq_sr = 6\niterations = 0\nrun_name = zero\noutput_dir = "
                     << dir.path.string() << "\n";
  REQUIRE(run_command(exe + " run --config " + cfg.string() + " > /dev/null") == 0);
  const auto rows = parse_csv(slurp(dir.path / "zero_trace.csv"));
  CHECK(rows.size() == 2);  // header + the initial evaluation

  const fs::path missing = dir.path / "missing.cfg";
  std::ofstream(missing) << "hamiltonian = " << (dir.path / "nope.ham").string()
                         << "\nn_electrons = 2\n";
  CHECK(run_command(exe + " run --config " + missing.string() + " 2> " +
                    (dir.path / "err.txt").string()) == 2);
  CHECK(slurp(dir.path / "err.txt").find("nope.ham") != std::string::npos);

  // the environment variable redirects every output file
  const fs::path redirected = dir.path / "env_out";
  REQUIRE(run_command("QVMC_OUTPUT_DIR=" + redirected.string() + " " + exe +
                      " run --config " + cfg.string() + " > /dev/null") == 0);
  CHECK(fs::exists(redirected / "zero_trace.csv"));
  CHECK(fs::exists(redirected / "zero_summary.json"));
}

TEST_CASE("bench subcommand emits one row per backend and sweep point") {
  TempDir dir;
  const std::string exe = QVMC_CLI_PATH;
  const fs::path cfg = dir.path / "bench.cfg";
  const fs::path out = dir.path / "bench.csv";
  std::ofstream(cfg) << "n_qubits = 16\nn_terms = 64\nn_unq = 32,64,128\nseed = 5\n"
                     << "output = " << out.string() << "\n";
  REQUIRE(run_command(exe + " bench --config " + cfg.string() + " > /dev/null") == 0);

  const auto rows = parse_csv(slurp(out));
  REQUIRE(rows.size() == 10);  // header + 3 sweep points x 3 backends
  CHECK(rows[0][0] == "backend");
  for (std::size_t base = 1; base < rows.size(); base += 3) {
    // all backends agree on the pair count for one sweep point
    CHECK(rows[base][6] == rows[base + 1][6]);
    CHECK(rows[base][6] == rows[base + 2][6]);
  }
}

TEST_CASE("validate subcommand: green on the shipped fixtures, red on corruption") {
  const std::string exe = QVMC_CLI_PATH;
  CHECK(run_command(exe + " validate --fixtures " + QVMC_FIXTURE_DIR +
                    " > /dev/null") == 0);

  TempDir dir;
  for (const char* name : {"toy.ham", "h2.ham", "h4.ham", "h6.ham"})
    fs::copy_file(fs::path(QVMC_FIXTURE_DIR) / name, dir.path / name);
  std::ofstream(dir.path / "toy.ham", std::ios::app) << "0.5 XXXX\n";  // corrupt
  const fs::path log = dir.path / "validate.log";
  CHECK(run_command(exe + " validate --fixtures " + dir.path.string() + " > " +
                    log.string()) == 1);
  const std::string text = slurp(log);
  CHECK(text.find("[FAIL] fixture toy.ham") != std::string::npos);
}
