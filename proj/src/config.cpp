// Copyright 2026 The qvmc Authors
// SPDX-License-Identifier: Apache-2.0

#include "qvmc/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace qvmc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, int line) {
  if (v == "true" || v == "on" || v == "1") return true;
  if (v == "false" || v == "off" || v == "0") return false;
  throw std::runtime_error("config line " + std::to_string(line) +
                           ": expected a boolean, got '" + v + "'");
}

long parse_long(const std::string& v, int line) {
  char* end = nullptr;
  const long x = std::strtol(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config line " + std::to_string(line) +
                             ": expected an integer, got '" + v + "'");
  return x;
}

double parse_double(const std::string& v, int line) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw std::runtime_error("config line " + std::to_string(line) +
                             ": expected a number, got '" + v + "'");
  return x;
}

}  // namespace

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::runtime_error("config: " + msg); };
  if (hamiltonian_path.empty()) fail("hamiltonian path is required");
  if (n_electrons < 0) fail("n_electrons is required and must be non-negative");
  if (bits_per_qudit < 1 || bits_per_qudit > 8) fail("bits_per_qudit must be in [1, 8]");
  if (n_unq < 1) fail("n_unq must be positive");
  if (n_unq_sr < 1) fail("n_unq_sr must be positive");
  if (n_unq_sr > n_unq) fail("n_unq_sr must not exceed n_unq");
  if (learning_rate <= 0) fail("learning_rate must be positive");
  if (iterations < 0) fail("iterations must be non-negative");
  if (threads < 1) fail("threads must be positive");
  if (spin_constraint && n_electrons % 2 != 0)
    fail("the spin constraint requires an even electron count");
}

RunConfig RunConfig::from_string(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": expected 'key = value'");
    const std::string key = trim(body.substr(0, eq));
    const std::string val = trim(body.substr(eq + 1));

    if (key == "hamiltonian") cfg.hamiltonian_path = val;
    else if (key == "n_electrons") cfg.n_electrons = static_cast<int>(parse_long(val, line_no));
    else if (key == "spin_constraint") cfg.spin_constraint = parse_bool(val, line_no);
    else if (key == "bits_per_qudit") cfg.bits_per_qudit = static_cast<int>(parse_long(val, line_no));
    else if (key == "n_unq") cfg.n_unq = static_cast<int>(parse_long(val, line_no));
    else if (key == "n_unq_sr") cfg.n_unq_sr = static_cast<int>(parse_long(val, line_no));
    else if (key == "sr_enabled") cfg.sr_enabled = parse_bool(val, line_no);
    else if (key == "sr_lambda") cfg.sr_lambda = parse_double(val, line_no);
    else if (key == "sr_iterations") cfg.sr_iterations = parse_long(val, line_no);
    else if (key == "learning_rate") cfg.learning_rate = parse_double(val, line_no);
    else if (key == "beta1") cfg.beta1 = parse_double(val, line_no);
    else if (key == "beta2") cfg.beta2 = parse_double(val, line_no);
    else if (key == "epsilon") cfg.epsilon = parse_double(val, line_no);
    else if (key == "iterations") cfg.iterations = parse_long(val, line_no);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_long(val, line_no));
    else if (key == "backend") cfg.backend = parse_backend(val);
    else if (key == "auto_batch_threshold") cfg.auto_batch_threshold = static_cast<int>(parse_long(val, line_no));
    else if (key == "output_dir") cfg.output_dir = val;
    else if (key == "run_name") cfg.run_name = val;
    else if (key == "threads") cfg.threads = static_cast<int>(parse_long(val, line_no));
    else if (key == "trace_timings") cfg.trace_timings = parse_bool(val, line_no);
    else
      throw std::runtime_error("config line " + std::to_string(line_no) +
                               ": unknown key '" + key + "'");
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

}  // namespace qvmc
