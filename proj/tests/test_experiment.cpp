// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "nomacomp/experiment.hpp"
#include "test_helpers.hpp"

using namespace nomacomp;
namespace fs = std::filesystem;

namespace {

Experiment small_convergence() {
  NetworkConfig cfg = testing::small_config(2, 3, 2, 30.0);
  cfg.path_loss_exponent = 4.0;
  Experiment exp = default_experiment(ExperimentKind::convergence, cfg);
  exp.trials = 4;
  return exp;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NOMACOMP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (auto k : {ExperimentKind::convergence, ExperimentKind::rank_table, ExperimentKind::sweep_snr,
                 ExperimentKind::sweep_cells, ExperimentKind::sweep_alpha, ExperimentKind::sweep_clusters,
                 ExperimentKind::oracle_compare}) {
    CHECK(parse_kind(to_string(k)) == k);
  }
  CHECK_FALSE(parse_kind("sweep_everything"));
}

TEST_CASE("default sweeps") {
  const NetworkConfig base;
  const Experiment snr = default_experiment(ExperimentKind::sweep_snr, base);
  CHECK(snr.sweep_parameter == "transmit_snr_db");
  CHECK(snr.sweep_values == std::vector<double>{0, 10, 20, 30, 40, 50});
  CHECK(snr.schemes.size() == 4);
  const Experiment clusters = default_experiment(ExperimentKind::sweep_clusters, base);
  CHECK(clusters.sweep_values.size() == static_cast<std::size_t>(base.antennas_per_bs));
}

TEST_CASE("shortest round-trip formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5}) {
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_double(0.2) == "0.2");
  CHECK(format_double(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("parameter overrides") {
  const NetworkConfig base;
  CHECK(with_parameter(base, "antennas_per_bs", 8).antennas_per_bs == 8);
  CHECK(with_parameter(base, "transmit_snr_db", 12.5).transmit_snr_db == 12.5);
  CHECK_THROWS_AS(with_parameter(base, "antennas_per_bs", 8.5), ConfigError);
  CHECK_THROWS_AS(with_parameter(base, "clusters_per_cell", 9), ConfigError);
}

TEST_CASE("experiment validation") {
  Experiment exp = default_experiment(ExperimentKind::sweep_snr, NetworkConfig{});
  CHECK(validate_experiment(exp).empty());
  exp.schemes.push_back(Scheme::brute_force);
  CHECK_FALSE(validate_experiment(exp).empty());
  exp = default_experiment(ExperimentKind::sweep_cells, NetworkConfig{});
  exp.sweep_values = {2, 0};
  CHECK_FALSE(validate_experiment(exp).empty());
  exp.sweep_values.clear();
  exp.trials = 0;
  CHECK(validate_experiment(exp).size() == 2);
}

TEST_CASE("results do not depend on the worker count") {
  Experiment exp = small_convergence();
  exp.threads = 1;
  const ExperimentResult one = run_experiment(exp);
  exp.threads = 3;
  const ExperimentResult three = run_experiment(exp);
  CHECK(results_csv(exp, one) == results_csv(exp, three));
  CHECK(trace_csv(exp, one) == trace_csv(exp, three));
  CHECK(summary_csv(exp, one) == summary_csv(exp, three));
  REQUIRE(one.rows.size() == 4);
  CHECK(one.summaries.size() == 1);
  for (const auto& r : one.rows) CHECK(r.record.wall_time_ms == 0.0);
}

TEST_CASE("results CSV layout") {
  Experiment exp = small_convergence();
  exp.trials = 2;
  const std::string csv = results_csv(exp, run_experiment(exp));
  std::istringstream in(csv);
  std::string header, line;
  std::getline(in, header);
  CHECK(header == "sweep_value,scheme,trial,seed,sum_rate_group1,feasible,qos_violations,iterations,min_R_lambda,"
                  "wall_time_ms");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind(",NOMA_CoMP,", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
  }
  CHECK(rows == 2);
}

TEST_CASE("outputs are written next to the result file") {
  const fs::path dir = fs::temp_directory_path() / "nomacomp_experiment_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Experiment exp = small_convergence();
  exp.trials = 1;
  exp.output_path = dir / "conv.csv";
  write_outputs(exp, run_experiment(exp));
  CHECK(fs::exists(dir / "conv.csv"));
  CHECK(fs::exists(dir / "conv.summary.csv"));
  CHECK(fs::exists(dir / "conv.trace.csv"));
  const std::string meta = read_file(dir / "conv.meta.json");
  CHECK(meta.find("\"kind\"") != std::string::npos);
  CHECK(meta.find("convergence") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = fs::temp_directory_path() / "nomacomp_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "good.json") << R"({"num_cells": 2, "antennas_per_bs": 3, "clusters_per_cell": 2,
    "transmit_snr_db": 30, "sinr_target": 0.2, "path_loss_exponent": 4})";
  std::ofstream(dir / "bad.json") << R"({"num_cells": 2, "antennas_per_bs": 4, "clusters_per_cell": 5,
    "transmit_snr_db": 30, "sinr_target": 0.2, "path_loss_exponent": 4})";
  const std::string out = (dir / "r.csv").string();

  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("convergence --config " + (dir / "bad.json").string()) == 2);
  CHECK(run_cli("convergence --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_cli("convergence") == 2);
  CHECK(run_cli("sweep_snr --config " + (dir / "good.json").string() + " --schemes Bogus") == 2);
  CHECK(run_cli("convergence --trials 1 --config " + (dir / "good.json").string() + " --out " + out) == 0);
  CHECK(fs::exists(out));
  fs::remove_all(dir);
}
