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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nomacomp/baselines.hpp"
#include "nomacomp/config.hpp"
#include "nomacomp/evaluation.hpp"

namespace nomacomp {

enum class ExperimentKind { convergence, rank_table, sweep_snr, sweep_cells, sweep_alpha, sweep_clusters, oracle_compare };

const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_kind(std::string_view name);

struct Experiment {
  ExperimentKind kind = ExperimentKind::sweep_snr;
  NetworkConfig base;
  // NetworkConfig field swept over; empty for a single point.
  std::string sweep_parameter;
  std::vector<double> sweep_values;
  std::vector<Scheme> schemes;
  int trials = 100;
  std::filesystem::path output_path;
  int threads = 1;
  bool record_timing = false;
};

/// Experiment with the kind's default sweep axis and schemes.
Experiment default_experiment(ExperimentKind kind, const NetworkConfig& base);

/// Problems with the experiment as a whole (sweep values, scheme mix).
std::vector<std::string> validate_experiment(const Experiment& exp);

/// Copy of config with one field set; integral fields require integral values.
NetworkConfig with_parameter(const NetworkConfig& config, std::string_view name, double value);

struct TraceRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::noma_comp;
  int trial = 0;
  IterationRecord record;
};

struct ResultRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::noma_comp;
  TrialRecord record;
  bool converged = false;
  double total_power_fraction = 0.0;  // sum over BSs of sum_k tr(Q) / (N P)
};

struct SummaryRow {
  double sweep_value = 0.0;
  Scheme scheme = Scheme::noma_comp;
  Summary summary;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // by sweep point, trial, then scheme
  std::vector<TraceRow> traces;
  std::vector<SummaryRow> summaries;
};

/// Runs every (sweep point, trial) pair on a bounded worker pool. The
/// result does not depend on the number of threads.
ExperimentResult run_experiment(const Experiment& exp);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

std::string results_csv(const Experiment& exp, const ExperimentResult& result);
std::string trace_csv(const Experiment& exp, const ExperimentResult& result);
std::string summary_csv(const Experiment& exp, const ExperimentResult& result);
nlohmann::ordered_json metadata(const Experiment& exp);

/// Writes <out>, <stem>.summary.csv, <stem>.meta.json and, for the
/// convergence kind, <stem>.trace.csv next to it.
void write_outputs(const Experiment& exp, const ExperimentResult& result);

}  // namespace nomacomp
