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

#include "nomacomp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace nomacomp {

namespace {

constexpr ExperimentKind kAllKinds[] = {ExperimentKind::convergence,   ExperimentKind::rank_table,
                                        ExperimentKind::sweep_snr,     ExperimentKind::sweep_cells,
                                        ExperimentKind::sweep_alpha,   ExperimentKind::sweep_clusters,
                                        ExperimentKind::oracle_compare};

bool is_oracle_shape(const NetworkConfig& c) {
  return c.num_cells == 2 && c.antennas_per_bs == 1 && c.clusters_per_cell == 1;
}

std::vector<double> sweep_points(const Experiment& exp) {
  if (exp.sweep_parameter.empty()) return {std::numeric_limits<double>::quiet_NaN()};
  return exp.sweep_values;
}

NetworkConfig point_config(const Experiment& exp, double value) {
  if (exp.sweep_parameter.empty()) return exp.base;
  return with_parameter(exp.base, exp.sweep_parameter, value);
}

std::string sweep_field(const Experiment& exp, double v) { return exp.sweep_parameter.empty() ? "" : format_double(v); }

struct TaskOutput {
  std::vector<ResultRow> rows;
  std::vector<TraceRow> traces;
};

TaskOutput run_task(const Experiment& exp, double value, int trial) {
  const NetworkConfig config = point_config(exp, value);
  const ChannelSet channels = draw_trial(config, static_cast<std::uint64_t>(trial));
  TaskOutput out;
  for (Scheme scheme : exp.schemes) {
    const auto start = std::chrono::steady_clock::now();
    const SolveResult res = run_scheme(scheme, config, channels);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    ResultRow row;
    row.sweep_value = value;
    row.scheme = scheme;
    row.record.trial = trial;
    row.record.seed = trial_seed(config.master_seed, static_cast<std::uint64_t>(trial));
    row.record.feasible = res.feasible;
    row.record.sum_rate_group1 = res.feasible ? res.sum_rate_group1 : 0.0;
    row.record.qos_violations = res.qos_violations();
    row.record.iterations = res.iterations_used;
    row.record.rank_ratios = res.feasible ? res.rank_ratios : std::vector<double>{};
    row.record.wall_time_ms = exp.record_timing ? ms : 0.0;
    row.converged = res.converged;
    double total = 0.0;
    for (const auto& Q : res.Q) total += Q.trace().real();
    row.total_power_fraction = total / (config.num_cells * config.transmit_power());
    out.rows.push_back(std::move(row));
    for (const auto& it : res.iterations) out.traces.push_back({value, scheme, trial, it});
  }
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing output file: " + path.string());
}

std::filesystem::path sibling(const std::filesystem::path& out, const std::string& suffix) {
  std::filesystem::path p = out;
  p.replace_filename(out.stem().string() + suffix);
  return p;
}

}  // namespace

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::convergence:
      return "convergence";
    case ExperimentKind::rank_table:
      return "rank_table";
    case ExperimentKind::sweep_snr:
      return "sweep_snr";
    case ExperimentKind::sweep_cells:
      return "sweep_cells";
    case ExperimentKind::sweep_alpha:
      return "sweep_alpha";
    case ExperimentKind::sweep_clusters:
      return "sweep_clusters";
    case ExperimentKind::oracle_compare:
      return "oracle_compare";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_kind(std::string_view name) {
  for (ExperimentKind k : kAllKinds) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

Experiment default_experiment(ExperimentKind kind, const NetworkConfig& base) {
  Experiment exp;
  exp.kind = kind;
  exp.base = base;
  switch (kind) {
    case ExperimentKind::convergence:
      exp.schemes = {Scheme::noma_comp};
      break;
    case ExperimentKind::rank_table:
      exp.sweep_parameter = "antennas_per_bs";
      for (int m = base.clusters_per_cell + 1; m <= base.clusters_per_cell + 4; ++m) exp.sweep_values.push_back(m);
      exp.schemes = {Scheme::noma_comp};
      break;
    case ExperimentKind::sweep_snr:
      exp.sweep_parameter = "transmit_snr_db";
      exp.sweep_values = {0, 10, 20, 30, 40, 50};
      exp.schemes = {Scheme::noma_comp, Scheme::fixed_power, Scheme::no_comp, Scheme::oma_comp};
      break;
    case ExperimentKind::sweep_cells:
      exp.sweep_parameter = "num_cells";
      exp.sweep_values = {1, 2, 3, 4};
      exp.schemes = {Scheme::noma_comp, Scheme::fixed_power, Scheme::oma_comp};
      break;
    case ExperimentKind::sweep_alpha:
      exp.sweep_parameter = "path_loss_exponent";
      exp.sweep_values = {2.0, 2.5, 3.0, 3.5, 4.0};
      exp.schemes = {Scheme::noma_comp, Scheme::no_comp};
      break;
    case ExperimentKind::sweep_clusters:
      exp.sweep_parameter = "clusters_per_cell";
      for (int k = 1; k <= base.antennas_per_bs; ++k) exp.sweep_values.push_back(k);
      exp.schemes = {Scheme::noma_comp, Scheme::fixed_power};
      break;
    case ExperimentKind::oracle_compare:
      exp.sweep_parameter = "transmit_snr_db";
      exp.sweep_values = {10, 30, 50};
      exp.schemes = {Scheme::noma_comp, Scheme::brute_force};
      break;
  }
  return exp;
}

NetworkConfig with_parameter(const NetworkConfig& config, std::string_view name, double value) {
  nlohmann::ordered_json j = to_json(config);
  const std::string key(name);
  if (!j.contains(key)) throw ConfigError({"unknown sweep parameter: " + key});
  if (j[key].is_number_integer()) {
    if (!std::isfinite(value) || value != std::floor(value)) {
      throw ConfigError({"sweep value " + format_double(value) + " for " + key + " must be an integer"});
    }
    if (j[key].is_number_unsigned()) {
      if (value < 0) throw ConfigError({"sweep value for " + key + " must be nonnegative"});
      j[key] = static_cast<std::uint64_t>(value);
    } else {
      j[key] = static_cast<std::int64_t>(value);
    }
  } else {
    j[key] = value;
  }
  return parse_config(j.dump());
}

std::vector<std::string> validate_experiment(const Experiment& exp) {
  std::vector<std::string> errors = exp.base.validation_errors();
  if (exp.trials < 1) errors.push_back("trials must be a positive integer");
  if (exp.threads < 1) errors.push_back("threads must be a positive integer");
  if (exp.schemes.empty()) errors.push_back("at least one scheme is required");
  if (!exp.sweep_parameter.empty() && exp.sweep_values.empty()) errors.push_back("sweep has no values");
  const bool brute = std::find(exp.schemes.begin(), exp.schemes.end(), Scheme::brute_force) != exp.schemes.end();
  if (!errors.empty()) return errors;
  for (double v : sweep_points(exp)) {
    try {
      const NetworkConfig c = point_config(exp, v);
      if ((brute || exp.kind == ExperimentKind::oracle_compare) && !is_oracle_shape(c)) {
        errors.push_back("BruteForce and oracle_compare require num_cells=2, antennas_per_bs=1, clusters_per_cell=1");
      }
    } catch (const ConfigError& e) {
      for (const auto& msg : e.errors()) errors.push_back("sweep value " + format_double(v) + ": " + msg);
    }
  }
  std::sort(errors.begin(), errors.end());
  errors.erase(std::unique(errors.begin(), errors.end()), errors.end());
  return errors;
}

ExperimentResult run_experiment(const Experiment& exp) {
  if (auto errors = validate_experiment(exp); !errors.empty()) throw ConfigError(std::move(errors));
  const std::vector<double> points = sweep_points(exp);
  const std::size_t num_tasks = points.size() * static_cast<std::size_t>(exp.trials);
  std::vector<TaskOutput> outputs(num_tasks);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    for (;;) {
      const std::size_t task = next.fetch_add(1);
      if (task >= num_tasks) return;
      try {
        outputs[task] = run_task(exp, points[task / exp.trials], static_cast<int>(task % exp.trials));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = num_tasks;
      }
    }
  };
  const int workers = static_cast<int>(std::min<std::size_t>(std::max(exp.threads, 1), std::max<std::size_t>(num_tasks, 1)));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  for (auto& o : outputs) {
    for (auto& r : o.rows) result.rows.push_back(std::move(r));
    for (auto& t : o.traces) result.traces.push_back(std::move(t));
  }
  for (std::size_t p = 0; p < points.size(); ++p) {
    for (Scheme s : exp.schemes) {
      std::vector<TrialRecord> records;
      for (const auto& r : result.rows) {
        const bool same_point = exp.sweep_parameter.empty() || r.sweep_value == points[p];
        if (same_point && r.scheme == s) records.push_back(r.record);
      }
      result.summaries.push_back({points[p], s, aggregate(records)});
    }
  }
  return result;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string results_csv(const Experiment& exp, const ExperimentResult& result) {
  std::ostringstream os;
  os << "sweep_value,scheme,trial,seed,sum_rate_group1,feasible,qos_violations,iterations,min_R_lambda,wall_time_ms\n";
  for (const auto& r : result.rows) {
    const TrialRecord& t = r.record;
    os << sweep_field(exp, r.sweep_value) << ',' << to_string(r.scheme) << ',' << t.trial << ',' << t.seed << ','
       << format_double(t.sum_rate_group1) << ',' << (t.feasible ? 1 : 0) << ',' << t.qos_violations << ','
       << t.iterations << ',' << format_double(t.min_rank_ratio()) << ',' << format_double(t.wall_time_ms) << '\n';
  }
  return os.str();
}

std::string trace_csv(const Experiment& exp, const ExperimentResult& result) {
  std::ostringstream os;
  os << "sweep_value,scheme,trial,iteration,objective,rel_change,agm_residual,taylor_residual\n";
  for (const auto& t : result.traces) {
    const IterationRecord& r = t.record;
    os << sweep_field(exp, t.sweep_value) << ',' << to_string(t.scheme) << ',' << t.trial << ',' << r.iteration << ','
       << format_double(r.objective) << ',' << format_double(r.rel_change) << ',' << format_double(r.agm_residual)
       << ',' << format_double(r.taylor_residual) << '\n';
  }
  return os.str();
}

std::string summary_csv(const Experiment& exp, const ExperimentResult& result) {
  std::ostringstream os;
  os << "sweep_value,scheme,trials,mean_sum_rate,min_sum_rate,max_sum_rate,feasible_fraction,qos_violations,"
        "mean_iterations,R_lambda_average,R_lambda_maximum,R_lambda_minimum\n";
  for (const auto& s : result.summaries) {
    const Summary& m = s.summary;
    os << sweep_field(exp, s.sweep_value) << ',' << to_string(s.scheme) << ',' << m.trials << ','
       << format_double(m.mean_sum_rate) << ',' << format_double(m.min_sum_rate) << ','
       << format_double(m.max_sum_rate) << ',' << format_double(m.feasible_fraction) << ',' << m.qos_violations
       << ',' << format_double(m.mean_iterations) << ',' << format_double(m.rank_ratio_average) << ','
       << format_double(m.rank_ratio_maximum) << ',' << format_double(m.rank_ratio_minimum) << '\n';
  }
  return os.str();
}

nlohmann::ordered_json metadata(const Experiment& exp) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(exp.kind);
  j["config"] = to_json(exp.base);
  j["sweep"] = {{"parameter", exp.sweep_parameter}, {"values", exp.sweep_values}};
  std::vector<std::string> schemes;
  for (Scheme s : exp.schemes) schemes.push_back(to_string(s));
  j["schemes"] = schemes;
  j["trials"] = exp.trials;
  j["trial_seeds"] = "trial_seed(master_seed, trial) via splitmix64; trial index is the stream index";
  j["wall_time_recorded"] = exp.record_timing;
  j["design"] = {
      {"bs_layout", "linear, uniform spacing inter_bs_distance"},
      {"user_placement", "uniform in disc of cell_radius around the serving BS"},
      {"path_loss", "amplitude factor (d / path_loss_reference_distance)^-alpha"},
      {"effective_channel", "U^H g g^H U / sigma^2"},
      {"zf_rank_threshold", 1e-12},
      {"initializer",
       "Q = (P/K) w w^H along U^H g, split 0.5; restarts with 0.2, 0.1, 0.05 when the first subproblem fails"},
      {"stopping", "relative objective change < rel_tolerance from the second iteration, at most max_iterations"},
      {"rate_unit", "bits/s/Hz (log2)"},
      {"subproblem_solver", "primal log-barrier path following, gap target 1e-9, accept 1e-6"},
      {"fixed_power_split", kFixedSplit},
      {"no_comp_reporting", "achieved rates under true interference, QoS violations counted, not zeroed"},
      {"oma_scheme",
       "two equal slots; Group 1 with split 1 and halved rates; Group 2 on its own ZF bases at minimum power "
       "with SINR target (1+gamma)^2-1"},
      {"oracle_grid", "51 points per axis over (p1, p2, a1, a2), one 11-point refinement"},
      {"infeasible_penalty", "sum rate 0, trial kept in averages"},
  };
  return j;
}

void write_outputs(const Experiment& exp, const ExperimentResult& result) {
  const std::filesystem::path& out = exp.output_path;
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  write_file(out, results_csv(exp, result));
  write_file(sibling(out, ".summary.csv"), summary_csv(exp, result));
  if (exp.kind == ExperimentKind::convergence) write_file(sibling(out, ".trace.csv"), trace_csv(exp, result));
  write_file(sibling(out, ".meta.json"), metadata(exp).dump(2) + "\n");
}

}  // namespace nomacomp
