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

// Experiment runner: one subcommand per experiment kind.

#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nomacomp/experiment.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Flags {
  std::string config;
  int trials = 100;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> schemes;
  std::vector<double> values;
  int threads = 1;
  bool timing = false;
};

void add_flags(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON file with NetworkConfig fields")->required();
  sub->add_option("--trials", f.trials, "Monte-Carlo trials per sweep point")->capture_default_str();
  sub->add_option("--seed", f.seed, "Overrides master_seed from the config");
  sub->add_option("--out", f.out, "Result CSV path (default <kind>.csv)");
  sub->add_option("--schemes", f.schemes, "NOMA_CoMP, FixedPower, NoCoMP, OMACoMP, BruteForce")->delimiter(',');
  sub->add_option("--values", f.values, "Sweep values replacing the kind's default axis")->delimiter(',');
  sub->add_option("--threads", f.threads, "Worker threads")->capture_default_str();
  sub->add_flag("--timing", f.timing, "Record wall time per run (output then varies between runs)");
}

nomacomp::Experiment build(nomacomp::ExperimentKind kind, const Flags& f) {
  nomacomp::NetworkConfig base = nomacomp::load_config(f.config);
  if (f.seed) base.master_seed = *f.seed;
  nomacomp::Experiment exp = nomacomp::default_experiment(kind, base);
  exp.trials = f.trials;
  exp.threads = f.threads;
  exp.record_timing = f.timing;
  exp.output_path = f.out.empty() ? std::string(nomacomp::to_string(kind)) + ".csv" : f.out;
  if (!f.values.empty()) {
    if (exp.sweep_parameter.empty()) throw nomacomp::ConfigError({"--values: this experiment has no sweep axis"});
    exp.sweep_values = f.values;
  }
  if (!f.schemes.empty()) {
    exp.schemes.clear();
    std::vector<std::string> errors;
    for (const auto& name : f.schemes) {
      if (auto s = nomacomp::parse_scheme(name)) {
        exp.schemes.push_back(*s);
      } else {
        errors.push_back("unknown scheme: " + name);
      }
    }
    if (!errors.empty()) throw nomacomp::ConfigError(std::move(errors));
  }
  return exp;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-cell NOMA-CoMP beamforming and power allocation experiments"};
  app.require_subcommand(1);
  Flags flags;
  std::map<CLI::App*, nomacomp::ExperimentKind> kinds;
  for (auto kind : {nomacomp::ExperimentKind::convergence, nomacomp::ExperimentKind::rank_table,
                    nomacomp::ExperimentKind::sweep_snr, nomacomp::ExperimentKind::sweep_cells,
                    nomacomp::ExperimentKind::sweep_alpha, nomacomp::ExperimentKind::sweep_clusters,
                    nomacomp::ExperimentKind::oracle_compare}) {
    CLI::App* sub = app.add_subcommand(nomacomp::to_string(kind));
    add_flags(sub, flags);
    kinds[sub] = kind;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const nomacomp::Experiment exp = build(kinds.at(app.get_subcommands().front()), flags);
    const nomacomp::ExperimentResult result = nomacomp::run_experiment(exp);
    nomacomp::write_outputs(exp, result);
    std::cout << "wrote " << exp.output_path.string() << " (" << result.rows.size() << " rows)\n";
  } catch (const nomacomp::ConfigError& e) {
    std::cerr << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
