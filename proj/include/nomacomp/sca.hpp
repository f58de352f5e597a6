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

#include <vector>

#include "nomacomp/evaluation.hpp"
#include "nomacomp/precoding.hpp"
#include "nomacomp/scenario.hpp"
#include "nomacomp/subproblem.hpp"

namespace nomacomp {

// Power splits below this are clamped inside the AGM point formulas.
inline constexpr double kMinSplit = 1e-9;

// Initial splits tried in order; the first is the regular start.
inline constexpr double kInitialSplits[] = {0.5, 0.2, 0.1, 0.05};

/// One solve-and-update step of the loop.
struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;       // sum log2(1 + rho)
  double rel_change = 0.0;      // NaN on the first iteration
  // Largest relative gap between each bound and its original function at
  // the producing iterate after the fixed points were moved there.
  double agm_residual = 0.0;
  double taylor_residual = 0.0;
  int newton_steps = 0;
  bool split_clamped = false;
};

struct SolveResult {
  bool feasible = false;
  bool converged = false;
  int iterations_used = 0;
  int restarts = 0;  // additional starts tried after the first
  bool numerical_failure = false;
  bool rank_deficient_basis = false;

  std::vector<CMatrix> Q;
  std::vector<CVector> q;
  std::vector<double> a;
  std::vector<double> b;
  RateReport rates;
  double sum_rate_group1 = 0.0;
  std::vector<double> rank_ratios;
  std::vector<double> objective_trace;
  std::vector<IterationRecord> iterations;

  int qos_violations() const { return feasible ? rates.qos_violations() : 0; }
  double min_rank_ratio() const;
};

/// Expansion points at Q = (P/K) w w^H, w the unit matched direction, with
/// the given initial split.
FixedPoints initialize(const EffectiveChannels& eff, double power, double split);

/// Starting matrices used by initialize.
std::vector<CMatrix> initial_matrices(const EffectiveChannels& eff, double power);

/// Moves every expansion point to the given solution. Sets *clamped when
/// some split had to be raised to kMinSplit.
FixedPoints update_fixed_points(const SubproblemSolution& sol, const EffectiveChannels& eff,
                                bool* clamped = nullptr);

/// Relative gaps of the AGM and Taylor bounds at sol for points fp.
struct BoundResiduals {
  double agm = 0.0;
  double taylor = 0.0;
};
BoundResiduals bound_residuals(const SubproblemSolution& sol, const EffectiveChannels& eff, const FixedPoints& fp);

/// Successive convex approximation over the given problem variant.
SolveResult run_sca(const NetworkConfig& config, const EffectiveChannels& eff, const SubproblemSpec& spec);

/// The proposed joint design on Group-1 ZF bases.
SolveResult run(const NetworkConfig& config, const ChannelSet& channels);

/// Rank-one extraction, rank diagnostics and rate replay for final Q and a.
void assemble_result(SolveResult& out, const EffectiveChannels& eff, double sinr_target);

}  // namespace nomacomp
