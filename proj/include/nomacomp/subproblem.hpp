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

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nomacomp/conic.hpp"
#include "nomacomp/precoding.hpp"
#include "nomacomp/types.hpp"

namespace nomacomp {

/// SCA expansion points, one entry per cluster: AGM points c (SIC) and d
/// (QoS), Taylor points w_tilde (interference, >= 1) and t_tilde (>= 0).
struct FixedPoints {
  std::vector<double> c;
  std::vector<double> d;
  std::vector<double> w_tilde;
  std::vector<double> t_tilde;

  bool valid() const;
};

/// Which pieces of the convexified problem are present.
struct SubproblemSpec {
  double sinr_target = 0.2;
  // Power split held constant when set (fixed-power and OMA variants).
  std::optional<double> fixed_split;
  bool sic_constraint = true;
  bool qos_constraint = true;
};

/// Convex program for fixed expansion points, in scaled variables:
/// Q' = Q / P, a, t' = t / sqrt(s_c), rho' = rho / s_c with
/// s_c = P * ||U^H g||^2 / sigma^2 the largest attainable own-channel gain.
struct Subproblem {
  conic::Problem problem;
  SubproblemSpec spec;
  double power = 0.0;
  int dim = 0;
  int num_cells = 0;
  int clusters_per_cell = 0;
  std::vector<int> q_offset;  // first variable of Q'_c (dim^2 reals)
  std::vector<int> a_var;     // -1 when the split is fixed
  std::vector<int> t_var;
  std::vector<int> rho_var;
  std::vector<double> g_scale;  // s_c
  std::vector<double> h_scale;  // P * ||U^H h||^2 / varsigma^2

  int num_clusters() const { return num_cells * clusters_per_cell; }
  int num_psd_blocks() const { return num_clusters(); }
  int num_scalars() const;
  int num_schur_blocks() const;

  /// Scaled variable vector for a point given in physical units.
  std::vector<double> encode(std::span<const CMatrix> Q, std::span<const double> a, std::span<const double> t,
                             std::span<const double> rho) const;
  CMatrix decode_Q(std::span<const double> x, int cluster) const;
};

/// Builds the convexified rank-relaxed problem around fixed points.
Subproblem build_subproblem(const EffectiveChannels& eff, const FixedPoints& fp, double power,
                   const SubproblemSpec& spec);

/// Minimum-power QoS program: tr(H_cc Q_c) >= target * v_c for every
/// cluster, per-BS power budget, Q PSD. Used for the Group-2 OMA slot.
Subproblem build_qos_power_min(const EffectiveChannels& eff, double power, double sinr_target);

enum class SolveStatus { optimal, infeasible, numerical_failure };

const char* to_string(SolveStatus s);

struct SubproblemSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  std::vector<CMatrix> Q;
  std::vector<double> a;
  std::vector<double> rho;
  std::vector<double> t;
  double objective = 0.0;  // sum log2(1 + rho)
  double gap = 0.0;
  double max_violation = 0.0;  // in the scaled problem
  int newton_steps = 0;
  bool retried = false;
  std::string message;
  std::vector<double> x;  // raw scaled solution
};

/// Solves the program; retries once from a neutral start after a numerical
/// failure.
SubproblemSolution solve_subproblem(const Subproblem& sub, std::span<const double> initial_guess,
                            const conic::Options& options = {});

/// Start for the next convexification: the previous scaled iterate with
/// every rho halved, which keeps it strictly inside the retightened
/// constraints. Requires both problems to share the variable layout.
std::vector<double> warm_start(const Subproblem& next, const SubproblemSolution& previous);

/// Neutral start: equal power over the null space, split 0.5.
std::vector<double> neutral_guess(const Subproblem& sub);

struct RankRatio {
  double ratio = 0.0;
  bool zero_matrix = false;
};

/// Largest over second-largest eigenvalue; +infinity when the second is at
/// most 1e-15 of the first or the matrix is 1x1.
RankRatio rank_ratio(const CMatrix& Q);

/// sqrt(lambda_1) * e_1 with the first nonzero entry made real positive.
CVector extract_beamformer(const CMatrix& Q);

}  // namespace nomacomp
