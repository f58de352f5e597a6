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

#include "nomacomp/baselines.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace nomacomp {

namespace {

bool any_true(const std::vector<bool>& flags) { return std::find(flags.begin(), flags.end(), true) != flags.end(); }

struct ScalarLink {
  double own_g = 0.0;    // |g|^2 / sigma^2 from the serving BS
  double cross_g = 0.0;  // from the other BS
  double own_h = 0.0;
  double cross_h = 0.0;
};

struct ClusterValue {
  double rate = 0.0;
  bool feasible = false;
};

ClusterValue scalar_cluster(const ScalarLink& l, double p_own, double p_other, double a, double gamma) {
  const double sg = l.own_g * p_own;
  const double ig = l.cross_g * p_other + 1.0;
  const double sh = l.own_h * p_own;
  const double ih = l.cross_h * p_other + 1.0;
  const double b = 1.0 - a;
  ClusterValue v;
  v.feasible = b * sg >= gamma * (a * sg + ig) && b * sh >= gamma * (a * sh + ih);
  v.rate = std::log2(1.0 + a * sg / ig);
  return v;
}

struct GridPoint {
  std::array<double, 4> x{};  // p1, p2, a1, a2
  double value = -1.0;
  bool feasible = false;
};

// Lexicographic scan over the box; strict improvement keeps the earliest
// point on ties.
void scan(const std::array<ScalarLink, 2>& links, double gamma, const std::array<std::vector<double>, 4>& axes,
          GridPoint& best) {
  for (double p1 : axes[0]) {
    for (double p2 : axes[1]) {
      for (double a1 : axes[2]) {
        const ClusterValue c1 = scalar_cluster(links[0], p1, p2, a1, gamma);
        if (!c1.feasible) continue;
        for (double a2 : axes[3]) {
          const ClusterValue c2 = scalar_cluster(links[1], p2, p1, a2, gamma);
          if (!c2.feasible) continue;
          const double value = c1.rate + c2.rate;
          if (!best.feasible || value > best.value) {
            best.feasible = true;
            best.value = value;
            best.x = {p1, p2, a1, a2};
          }
        }
      }
    }
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

}  // namespace

const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::noma_comp:
      return "NOMA_CoMP";
    case Scheme::fixed_power:
      return "FixedPower";
    case Scheme::no_comp:
      return "NoCoMP";
    case Scheme::oma_comp:
      return "OMACoMP";
    case Scheme::brute_force:
      return "BruteForce";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::noma_comp, Scheme::fixed_power, Scheme::no_comp, Scheme::oma_comp, Scheme::brute_force}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

SolveResult run_fixed_power(const NetworkConfig& config, const ChannelSet& channels) {
  const PrecoderBasis bases = compute_bases(channels, BasisGroup::group1);
  const EffectiveChannels eff = effective_matrices(channels, bases);
  SubproblemSpec spec;
  spec.sinr_target = config.sinr_target;
  spec.fixed_split = kFixedSplit;
  SolveResult out = run_sca(config, eff, spec);
  out.rank_deficient_basis = any_true(bases.rank_deficient);
  return out;
}

SolveResult run_no_comp(const NetworkConfig& config, const ChannelSet& channels) {
  const PrecoderBasis bases = compute_bases(channels, BasisGroup::group1);
  const EffectiveChannels eff = effective_matrices(channels, bases);
  const int kper = config.clusters_per_cell;
  NetworkConfig cell_config = config;
  cell_config.num_cells = 1;
  SubproblemSpec spec;
  spec.sinr_target = config.sinr_target;

  SolveResult out;
  out.rank_deficient_basis = any_true(bases.rank_deficient);
  std::vector<bool> designed(eff.num_clusters(), false);
  for (int n = 0; n < config.num_cells; ++n) {
    const ChannelSet local = channels.single_cell(n);
    const PrecoderBasis local_bases = compute_bases(local, BasisGroup::group1);
    const SolveResult cell = run_sca(cell_config, effective_matrices(local, local_bases), spec);
    out.iterations_used = std::max(out.iterations_used, cell.iterations_used);
    out.restarts = std::max(out.restarts, cell.restarts);
    out.numerical_failure = out.numerical_failure || cell.numerical_failure;
    for (int k = 0; k < kper; ++k) {
      if (cell.feasible) {
        out.Q.push_back(cell.Q[k]);
        out.a.push_back(cell.a[k]);
        designed[cluster_id(n, k, kper)] = true;
      } else {
        out.Q.push_back(CMatrix::Zero(eff.dim, eff.dim));
        out.a.push_back(0.0);
      }
    }
    if (n == 0) {
      out.converged = cell.converged;
    } else {
      out.converged = out.converged && cell.converged;
    }
  }
  assemble_result(out, eff, config.sinr_target);
  // Silent cells contribute nothing and are not counted as QoS failures.
  out.rank_ratios.clear();
  for (int c = 0; c < eff.num_clusters(); ++c) {
    if (!designed[c]) {
      out.rates.qos_ok[c] = true;
    } else {
      out.rank_ratios.push_back(rank_ratio(out.Q[c]).ratio);
    }
  }
  out.feasible = std::find(designed.begin(), designed.end(), true) != designed.end();
  return out;
}

double oma_sinr_target(double sinr_target) { return (1.0 + sinr_target) * (1.0 + sinr_target) - 1.0; }

SolveResult run_oma_comp(const NetworkConfig& config, const ChannelSet& channels) {
  const double power = config.transmit_power();
  const double r0 = std::log2(1.0 + config.sinr_target);
  const double slot_b_target = oma_sinr_target(config.sinr_target);

  const PrecoderBasis bases_b = compute_bases(channels, BasisGroup::group2);
  const EffectiveChannels eff_b = effective_matrices(channels, bases_b);
  const Subproblem qos = build_qos_power_min(eff_b, power, slot_b_target);
  const SubproblemSolution slot_b = solve_subproblem(qos, neutral_guess(qos));

  SolveResult out;
  if (slot_b.status != SolveStatus::optimal) {
    out.numerical_failure = slot_b.status == SolveStatus::numerical_failure;
    return out;
  }

  const PrecoderBasis bases_a = compute_bases(channels, BasisGroup::group1);
  const EffectiveChannels eff_a = effective_matrices(channels, bases_a);
  SubproblemSpec spec;
  spec.sinr_target = config.sinr_target;
  spec.fixed_split = 1.0;
  spec.sic_constraint = false;
  spec.qos_constraint = false;
  out = run_sca(config, eff_a, spec);
  out.rank_deficient_basis = any_true(bases_a.rank_deficient) || any_true(bases_b.rank_deficient);
  if (!out.feasible) return out;

  const int nk = eff_a.num_clusters();
  std::vector<CVector> q_b;
  for (const auto& Q : slot_b.Q) {
    q_b.push_back(extract_beamformer(Q));
    out.rank_ratios.push_back(rank_ratio(Q).ratio);
  }
  const RateReport group2 = achieved_sinrs(eff_b, q_b, std::vector<double>(nk, 0.0), slot_b_target);

  RateReport r;
  r.sinr_g1 = out.rates.sinr_g1;
  r.sinr_sic.assign(nk, std::numeric_limits<double>::infinity());
  r.sinr_g2 = group2.sinr_g2;
  for (int c = 0; c < nk; ++c) {
    r.rate_g1.push_back(0.5 * std::log2(1.0 + r.sinr_g1[c]));
    r.rate_sic.push_back(std::numeric_limits<double>::infinity());
    r.rate_g2.push_back(0.5 * std::log2(1.0 + r.sinr_g2[c]));
    r.qos_ok.push_back(r.rate_g2[c] >= r0 - kRateTolerance);
    r.sum_rate_group1 += r.rate_g1[c];
  }
  out.rates = std::move(r);
  out.sum_rate_group1 = out.rates.sum_rate_group1;
  return out;
}

SolveResult brute_force_oracle(const NetworkConfig& config, const ChannelSet& channels, const OracleGrid& grid) {
  if (config.num_cells != 2 || config.antennas_per_bs != 1 || config.clusters_per_cell != 1 ||
      channels.num_cells != 2 || channels.antennas != 1 || channels.clusters_per_cell != 1) {
    throw ConfigError({"brute_force_oracle: only N=2, M=1, K=1 is supported"});
  }
  const double power = config.transmit_power();
  const double gamma = config.sinr_target;
  std::array<ScalarLink, 2> links;
  for (int c = 0; c < 2; ++c) {
    const int other = 1 - c;
    links[c].own_g = std::norm(channels.g(c, c)(0)) / channels.noise_g[c];
    links[c].cross_g = std::norm(channels.g(other, c)(0)) / channels.noise_g[c];
    links[c].own_h = std::norm(channels.h(c, c)(0)) / channels.noise_h[c];
    links[c].cross_h = std::norm(channels.h(other, c)(0)) / channels.noise_h[c];
  }

  GridPoint best;
  const std::vector<double> pw = linspace(0.0, power, grid.coarse_points);
  const std::vector<double> sp = linspace(0.0, 1.0, grid.coarse_points);
  scan(links, gamma, {pw, pw, sp, sp}, best);

  SolveResult out;
  if (!best.feasible) return out;
  const std::array<double, 4> hi = {power, power, 1.0, 1.0};
  std::array<std::vector<double>, 4> local;
  for (int i = 0; i < 4; ++i) {
    const double step = hi[i] / (grid.coarse_points - 1);
    local[i] = linspace(std::max(0.0, best.x[i] - step), std::min(hi[i], best.x[i] + step), grid.refine_points);
  }
  scan(links, gamma, local, best);

  out.feasible = true;
  out.converged = true;
  for (int c = 0; c < 2; ++c) {
    out.Q.push_back(CMatrix::Constant(1, 1, best.x[c]));
    out.a.push_back(best.x[2 + c]);
  }
  const PrecoderBasis bases = compute_bases(channels, BasisGroup::group1);
  assemble_result(out, effective_matrices(channels, bases), gamma);
  out.objective_trace.push_back(best.value);
  return out;
}

SolveResult run_scheme(Scheme scheme, const NetworkConfig& config, const ChannelSet& channels) {
  switch (scheme) {
    case Scheme::noma_comp:
      return run(config, channels);
    case Scheme::fixed_power:
      return run_fixed_power(config, channels);
    case Scheme::no_comp:
      return run_no_comp(config, channels);
    case Scheme::oma_comp:
      return run_oma_comp(config, channels);
    case Scheme::brute_force:
      return brute_force_oracle(config, channels);
  }
  throw ConfigError({"unknown scheme"});
}

}  // namespace nomacomp
