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

#include "nomacomp/sca.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nomacomp {

namespace {

constexpr double kTiny = 1e-300;

double relative_gap(double lhs, double rhs) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), kTiny});
  return std::abs(lhs - rhs) / scale;
}

double relative_change(double current, double previous) {
  if (previous > 0.0) return std::abs(current - previous) / previous;
  return current == previous ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace

double SolveResult::min_rank_ratio() const {
  if (rank_ratios.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(rank_ratios.begin(), rank_ratios.end());
}

std::vector<CMatrix> initial_matrices(const EffectiveChannels& eff, double power) {
  std::vector<CMatrix> Q;
  const double share = power / eff.clusters_per_cell;
  for (int c = 0; c < eff.num_clusters(); ++c) {
    CVector w = eff.gv(c, c);
    const double n = w.norm();
    if (n > 0.0) {
      w /= n;
    } else {
      w = CVector::Unit(eff.dim, 0);
    }
    Q.push_back(share * w * w.adjoint());
  }
  return Q;
}

FixedPoints initialize(const EffectiveChannels& eff, double power, double split) {
  const std::vector<CMatrix> Q = initial_matrices(eff, power);
  const InterferenceScalars iv = interference_scalars(eff, Q);
  FixedPoints fp;
  for (int c = 0; c < eff.num_clusters(); ++c) {
    const double s = std::max(quad_form(eff.gv(c, c), Q[c]), kTiny);
    const double t = std::max(quad_form(eff.hv(c, c), Q[c]), kTiny);
    fp.c.push_back(std::sqrt(s / split));
    fp.d.push_back(std::sqrt(t / split));
    fp.t_tilde.push_back(std::sqrt(split * s));
    fp.w_tilde.push_back(iv.u[c]);
  }
  return fp;
}

FixedPoints update_fixed_points(const SubproblemSolution& sol, const EffectiveChannels& eff, bool* clamped) {
  const InterferenceScalars iv = interference_scalars(eff, sol.Q);
  FixedPoints fp;
  bool any_clamped = false;
  for (int c = 0; c < eff.num_clusters(); ++c) {
    double a = sol.a[c];
    if (a < kMinSplit) {
      a = kMinSplit;
      any_clamped = true;
    }
    const double s = std::max(quad_form(eff.gv(c, c), sol.Q[c]), kTiny);
    const double t = std::max(quad_form(eff.hv(c, c), sol.Q[c]), kTiny);
    fp.c.push_back(std::sqrt(s / a));
    fp.d.push_back(std::sqrt(t / a));
    fp.t_tilde.push_back(std::max(sol.t[c], 0.0));
    fp.w_tilde.push_back(iv.u[c]);
  }
  if (clamped) *clamped = any_clamped;
  return fp;
}

BoundResiduals bound_residuals(const SubproblemSolution& sol, const EffectiveChannels& eff, const FixedPoints& fp) {
  const InterferenceScalars iv = interference_scalars(eff, sol.Q);
  BoundResiduals r;
  for (int c = 0; c < eff.num_clusters(); ++c) {
    const double a = sol.a[c];
    const double s = quad_form(eff.gv(c, c), sol.Q[c]);
    const double t = quad_form(eff.hv(c, c), sol.Q[c]);
    if (a >= kMinSplit) {
      const double ac = a * fp.c[c];
      const double ad = a * fp.d[c];
      r.agm = std::max(r.agm, relative_gap(ac * ac + (s / fp.c[c]) * (s / fp.c[c]), 2.0 * a * s));
      r.agm = std::max(r.agm, relative_gap(ad * ad + (t / fp.d[c]) * (t / fp.d[c]), 2.0 * a * t));
    }
    const double tv = sol.t[c];
    const double u = iv.u[c];
    const double tt = fp.t_tilde[c];
    const double wt = fp.w_tilde[c];
    const double bound = 2.0 * tt * tv / wt - tt * tt * u / (wt * wt);
    r.taylor = std::max(r.taylor, relative_gap(tv * tv / u, bound));
  }
  return r;
}

void assemble_result(SolveResult& out, const EffectiveChannels& eff, double sinr_target) {
  out.q.clear();
  out.b.clear();
  out.rank_ratios.clear();
  for (std::size_t c = 0; c < out.Q.size(); ++c) {
    out.q.push_back(extract_beamformer(out.Q[c]));
    out.b.push_back(1.0 - out.a[c]);
    out.rank_ratios.push_back(rank_ratio(out.Q[c]).ratio);
  }
  out.rates = achieved_sinrs(eff, out.q, out.a, sinr_target);
  out.sum_rate_group1 = out.rates.sum_rate_group1;
}

SolveResult run_sca(const NetworkConfig& config, const EffectiveChannels& eff, const SubproblemSpec& spec) {
  SolveResult out;
  const double power = config.transmit_power();
  std::vector<double> splits;
  if (spec.fixed_split) {
    splits.push_back(*spec.fixed_split);
  } else {
    const int tries = std::min<int>(1 + std::max(config.init_restarts, 0), std::size(kInitialSplits));
    splits.assign(kInitialSplits, kInitialSplits + tries);
  }

  SubproblemSolution sol;
  bool started = false;
  for (std::size_t i = 0; i < splits.size() && !started; ++i) {
    out.restarts = static_cast<int>(i);
    const FixedPoints fp = initialize(eff, power, splits[i]);
    const Subproblem sub = build_subproblem(eff, fp, power, spec);
    const std::vector<CMatrix> Q0 = initial_matrices(eff, power);
    const std::vector<double> a0(eff.num_clusters(), splits[i]);
    const std::vector<double> t0(fp.t_tilde);
    const std::vector<double> rho0(eff.num_clusters(), 0.0);
    sol = solve_subproblem(sub, sub.encode(Q0, a0, t0, rho0));
    if (sol.status == SolveStatus::numerical_failure) out.numerical_failure = true;
    started = sol.status == SolveStatus::optimal;
  }
  if (!started) return out;
  out.numerical_failure = false;

  for (int m = 1;; ++m) {
    IterationRecord rec;
    rec.iteration = m;
    rec.objective = sol.objective;
    rec.newton_steps = sol.newton_steps;
    rec.rel_change = m == 1 ? std::numeric_limits<double>::quiet_NaN()
                            : relative_change(sol.objective, out.objective_trace.back());
    const FixedPoints fp = update_fixed_points(sol, eff, &rec.split_clamped);
    const BoundResiduals res = bound_residuals(sol, eff, fp);
    rec.agm_residual = res.agm;
    rec.taylor_residual = res.taylor;
    out.objective_trace.push_back(sol.objective);
    out.iterations.push_back(rec);
    out.iterations_used = m;
    out.Q = sol.Q;
    out.a = sol.a;
    if (m > 1 && rec.rel_change < config.rel_tolerance) {
      out.converged = true;
      break;
    }
    if (m >= config.max_iterations) break;
    const Subproblem sub = build_subproblem(eff, fp, power, spec);
    SubproblemSolution next = solve_subproblem(sub, warm_start(sub, sol));
    if (next.status != SolveStatus::optimal) {
      out.numerical_failure = true;
      break;
    }
    sol = std::move(next);
  }
  out.feasible = true;
  assemble_result(out, eff, spec.sinr_target);
  return out;
}

SolveResult run(const NetworkConfig& config, const ChannelSet& channels) {
  const PrecoderBasis bases = compute_bases(channels, BasisGroup::group1);
  const EffectiveChannels eff = effective_matrices(channels, bases);
  SubproblemSpec spec;
  spec.sinr_target = config.sinr_target;
  SolveResult out = run_sca(config, eff, spec);
  out.rank_deficient_basis = std::find(bases.rank_deficient.begin(), bases.rank_deficient.end(), true) !=
                             bases.rank_deficient.end();
  return out;
}

}  // namespace nomacomp
