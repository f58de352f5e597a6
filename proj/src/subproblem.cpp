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

#include "nomacomp/subproblem.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace nomacomp {

using conic::AffineExpr;

namespace {

constexpr double kMinScale = 1e-300;
constexpr double kMinPoint = 1e-8;

std::string tag(const char* name, int cluster) { return std::string(name) + "[" + std::to_string(cluster) + "]"; }

int pair_index(int p, int q, int dim) {
  // Position of (p, q), p < q, in row-major upper-triangle order.
  return p * dim - p * (p + 1) / 2 + (q - p - 1);
}

// Terms of scale * tr(v v^H Q') over the real parametrization of Q'.
void add_trace_terms(AffineExpr& e, const CVector& v, double scale, int offset, int dim) {
  for (int p = 0; p < dim; ++p) e.add(offset + p, scale * std::norm(v(p)));
  for (int p = 0; p < dim; ++p) {
    for (int q = p + 1; q < dim; ++q) {
      const cplx a_qp = scale * v(q) * std::conj(v(p));
      const int base = offset + dim + 2 * pair_index(p, q, dim);
      e.add(base, 2.0 * a_qp.real());
      e.add(base + 1, -2.0 * a_qp.imag());
    }
  }
}

conic::LmiConstraint psd_block(int cluster, int offset, int dim) {
  conic::LmiConstraint lmi(tag("psd", cluster), dim);
  for (int p = 0; p < dim; ++p) lmi.add_entry(p, p, {{offset + p, 1.0}});
  for (int p = 0; p < dim; ++p) {
    for (int q = p + 1; q < dim; ++q) {
      const int base = offset + dim + 2 * pair_index(p, q, dim);
      lmi.add_entry(p, q, {{base, 1.0}, {base + 1, cplx(0.0, 1.0)}});
    }
  }
  return lmi;
}

AffineExpr power_trace(int offset, int dim) {
  AffineExpr e;
  for (int p = 0; p < dim; ++p) e.add(offset + p, 1.0);
  return e;
}

// Declares the Q' variables of every cluster and returns their offsets.
std::vector<int> declare_q_vars(conic::Problem& prob, int clusters, int dim) {
  std::vector<int> offsets;
  for (int c = 0; c < clusters; ++c) {
    offsets.push_back(prob.num_vars());
    for (int p = 0; p < dim; ++p) prob.add_var("Q" + std::to_string(c) + "_" + std::to_string(p) + std::to_string(p));
    for (int p = 0; p < dim; ++p) {
      for (int q = p + 1; q < dim; ++q) {
        const std::string idx = std::to_string(p) + std::to_string(q);
        prob.add_var("Q" + std::to_string(c) + "_re" + idx);
        prob.add_var("Q" + std::to_string(c) + "_im" + idx);
      }
    }
  }
  return offsets;
}

// 1 + sum over other-cell transmitters of P tr(G_{tx,rx} Q'_tx).
AffineExpr group1_interference(const EffectiveChannels& eff, const std::vector<int>& offsets, double power, int rx) {
  AffineExpr u(1.0);
  for (int tx = 0; tx < eff.num_clusters(); ++tx) {
    if (eff.cell_of(tx) == eff.cell_of(rx)) continue;
    add_trace_terms(u, eff.gv(tx, rx), power, offsets[tx], eff.dim);
  }
  return u;
}

// 1 + sum over every other transmitter of P tr(H_{tx,rx} Q'_tx).
AffineExpr group2_interference(const EffectiveChannels& eff, const std::vector<int>& offsets, double power, int rx) {
  AffineExpr v(1.0);
  for (int tx = 0; tx < eff.num_clusters(); ++tx) {
    if (tx == rx) continue;
    add_trace_terms(v, eff.hv(tx, rx), power, offsets[tx], eff.dim);
  }
  return v;
}

CVector unit(const CVector& v) {
  const double n = v.norm();
  return n > 0.0 ? CVector(v / n) : CVector(v);
}

void add_power_constraints(Subproblem& sub) {
  for (int n = 0; n < sub.num_cells; ++n) {
    AffineExpr e(1.0);
    for (int k = 0; k < sub.clusters_per_cell; ++k) {
      e += -1.0 * power_trace(sub.q_offset[cluster_id(n, k, sub.clusters_per_cell)], sub.dim);
    }
    sub.problem.linear.push_back({"power[" + std::to_string(n) + "]", e});
  }
}

}  // namespace

bool FixedPoints::valid() const {
  const std::size_t n = c.size();
  if (d.size() != n || w_tilde.size() != n || t_tilde.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(c[i]) || !std::isfinite(d[i]) || !std::isfinite(w_tilde[i]) || !std::isfinite(t_tilde[i])) {
      return false;
    }
    if (!(c[i] > 0.0) || !(d[i] > 0.0) || w_tilde[i] < 1.0 || t_tilde[i] < 0.0) return false;
  }
  return true;
}

int Subproblem::num_scalars() const {
  int count = 0;
  for (int c = 0; c < num_clusters(); ++c) count += (a_var[c] >= 0) + (t_var[c] >= 0) + (rho_var[c] >= 0);
  return count;
}

int Subproblem::num_schur_blocks() const {
  int count = 0;
  for (const auto& l : problem.lmis) count += l.side == 2 && l.label.starts_with("schur");
  return count;
}

std::vector<double> Subproblem::encode(std::span<const CMatrix> Q, std::span<const double> a,
                                      std::span<const double> t, std::span<const double> rho) const {
  std::vector<double> x(problem.num_vars(), 0.0);
  for (int c = 0; c < num_clusters(); ++c) {
    const CMatrix Qs = Q[c] / power;
    const int o = q_offset[c];
    for (int p = 0; p < dim; ++p) x[o + p] = Qs(p, p).real();
    for (int p = 0; p < dim; ++p) {
      for (int q = p + 1; q < dim; ++q) {
        const int base = o + dim + 2 * pair_index(p, q, dim);
        x[base] = Qs(p, q).real();
        x[base + 1] = Qs(p, q).imag();
      }
    }
    if (a_var[c] >= 0) x[a_var[c]] = a[c];
    if (t_var[c] >= 0) x[t_var[c]] = t[c] / std::sqrt(g_scale[c]);
    if (rho_var[c] >= 0) x[rho_var[c]] = rho[c] / g_scale[c];
  }
  return x;
}

CMatrix Subproblem::decode_Q(std::span<const double> x, int cluster) const {
  CMatrix Q(dim, dim);
  const int o = q_offset[cluster];
  for (int p = 0; p < dim; ++p) Q(p, p) = x[o + p];
  for (int p = 0; p < dim; ++p) {
    for (int q = p + 1; q < dim; ++q) {
      const int base = o + dim + 2 * pair_index(p, q, dim);
      Q(p, q) = cplx(x[base], x[base + 1]);
      Q(q, p) = std::conj(Q(p, q));
    }
  }
  return power * Q;
}

Subproblem build_subproblem(const EffectiveChannels& eff, const FixedPoints& fp, double power, const SubproblemSpec& spec) {
  const int nk = eff.num_clusters();
  if (static_cast<int>(fp.c.size()) != nk || !fp.valid()) {
    throw ConfigError({"build_subproblem: fixed points missing or outside their domain"});
  }
  Subproblem sub;
  sub.spec = spec;
  sub.power = power;
  sub.dim = eff.dim;
  sub.num_cells = eff.num_cells;
  sub.clusters_per_cell = eff.clusters_per_cell;
  auto& prob = sub.problem;
  const int dim = eff.dim;
  const double gamma = spec.sinr_target;

  sub.q_offset = declare_q_vars(prob, nk, dim);
  sub.a_var.assign(nk, -1);
  sub.t_var.assign(nk, -1);
  sub.rho_var.assign(nk, -1);
  for (int c = 0; c < nk; ++c) {
    if (!spec.fixed_split) sub.a_var[c] = prob.add_var(tag("a", c));
    sub.t_var[c] = prob.add_var(tag("t", c));
    sub.rho_var[c] = prob.add_var(tag("rho", c));
    sub.g_scale.push_back(std::max(power * eff.gv(c, c).squaredNorm(), kMinScale));
    sub.h_scale.push_back(std::max(power * eff.hv(c, c).squaredNorm(), kMinScale));
  }

  for (int c = 0; c < nk; ++c) {
    const int o = sub.q_offset[c];
    const double sg = sub.g_scale[c];
    const double sh = sub.h_scale[c];
    AffineExpr own_g;  // S' = tr(G Q) / s_c
    add_trace_terms(own_g, unit(eff.gv(c, c)), 1.0, o, dim);
    AffineExpr own_h;
    add_trace_terms(own_h, unit(eff.hv(c, c)), 1.0, o, dim);
    const AffineExpr u = group1_interference(eff, sub.q_offset, power, c);
    const AffineExpr v = group2_interference(eff, sub.q_offset, power, c);

    // Schur block [[a, t'], [t', S']] PSD.
    conic::LmiConstraint schur(tag("schur", c), 2);
    if (sub.a_var[c] >= 0) {
      schur.add_entry(0, 0, {{sub.a_var[c], 1.0}});
    } else {
      schur.add_entry(0, 0, {}, *spec.fixed_split);
    }
    schur.add_entry(0, 1, {{sub.t_var[c], 1.0}});
    std::vector<std::pair<int, cplx>> s_terms;
    AffineExpr own_g_c = own_g;
    own_g_c.canonicalize();
    for (const auto& term : own_g_c.terms) s_terms.emplace_back(term.var, term.coef);
    schur.add_entry(1, 1, s_terms);
    prob.lmis.push_back(std::move(schur));

    // Taylor bound on t^2/u: (2 t~'/w~) t' - (t~'^2/w~^2) u - rho' >= 0.
    {
      const double tt = fp.t_tilde[c] / std::sqrt(sg);
      const double w = fp.w_tilde[c];
      AffineExpr e;
      e.add(sub.t_var[c], 2.0 * tt / w);
      e += (-(tt * tt) / (w * w)) * u;
      e.add(sub.rho_var[c], -1.0);
      prob.linear.push_back({tag("taylor", c), e});
    }

    const auto split_term = [&](double point) {
      AffineExpr e;
      if (sub.a_var[c] >= 0) {
        e.add(sub.a_var[c], point);
      } else {
        e.constant = point * *spec.fixed_split;
      }
      return e;
    };

    // SIC via AGM: 2/(1+g) (S' - g u / s_c) >= (S'/c')^2 + (c' a)^2.
    if (spec.sic_constraint) {
      const double cp = std::max(fp.c[c] / std::sqrt(sg), kMinPoint);
      conic::ConeConstraint cone;
      cone.label = tag("sic", c);
      cone.y = (2.0 / (1.0 + gamma)) * (own_g + (-gamma / sg) * u);
      cone.z = AffineExpr(1.0);
      cone.w = {(1.0 / cp) * own_g, split_term(cp)};
      prob.cones.push_back(std::move(cone));
    }
    // QoS: same with the Group-2 channel, v and d.
    if (spec.qos_constraint) {
      const double dp = std::max(fp.d[c] / std::sqrt(sh), kMinPoint);
      conic::ConeConstraint cone;
      cone.label = tag("qos", c);
      cone.y = (2.0 / (1.0 + gamma)) * (own_h + (-gamma / sh) * v);
      cone.z = AffineExpr(1.0);
      cone.w = {(1.0 / dp) * own_h, split_term(dp)};
      prob.cones.push_back(std::move(cone));
    }

    prob.lmis.push_back(psd_block(c, o, dim));

    prob.linear.push_back({tag("rho", c), AffineExpr().add(sub.rho_var[c], 1.0)});
    prob.linear.push_back({tag("t_nonneg", c), AffineExpr().add(sub.t_var[c], 1.0)});
    if (sub.a_var[c] >= 0) {
      AffineExpr e(1.0);
      e.add(sub.a_var[c], -1.0);
      prob.linear.push_back({tag("split", c), e});
    }

    conic::LogTerm lt;
    lt.arg = AffineExpr(1.0);
    lt.arg.add(sub.rho_var[c], sg);
    prob.log_terms.push_back(lt);
  }
  add_power_constraints(sub);
  return sub;
}

Subproblem build_qos_power_min(const EffectiveChannels& eff, double power, double sinr_target) {
  const int nk = eff.num_clusters();
  Subproblem sub;
  sub.spec.sinr_target = sinr_target;
  sub.spec.fixed_split = 0.0;
  sub.spec.sic_constraint = false;
  sub.power = power;
  sub.dim = eff.dim;
  sub.num_cells = eff.num_cells;
  sub.clusters_per_cell = eff.clusters_per_cell;
  auto& prob = sub.problem;
  sub.q_offset = declare_q_vars(prob, nk, eff.dim);
  sub.a_var.assign(nk, -1);
  sub.t_var.assign(nk, -1);
  sub.rho_var.assign(nk, -1);
  for (int c = 0; c < nk; ++c) {
    sub.g_scale.push_back(std::max(power * eff.gv(c, c).squaredNorm(), kMinScale));
    sub.h_scale.push_back(std::max(power * eff.hv(c, c).squaredNorm(), kMinScale));
  }
  for (int c = 0; c < nk; ++c) {
    const int o = sub.q_offset[c];
    AffineExpr own_h;
    add_trace_terms(own_h, unit(eff.hv(c, c)), 1.0, o, eff.dim);
    const AffineExpr v = group2_interference(eff, sub.q_offset, power, c);
    prob.linear.push_back({tag("qos", c), own_h + (-sinr_target / sub.h_scale[c]) * v});
    prob.lmis.push_back(psd_block(c, o, eff.dim));
    prob.linear_objective += -1.0 * power_trace(o, eff.dim);
  }
  add_power_constraints(sub);
  return sub;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal:
      return "optimal";
    case SolveStatus::infeasible:
      return "infeasible";
    case SolveStatus::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

std::vector<double> neutral_guess(const Subproblem& sub) {
  const int nk = sub.num_clusters();
  const double share = sub.power / (sub.clusters_per_cell * sub.dim) * 0.9;
  std::vector<CMatrix> Q(nk, share * CMatrix::Identity(sub.dim, sub.dim));
  std::vector<double> a(nk, sub.spec.fixed_split.value_or(0.5));
  std::vector<double> t(nk, 0.0);
  std::vector<double> rho(nk, 0.0);
  return sub.encode(Q, a, t, rho);
}

std::vector<double> warm_start(const Subproblem& next, const SubproblemSolution& previous) {
  // The raw iterate, not a decode/encode round trip, which can land the
  // nearly rank-one blocks on the cone boundary.
  std::vector<double> x = previous.x;
  if (static_cast<int>(x.size()) != next.problem.num_vars()) {
    return next.encode(previous.Q, previous.a, previous.t, previous.rho);
  }
  for (int v : next.rho_var) {
    if (v >= 0) x[v] *= 0.5;
  }
  return x;
}

SubproblemSolution solve_subproblem(const Subproblem& sub, std::span<const double> initial_guess, const conic::Options& options) {
  SubproblemSolution sol;
  // No power cannot reach a positive SINR target.
  if (!(sub.power > 0.0) && (sub.spec.sic_constraint || sub.spec.qos_constraint) && sub.spec.sinr_target > 0.0) {
    sol.status = SolveStatus::infeasible;
    sol.message = "zero power budget";
    return sol;
  }
  conic::Result r = conic::solve(sub.problem, initial_guess, options);
  if (r.status == conic::Status::numerical_failure) {
    conic::Options retry = options;
    retry.mu = 8.0;
    retry.max_newton_total *= 2;
    const std::vector<double> x0 = neutral_guess(sub);
    r = conic::solve(sub.problem, x0, retry);
    sol.retried = true;
  }
  sol.message = r.message;
  switch (r.status) {
    case conic::Status::optimal:
      sol.status = SolveStatus::optimal;
      break;
    case conic::Status::infeasible:
      sol.status = SolveStatus::infeasible;
      return sol;
    case conic::Status::numerical_failure:
      sol.status = SolveStatus::numerical_failure;
      return sol;
  }
  sol.x = r.x;
  sol.gap = r.gap;
  sol.newton_steps = r.newton_steps + r.phase1_newton_steps;
  sol.max_violation = sub.problem.max_violation(r.x);
  const int nk = sub.num_clusters();
  sol.objective = 0.0;
  for (int c = 0; c < nk; ++c) {
    sol.Q.push_back(sub.decode_Q(r.x, c));
    sol.a.push_back(sub.a_var[c] >= 0 ? r.x[sub.a_var[c]] : sub.spec.fixed_split.value_or(0.0));
    sol.t.push_back(sub.t_var[c] >= 0 ? r.x[sub.t_var[c]] * std::sqrt(sub.g_scale[c]) : 0.0);
    const double rho = sub.rho_var[c] >= 0 ? r.x[sub.rho_var[c]] * sub.g_scale[c] : 0.0;
    sol.rho.push_back(rho);
    sol.objective += std::log2(1.0 + rho);
  }
  return sol;
}

RankRatio rank_ratio(const CMatrix& Q) {
  RankRatio out;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(Q, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double l1 = ev(ev.size() - 1);
  if (!(l1 > 0.0) || l1 < std::numeric_limits<double>::min()) {
    out.zero_matrix = true;
    out.ratio = 0.0;
    return out;
  }
  if (ev.size() == 1) {
    out.ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  const double l2 = ev(ev.size() - 2);
  out.ratio = l2 <= 1e-15 * l1 ? std::numeric_limits<double>::infinity() : l1 / l2;
  return out;
}

CVector extract_beamformer(const CMatrix& Q) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(Q);
  const Eigen::Index top = Q.rows() - 1;
  const double lambda = std::max(es.eigenvalues()(top), 0.0);
  CVector e = es.eigenvectors().col(top);
  const double scale = e.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (std::abs(e(i)) > 1e-12 * scale) {
      e *= std::conj(e(i)) / std::abs(e(i));
      e(i) = std::abs(e(i));
      break;
    }
  }
  return std::sqrt(lambda) * e;
}

}  // namespace nomacomp
