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

#include "nomacomp/conic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace nomacomp::conic {

// ---------------------------------------------------------------- AffineExpr

AffineExpr& AffineExpr::add(int var, double coef) {
  terms.push_back({var, coef});
  return *this;
}

AffineExpr& AffineExpr::operator+=(const AffineExpr& other) {
  terms.insert(terms.end(), other.terms.begin(), other.terms.end());
  constant += other.constant;
  return *this;
}

AffineExpr& AffineExpr::operator*=(double s) {
  for (auto& t : terms) t.coef *= s;
  constant *= s;
  return *this;
}

void AffineExpr::canonicalize() {
  std::sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
  std::vector<Term> merged;
  merged.reserve(terms.size());
  for (const auto& t : terms) {
    if (!merged.empty() && merged.back().var == t.var) {
      merged.back().coef += t.coef;
    } else {
      merged.push_back(t);
    }
  }
  std::erase_if(merged, [](const Term& t) { return t.coef == 0.0; });
  terms = std::move(merged);
}

double AffineExpr::eval(std::span<const double> x) const {
  double v = constant;
  for (const auto& t : terms) v += t.coef * x[t.var];
  return v;
}

double AffineExpr::max_abs() const {
  double m = std::abs(constant);
  for (const auto& t : terms) m = std::max(m, std::abs(t.coef));
  return m;
}

AffineExpr operator*(double s, AffineExpr e) {
  e *= s;
  return e;
}

AffineExpr operator+(AffineExpr a, const AffineExpr& b) {
  a += b;
  return a;
}

// ---------------------------------------------------------------- LMI

LmiConstraint::LmiConstraint(std::string lbl, int n)
    : label(std::move(lbl)), side(n), constant(CMatrix::Zero(n, n)) {}

void LmiConstraint::add_entry(int r, int c, const std::vector<std::pair<int, cplx>>& coefs, cplx constant_part) {
  constant(r, c) += constant_part;
  if (r != c) constant(c, r) += std::conj(constant_part);
  for (const auto& [var, coef] : coefs) {
    elements.push_back({r, c, var, coef});
    if (r != c) elements.push_back({c, r, var, std::conj(coef)});
  }
}

CMatrix LmiConstraint::eval(std::span<const double> x) const {
  CMatrix X = constant;
  for (const auto& e : elements) X(e.row, e.col) += e.coef * x[e.var];
  return X;
}

// ---------------------------------------------------------------- Problem

int Problem::add_var(std::string name) {
  var_names.push_back(std::move(name));
  return static_cast<int>(var_names.size()) - 1;
}

double Problem::objective(std::span<const double> x) const {
  double f = linear_objective.eval(x);
  for (const auto& lt : log_terms) f += lt.weight * std::log(lt.arg.eval(x));
  return f;
}

namespace {

double min_eigenvalue(const CMatrix& X) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Smallest shift s such that (y + s)(z + s) >= ||w||^2 with y + s, z + s >= 0.
double cone_shift(double y, double z, double wsq) {
  const double root = 0.5 * (-(y + z) + std::sqrt((y - z) * (y - z) + 4.0 * wsq));
  return std::max({-y, -z, root});
}

}  // namespace

double Problem::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  for (const auto& c : linear) worst = std::max(worst, -c.expr.eval(x));
  for (const auto& c : cones) {
    const double y = c.y.eval(x);
    const double z = c.z.eval(x);
    double wsq = 0.0;
    for (const auto& w : c.w) wsq += std::pow(w.eval(x), 2);
    const double gm = std::sqrt(std::max(y, 0.0) * std::max(z, 0.0));
    worst = std::max({worst, -y, -z, std::sqrt(wsq) - gm});
  }
  for (const auto& c : lmis) worst = std::max(worst, -min_eigenvalue(c.eval(x)));
  return worst;
}

double Problem::barrier_parameter() const {
  double theta = static_cast<double>(linear.size()) + 2.0 * static_cast<double>(cones.size());
  for (const auto& c : lmis) theta += c.side;
  return theta;
}

namespace {

void dump_expr(std::ostream& os, const AffineExpr& e) {
  os << e.constant << " " << e.terms.size();
  for (const auto& t : e.terms) os << " " << t.var << ":" << t.coef;
  os << "\n";
}

}  // namespace

void Problem::dump(std::ostream& os) const {
  const auto old_precision = os.precision(17);
  os << "# conic problem: maximize sum w*ln(arg) + linear, subject to listed cones\n";
  os << "# expression format: <constant> <nterms> <var>:<coef> ...\n";
  os << "variables " << num_vars() << "\n";
  for (int i = 0; i < num_vars(); ++i) os << "var " << i << " " << var_names[i] << "\n";
  os << "objective maximize\n";
  for (const auto& lt : log_terms) {
    os << "log " << lt.weight << " ";
    dump_expr(os, lt.arg);
  }
  os << "linobj ";
  dump_expr(os, linear_objective);
  for (const auto& c : linear) {
    os << "linear " << c.label << " ";
    dump_expr(os, c.expr);
  }
  for (const auto& c : cones) {
    os << "rcone " << c.label << " " << c.w.size() << "\n  y ";
    dump_expr(os, c.y);
    os << "  z ";
    dump_expr(os, c.z);
    for (const auto& w : c.w) {
      os << "  w ";
      dump_expr(os, w);
    }
  }
  for (const auto& c : lmis) {
    os << "lmi " << c.label << " " << c.side << " " << c.elements.size() << "\n";
    for (int r = 0; r < c.side; ++r) {
      for (int k = 0; k < c.side; ++k) {
        const cplx v = c.constant(r, k);
        if (v != 0.0) os << "  const " << r << " " << k << " " << v.real() << " " << v.imag() << "\n";
      }
    }
    for (const auto& e : c.elements) {
      os << "  coef " << e.row << " " << e.col << " " << e.var << " " << e.coef.real() << " " << e.coef.imag()
         << "\n";
    }
  }
  os << "end\n";
  os.precision(old_precision);
}

const char* to_string(Status s) {
  switch (s) {
    case Status::optimal:
      return "optimal";
    case Status::infeasible:
      return "infeasible";
    case Status::numerical_failure:
      return "numerical_failure";
  }
  return "unknown";
}

// ---------------------------------------------------------------- barrier

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Rescales every constraint so its largest coefficient is O(1). The feasible
// set is unchanged and the log barrier only shifts by constants.
Problem normalized(const Problem& p) {
  Problem q = p;
  for (auto& c : q.linear) {
    c.expr.canonicalize();
    const double m = c.expr.max_abs();
    if (m > 0.0) c.expr *= 1.0 / m;
  }
  for (auto& c : q.cones) {
    c.y.canonicalize();
    c.z.canonicalize();
    for (auto& w : c.w) w.canonicalize();
    const double ny = c.y.max_abs();
    const double nz = c.z.max_abs();
    if (ny > 0.0 && nz > 0.0) {
      const double lam = std::sqrt(ny / nz);
      const double k = std::sqrt(ny * nz);
      c.y *= 1.0 / (lam * k);
      c.z *= lam / k;
      for (auto& w : c.w) w *= 1.0 / k;
    }
  }
  for (auto& c : q.lmis) {
    double m = c.constant.cwiseAbs().maxCoeff();
    for (const auto& e : c.elements) m = std::max(m, std::abs(e.coef));
    if (m > 0.0) {
      c.constant /= m;
      for (auto& e : c.elements) e.coef /= m;
    }
  }
  for (auto& lt : q.log_terms) lt.arg.canonicalize();
  q.linear_objective.canonicalize();
  return q;
}

void add_outer(MatrixXd& H, const std::vector<Term>& a, const std::vector<Term>& b, double s) {
  for (const auto& ta : a) {
    const double sa = s * ta.coef;
    for (const auto& tb : b) H(ta.var, tb.var) += sa * tb.coef;
  }
}

void add_grad(VectorXd& g, const std::vector<Term>& a, double s) {
  for (const auto& t : a) g(t.var) += s * t.coef;
}

// F(x) = -tau * objective(x) + barrier(x); all constraints strictly inside.
class BarrierFunction {
 public:
  explicit BarrierFunction(const Problem& p) : p_(p), n_(p.num_vars()) {}

  int size() const { return n_; }

  // Returns false when x is outside the barrier domain.
  bool value(std::span<const double> x, double tau, double& F) const {
    F = -tau * p_.linear_objective.eval(x);
    for (const auto& lt : p_.log_terms) {
      const double a = lt.arg.eval(x);
      if (!(a > 0.0)) return false;
      F -= tau * lt.weight * std::log(a);
    }
    for (const auto& c : p_.linear) {
      const double e = c.expr.eval(x);
      if (!(e > 0.0)) return false;
      F -= std::log(e);
    }
    for (const auto& c : p_.cones) {
      const double y = c.y.eval(x);
      const double z = c.z.eval(x);
      if (!(y > 0.0) || !(z > 0.0)) return false;
      double wsq = 0.0;
      for (const auto& w : c.w) wsq += std::pow(w.eval(x), 2);
      const double d = y * z - wsq;
      if (!(d > 0.0)) return false;
      F -= std::log(d);
    }
    for (const auto& c : p_.lmis) {
      Eigen::LLT<CMatrix> llt(c.eval(x));
      if (llt.info() != Eigen::Success) return false;
      double logdet = 0.0;
      for (int i = 0; i < c.side; ++i) {
        const double l = std::real(llt.matrixL()(i, i));
        if (!(l > 0.0)) return false;
        logdet += 2.0 * std::log(l);
      }
      F -= logdet;
    }
    return std::isfinite(F);
  }

  bool derivatives(std::span<const double> x, double tau, double& F, VectorXd& g, MatrixXd& H) const {
    if (!value(x, tau, F)) return false;
    g = VectorXd::Zero(n_);
    H = MatrixXd::Zero(n_, n_);
    add_grad(g, p_.linear_objective.terms, -tau);
    for (const auto& lt : p_.log_terms) {
      const double a = lt.arg.eval(x);
      add_grad(g, lt.arg.terms, -tau * lt.weight / a);
      add_outer(H, lt.arg.terms, lt.arg.terms, tau * lt.weight / (a * a));
    }
    for (const auto& c : p_.linear) {
      const double e = c.expr.eval(x);
      add_grad(g, c.expr.terms, -1.0 / e);
      add_outer(H, c.expr.terms, c.expr.terms, 1.0 / (e * e));
    }
    for (const auto& c : p_.cones) {
      const double y = c.y.eval(x);
      const double z = c.z.eval(x);
      std::vector<double> wv(c.w.size());
      double wsq = 0.0;
      for (std::size_t j = 0; j < c.w.size(); ++j) {
        wv[j] = c.w[j].eval(x);
        wsq += wv[j] * wv[j];
      }
      const double d = y * z - wsq;
      AffineExpr grad_d;
      grad_d += z * c.y;
      grad_d += y * c.z;
      for (std::size_t j = 0; j < c.w.size(); ++j) grad_d += (-2.0 * wv[j]) * c.w[j];
      grad_d.canonicalize();
      add_grad(g, grad_d.terms, -1.0 / d);
      add_outer(H, grad_d.terms, grad_d.terms, 1.0 / (d * d));
      add_outer(H, c.y.terms, c.z.terms, -1.0 / d);
      add_outer(H, c.z.terms, c.y.terms, -1.0 / d);
      for (const auto& w : c.w) add_outer(H, w.terms, w.terms, 2.0 / d);
    }
    for (const auto& c : p_.lmis) {
      const CMatrix X = c.eval(x);
      Eigen::LLT<CMatrix> llt(X);
      const CMatrix W = llt.solve(CMatrix::Identity(c.side, c.side));
      for (const auto& e : c.elements) g(e.var) -= std::real(e.coef * W(e.col, e.row));
      for (const auto& e1 : c.elements) {
        for (const auto& e2 : c.elements) {
          H(e1.var, e2.var) += std::real(e1.coef * e2.coef * W(e2.col, e1.row) * W(e1.col, e2.row));
        }
      }
    }
    return true;
  }

 private:
  const Problem& p_;
  int n_;
};

struct CenterOutcome {
  bool ok = true;
  bool stalled = false;
  int steps = 0;
};

// Damped Newton minimization of F for fixed tau. x is updated in place.
CenterOutcome center(const BarrierFunction& bf, std::vector<double>& x, double tau, const Options& opt,
                     int budget) {
  CenterOutcome out;
  const int n = bf.size();
  VectorXd g;
  MatrixXd H;
  std::vector<double> trial(n);
  for (int it = 0; it < std::min(opt.max_newton_per_center, budget); ++it) {
    double F = 0.0;
    if (!bf.derivatives(x, tau, F, g, H)) {
      out.ok = false;
      return out;
    }
    // Jacobi equilibration before the Cholesky solve.
    VectorXd dscale(n);
    for (int i = 0; i < n; ++i) dscale(i) = H(i, i) > 0.0 ? 1.0 / std::sqrt(H(i, i)) : 1.0;
    MatrixXd Hs = dscale.asDiagonal() * H * dscale.asDiagonal();
    VectorXd rhs = -(dscale.cwiseProduct(g));
    Eigen::LLT<MatrixXd> llt(Hs);
    double ridge = 1e-14;
    while (llt.info() != Eigen::Success && ridge < 1e-4) {
      llt.compute(Hs + ridge * MatrixXd::Identity(n, n));
      ridge *= 100.0;
    }
    if (llt.info() != Eigen::Success) {
      out.ok = false;
      return out;
    }
    const VectorXd dx = dscale.cwiseProduct(llt.solve(rhs));
    const double slope = g.dot(dx);
    const double lambda_sq = -slope;
    ++out.steps;
    if (!(lambda_sq >= 0.0) || !std::isfinite(lambda_sq)) {
      out.ok = false;
      return out;
    }
    if (0.5 * lambda_sq <= opt.newton_tolerance) return out;

    const bool near = lambda_sq < 0.04;
    double step = 1.0;
    bool accepted = false;
    while (step > 1e-14) {
      for (int i = 0; i < n; ++i) trial[i] = x[i] + step * dx(i);
      double Ft = 0.0;
      if (bf.value(trial, tau, Ft)) {
        if (near || Ft <= F + 0.01 * step * slope) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      out.stalled = true;
      return out;
    }
    x = trial;
  }
  return out;
}

double required_shift(const Problem& p, std::span<const double> x) {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& c : p.linear) s = std::max(s, -c.expr.eval(x));
  for (const auto& lt : p.log_terms) s = std::max(s, -lt.arg.eval(x));
  for (const auto& c : p.cones) {
    double wsq = 0.0;
    for (const auto& w : c.w) wsq += std::pow(w.eval(x), 2);
    s = std::max(s, cone_shift(c.y.eval(x), c.z.eval(x), wsq));
  }
  for (const auto& c : p.lmis) s = std::max(s, -min_eigenvalue(c.eval(x)));
  return s;
}

// Phase I: maximize -s subject to every constraint relaxed by s, s >= -1.
Problem phase1_problem(const Problem& p) {
  Problem q;
  q.var_names = p.var_names;
  const int s = q.add_var("phase1_slack");
  q.linear_objective.add(s, -1.0);
  for (const auto& c : p.linear) {
    LinearConstraint lc = c;
    lc.expr.add(s, 1.0);
    q.linear.push_back(std::move(lc));
  }
  for (const auto& lt : p.log_terms) {
    LinearConstraint lc{"log_domain", lt.arg};
    const double m = lc.expr.max_abs();
    if (m > 0.0) lc.expr *= 1.0 / m;
    lc.expr.add(s, 1.0);
    q.linear.push_back(std::move(lc));
  }
  for (const auto& c : p.cones) {
    ConeConstraint cc = c;
    cc.y.add(s, 1.0);
    cc.z.add(s, 1.0);
    q.cones.push_back(std::move(cc));
  }
  for (const auto& c : p.lmis) {
    LmiConstraint lc = c;
    for (int i = 0; i < c.side; ++i) lc.elements.push_back({i, i, s, 1.0});
    q.lmis.push_back(std::move(lc));
  }
  LinearConstraint floor{"phase1_floor", AffineExpr(1.0)};
  floor.expr.add(s, 1.0);
  q.linear.push_back(std::move(floor));
  return q;
}

}  // namespace

Result solve(const Problem& problem, std::span<const double> initial_guess, const Options& opt) {
  Result res;
  const int n = problem.num_vars();
  if (static_cast<int>(initial_guess.size()) != n) {
    res.message = "initial guess has wrong size";
    return res;
  }
  const Problem np = normalized(problem);
  std::vector<double> x(initial_guess.begin(), initial_guess.end());
  int budget = opt.max_newton_total;

  // Constant-only constraints decide feasibility on their own.
  for (const auto& c : np.linear) {
    if (c.expr.terms.empty() && !(c.expr.constant > 0.0)) {
      res.status = Status::infeasible;
      res.message = "constant constraint '" + c.label + "' violated";
      res.phase1_value = -c.expr.constant;
      return res;
    }
  }

  const double shift0 = required_shift(np, x);
  res.phase1_value = shift0;
  // Any point inside the barrier domain is a valid phase II start.
  double f0 = 0.0;
  if (!BarrierFunction(np).value(x, 1.0, f0)) {
    const Problem p1 = phase1_problem(np);
    const BarrierFunction bf1(p1);
    std::vector<double> x1 = x;
    const double s0 = std::max(shift0, 0.0);
    x1.push_back(s0 + 1.0);
    const double theta1 = p1.barrier_parameter();
    double tau = theta1 / (s0 + 2.0);
    bool found = false;
    for (int outer = 0; outer < 60 && budget > 0; ++outer) {
      const CenterOutcome co = center(bf1, x1, tau, opt, budget);
      budget -= co.steps;
      res.phase1_newton_steps += co.steps;
      if (!co.ok) {
        res.message = "phase I Newton failure";
        return res;
      }
      const double s = x1.back();
      res.phase1_value = s;
      if (s < 0.0) {
        found = true;
        break;
      }
      const double gap = theta1 / tau;
      if (s - gap > 0.0) {
        res.status = Status::infeasible;
        res.message = "phase I lower bound is positive";
        return res;
      }
      if (gap < 1e-10 || co.stalled) {
        // Boundary-feasible or too thin to enter; not a certificate.
        res.message = "no strictly feasible point found";
        return res;
      }
      tau *= opt.mu;
    }
    if (!found) {
      res.message = "phase I did not terminate";
      return res;
    }
    x.assign(x1.begin(), x1.end() - 1);
  }

  const BarrierFunction bf(np);
  const double theta = np.barrier_parameter();
  double tau = 1.0;
  double completed_gap = std::numeric_limits<double>::infinity();
  for (int outer = 0; outer < 100; ++outer) {
    const CenterOutcome co = center(bf, x, tau, opt, budget);
    budget -= co.steps;
    res.newton_steps += co.steps;
    if (!co.ok) {
      res.message = "phase II Newton failure";
      break;
    }
    if (co.stalled) {
      res.message = "line search stalled";
      break;
    }
    completed_gap = theta / tau;
    if (completed_gap <= opt.gap_tolerance) break;
    if (budget <= 0) {
      res.message = "Newton budget exhausted";
      break;
    }
    tau *= opt.mu;
  }
  res.x = x;
  res.gap = completed_gap;
  res.objective = problem.objective(x);
  const double accept = std::max(1e-6, 1e-9 * std::abs(res.objective));
  if (completed_gap <= opt.gap_tolerance || completed_gap <= accept) {
    res.status = Status::optimal;
  } else {
    res.status = Status::numerical_failure;
  }
  return res;
}

}  // namespace nomacomp::conic
