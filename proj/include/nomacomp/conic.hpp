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
#include <span>
#include <string>
#include <vector>

#include "nomacomp/types.hpp"

/// Small dense conic programs over real variables:
///
///   maximize   sum_i w_i * ln(arg_i(x)) + c^T x
///   subject to e_j(x) >= 0                       (linear)
///              y(x) z(x) >= ||w(x)||^2, y, z >= 0  (rotated second-order cone)
///              X(x) = X0 + sum_i x_i F_i  >= 0      (Hermitian LMI)
///
/// solved with a primal log-barrier path-following method. The concave
/// log objective enters the barrier function directly. A strictly feasible
/// start is found with a phase-I problem whose optimal value certifies
/// infeasibility when positive.
namespace nomacomp::conic {

struct Term {
  int var = 0;
  double coef = 0.0;
};

struct AffineExpr {
  std::vector<Term> terms;
  double constant = 0.0;

  AffineExpr() = default;
  explicit AffineExpr(double c) : constant(c) {}

  AffineExpr& add(int var, double coef);
  AffineExpr& operator+=(const AffineExpr& other);
  AffineExpr& operator*=(double s);
  /// Sort by variable, merge duplicates, drop exact zeros.
  void canonicalize();
  double eval(std::span<const double> x) const;
  double max_abs() const;
};

AffineExpr operator*(double s, AffineExpr e);
AffineExpr operator+(AffineExpr a, const AffineExpr& b);

// One coefficient of an LMI: entry (row, col) gains coef * x[var].
struct LmiElement {
  int row = 0;
  int col = 0;
  int var = 0;
  cplx coef;
};

struct LinearConstraint {
  std::string label;
  AffineExpr expr;  // expr >= 0
};

struct ConeConstraint {
  std::string label;
  AffineExpr y;
  AffineExpr z;
  std::vector<AffineExpr> w;
};

struct LmiConstraint {
  std::string label;
  int side = 0;
  CMatrix constant;
  std::vector<LmiElement> elements;  // both triangles

  LmiConstraint() = default;
  LmiConstraint(std::string lbl, int n);
  /// Sets entry (r, c) and its Hermitian mirror to constant + sum coef*x.
  void add_entry(int r, int c, const std::vector<std::pair<int, cplx>>& coefs, cplx constant_part = 0.0);
  CMatrix eval(std::span<const double> x) const;
};

struct LogTerm {
  AffineExpr arg;
  double weight = 1.0;
};

struct Problem {
  std::vector<std::string> var_names;
  std::vector<LogTerm> log_terms;
  AffineExpr linear_objective;
  std::vector<LinearConstraint> linear;
  std::vector<ConeConstraint> cones;
  std::vector<LmiConstraint> lmis;

  int num_vars() const { return static_cast<int>(var_names.size()); }
  int add_var(std::string name);
  double objective(std::span<const double> x) const;
  /// Largest constraint violation at x (0 when feasible).
  double max_violation(std::span<const double> x) const;
  /// Self-concordance parameter of the full barrier.
  double barrier_parameter() const;
  /// Plain-text dump: variable list, objective, cones, coefficient triplets.
  void dump(std::ostream& os) const;
};

enum class Status { optimal, infeasible, numerical_failure };

const char* to_string(Status s);

struct Options {
  double gap_tolerance = 1e-9;  // absolute bound theta / tau at exit
  double mu = 20.0;
  int max_newton_per_center = 100;
  int max_newton_total = 1500;
  double newton_tolerance = 1e-10;  // half squared Newton decrement
};

struct Result {
  Status status = Status::numerical_failure;
  std::vector<double> x;
  double objective = 0.0;
  double gap = 0.0;             // duality-gap bound at the returned point
  double phase1_value = 0.0;    // best phase-I slack (< 0 means strictly feasible)
  int newton_steps = 0;
  int phase1_newton_steps = 0;
  std::string message;
};

/// Solves the problem starting from an arbitrary initial guess (which need
/// not be feasible). Size of initial_guess must equal num_vars().
Result solve(const Problem& problem, std::span<const double> initial_guess, const Options& options = {});

}  // namespace nomacomp::conic
