// Copyright 2026 The advhyp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Log-barrier interior-point solver for small convex programs whose only
// nonlinearity is a relative-entropy term of grouped variables:
//
//   minimize    cost . x + KL(G x || r)
//   subject to  A x = b,  C x <= h,  KL_k(G_k x || r_k) + l_k . x <= rhs_k,
//               x >= 0 (except variables marked free).
//
// Before the barrier runs, every variable and linear inequality is probed with
// an LP. Variables that cannot be positive are removed and inequalities that
// cannot be slack become equalities, so the barrier always starts from the
// relative interior of the linear part even when it has empty interior
// (e.g. a zero distortion budget).

#ifndef ADVHYP_SOLVERS_BARRIER_H_
#define ADVHYP_SOLVERS_BARRIER_H_

#include <optional>
#include <utility>
#include <vector>

#include "advhyp/solvers/lp.h"

namespace advhyp::solvers {

// sum_g q_g ln(q_g / reference_g) with q_g the sum of x over groups[g].
// Every reference must be positive; callers pin variables of zero-reference
// groups through ConvexProgram::fixed_zero instead.
struct KlTerm {
  std::vector<std::vector<int>> groups;
  std::vector<double> reference;

  double Evaluate(const std::vector<double>& x) const;
};

// kl(x) + linear . x <= rhs
struct KlConstraint {
  KlTerm kl;
  std::vector<std::pair<int, double>> linear;
  double rhs = 0.0;
};

struct ConvexProgram {
  int num_vars = 0;
  std::vector<bool> free;  // empty: every variable is nonnegative
  std::vector<double> cost;
  std::optional<KlTerm> objective_kl;
  std::vector<SparseRow> equalities;
  std::vector<SparseRow> inequalities;
  std::vector<KlConstraint> kl_constraints;
  std::vector<int> fixed_zero;
};

struct BarrierOptions {
  double gap_tolerance = 1e-11;
  double growth = 10.0;
  int max_newton_per_centering = 80;
  int max_newton_total = 100000;
};

enum class ConvexStatus {
  kOptimal,
  // The linear part is empty, or no point satisfies the entropy
  // constraints strictly.
  kInfeasible,
  kIterationCap,
};

struct ConvexSolution {
  ConvexStatus status = ConvexStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  double gap = 0.0;  // m / t at termination
  int newton_steps = 0;
  int lp_solves = 0;
};

ConvexSolution solve_convex(const ConvexProgram& program,
                            const BarrierOptions& options = {});

}  // namespace advhyp::solvers

#endif  // ADVHYP_SOLVERS_BARRIER_H_
