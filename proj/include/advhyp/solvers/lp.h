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

// Dense two-phase simplex for the small linear programs that show up around
// the transport polytope (tens of variables). Bland's rule throughout.

#ifndef ADVHYP_SOLVERS_LP_H_
#define ADVHYP_SOLVERS_LP_H_

#include <utility>
#include <vector>

namespace advhyp::solvers {

// sum_k coeff_k * x[index_k] (op) rhs
struct SparseRow {
  std::vector<std::pair<int, double>> terms;
  double rhs = 0.0;

  double Evaluate(const std::vector<double>& x) const {
    double s = 0.0;
    for (const auto& [j, a] : terms) s += a * x[j];
    return s;
  }
};

// minimize objective . x  s.t.  equalities, inequalities (<=), x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> objective;  // empty means the zero objective
  std::vector<SparseRow> equalities;
  std::vector<SparseRow> inequalities;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double value = 0.0;
  int pivots = 0;
};

LpSolution solve_lp(const LinearProgram& lp);

}  // namespace advhyp::solvers

#endif  // ADVHYP_SOLVERS_LP_H_
