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

#include "advhyp/solvers/lp.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace advhyp::solvers {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;
constexpr int kMaxPivots = 100000;

class Tableau {
 public:
  Tableau(int rows, int cols)
      : rows_(rows), cols_(cols), t_((rows + 1) * (cols + 1), 0.0),
        basis_(rows, -1) {}

  double& at(int r, int c) { return t_[r * (cols_ + 1) + c]; }
  double at(int r, int c) const { return t_[r * (cols_ + 1) + c]; }
  double& rhs(int r) { return at(r, cols_); }
  // Row `rows_` holds reduced costs; its rhs slot holds -objective.
  double& cost(int c) { return at(rows_, c); }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::vector<int>& basis() { return basis_; }

  void Pivot(int r, int c) {
    const double p = at(r, c);
    for (int j = 0; j <= cols_; ++j) at(r, j) /= p;
    at(r, c) = 1.0;
    for (int i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  void PriceOut(const std::vector<double>& costs) {
    for (int j = 0; j <= cols_; ++j) at(rows_, j) = j < cols_ ? costs[j] : 0.0;
    for (int i = 0; i < rows_; ++i) {
      const double cb = costs[basis_[i]];
      if (cb == 0.0) continue;
      for (int j = 0; j <= cols_; ++j) at(rows_, j) -= cb * at(i, j);
    }
  }

  // Bland's rule: lowest-index entering column, lowest-index leaving variable
  // among ratio ties.
  LpStatus Optimize(int allowed_cols, int* pivots) {
    while (true) {
      if (*pivots > kMaxPivots) return LpStatus::kIterationLimit;
      int enter = -1;
      for (int j = 0; j < allowed_cols; ++j) {
        if (cost(j) < -kCostTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return LpStatus::kOptimal;
      int leave = -1;
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i < rows_; ++i) {
        const double a = at(i, enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (leave < 0 || ratio < best - 1e-14) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + 1e-14 && basis_[i] < basis_[leave]) {
          leave = i;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      Pivot(leave, enter);
      ++*pivots;
    }
  }

 private:
  int rows_;
  int cols_;
  std::vector<double> t_;
  std::vector<int> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const int n = lp.num_vars;
  const int n_eq = static_cast<int>(lp.equalities.size());
  const int n_le = static_cast<int>(lp.inequalities.size());
  const int m = n_eq + n_le;
  const int slack0 = n;
  const int art0 = n + n_le;
  const int cols = n + n_le + m;

  Tableau tab(m, cols);
  double rhs_scale = 1.0;
  for (int r = 0; r < m; ++r) {
    const bool is_eq = r < n_eq;
    const SparseRow& row = is_eq ? lp.equalities[r] : lp.inequalities[r - n_eq];
    const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
    for (const auto& [j, a] : row.terms) tab.at(r, j) += sign * a;
    if (!is_eq) tab.at(r, slack0 + (r - n_eq)) = sign;
    tab.at(r, art0 + r) = 1.0;
    tab.rhs(r) = sign * row.rhs;
    tab.basis()[r] = art0 + r;
    rhs_scale = std::max(rhs_scale, std::abs(row.rhs));
  }

  LpSolution out;
  std::vector<double> costs(cols, 0.0);
  for (int r = 0; r < m; ++r) costs[art0 + r] = 1.0;
  tab.PriceOut(costs);
  LpStatus st = tab.Optimize(cols, &out.pivots);
  if (st == LpStatus::kIterationLimit) {
    out.status = st;
    return out;
  }
  if (-tab.cost(cols) > 1e-9 * rhs_scale) {
    out.status = LpStatus::kInfeasible;
    return out;
  }
  // Drive zero-level artificials out of the basis where possible; rows where
  // that fails are redundant and stay pinned at zero.
  for (int r = 0; r < m; ++r) {
    if (tab.basis()[r] < art0) continue;
    for (int j = 0; j < art0; ++j) {
      if (std::abs(tab.at(r, j)) > 1e-9) {
        tab.Pivot(r, j);
        ++out.pivots;
        break;
      }
    }
  }

  std::fill(costs.begin(), costs.end(), 0.0);
  for (int j = 0; j < n && j < static_cast<int>(lp.objective.size()); ++j) {
    costs[j] = lp.objective[j];
  }
  tab.PriceOut(costs);
  st = tab.Optimize(art0, &out.pivots);
  out.status = st;
  if (st != LpStatus::kOptimal) return out;

  out.x.assign(n, 0.0);
  for (int r = 0; r < m; ++r) {
    const int b = tab.basis()[r];
    if (b < n) out.x[b] = std::max(0.0, tab.rhs(r));
  }
  out.value = 0.0;
  for (int j = 0; j < n && j < static_cast<int>(lp.objective.size()); ++j) {
    out.value += lp.objective[j] * out.x[j];
  }
  return out;
}

}  // namespace advhyp::solvers
