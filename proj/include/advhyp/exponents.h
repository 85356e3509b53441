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

// Equilibrium error exponents of the Neyman-Pearson and Bayesian detection
// games, their limits, and the indistinguishability region.

#ifndef ADVHYP_EXPONENTS_H_
#define ADVHYP_EXPONENTS_H_

#include <optional>
#include <utility>
#include <vector>

#include "advhyp/simplex.h"

namespace advhyp {

struct GameSpec {
  Pmf p0;
  Pmf p1;
  DistortionMatrix d;
  double delta0 = 0.0;
  double delta1 = 0.0;
  std::optional<double> lambda;  // Neyman-Pearson game
  std::optional<double> a;       // Bayesian game

  // Alphabet sizes agree and both budgets are finite and >= 0.
  void Validate() const;
};

struct ExponentDiagnostics {
  int newton_steps = 0;
  int lp_solves = 0;
  double gap = 0.0;
  bool converged = true;
  // D~_{delta0}(argmin_py, P0) and D~_{delta1}(argmin_py, P1), recomputed.
  double d0_at_argmin = 0.0;
  double d1_at_argmin = 0.0;
  // Neyman-Pearson only: the FP constraint is active at the optimum.
  bool boundary_active = false;
};

struct ExponentResult {
  double value = 0.0;
  Pmf argmin_py;
  // Couplings attaining D~_{delta0} and D~_{delta1} at argmin_py.
  std::pair<Coupling, Coupling> witness_couplings;
  ExponentDiagnostics diagnostics;
};

// min D~_{delta1}(P_Y, P1) over D~_{delta0}(P_Y, P0) <= lambda, as one convex
// program over two couplings sharing their Y marginal.
ExponentResult np_fn_exponent(const GameSpec& spec);

// min D~_{delta0+delta1}(P_Y, P1) over D(P_Y || P0) <= lambda. Equal to
// np_fn_exponent for metric d, an upper bound otherwise.
ExponentResult np_fn_exponent_metric_form(const GameSpec& spec);

struct BayesExponents {
  // min over P_Y of max{D~1, D~0 - a}.
  ExponentResult payoff_exponent;
  // min D~1 over {D~0 - D~1 <= a}.
  double fn_exponent = 0.0;
  // min D~0 over {D~0 - D~1 >= a}; +infinity when that set is empty.
  double fp_exponent = 0.0;
  std::optional<Pmf> fp_argmin;
  int fp_rays = 0;
  // The fp search is exhaustive over directions only for K <= 3.
  bool fp_heuristic = false;
};

BayesExponents bayes_exponent(const GameSpec& spec);

struct LimitExponents {
  double np_limit = 0.0;
  double bayes_limit = 0.0;
};

LimitExponents limit_exponents(const GameSpec& spec);

struct Indistinguishability {
  bool member = false;
  double inner_value = 0.0;
  // Mixing weight of the closed-form minimizer alpha P0 + (1 - alpha) P;
  // only for metric d with emd(p0, p) > delta0.
  std::optional<double> alpha;
  double emd_p0_p = 0.0;
  // Metric d: |inner_value - max(0, emd - delta0)|.
  std::optional<double> closed_form_error;
};

Indistinguishability indistinguishability(const Pmf& p0, const Pmf& p,
                                          const DistortionMatrix& d, double delta0,
                                          double delta1);

struct SweepRow {
  Pmf pmf;
  bool member = false;
  double inner_value = 0.0;
  double np_limit = 0.0;
  double bayes_limit = 0.0;
};

// Lattice with spacing grid_step (1 / grid_step must be an integer). K = 2:
// p(0) = 0, step, ..., 1. K = 3: p = (i, j, m - i - j) / m with i then j
// ascending. Rows are computed on up to `threads` workers (0: hardware
// concurrency) and returned in lattice order.
std::vector<SweepRow> region_sweep(const Pmf& p0, const DistortionMatrix& d,
                                   double delta0, double delta1, double grid_step,
                                   int threads = 0);

std::vector<Pmf> sweep_lattice(int alphabet_size, double grid_step);

}  // namespace advhyp

#endif  // ADVHYP_EXPONENTS_H_
