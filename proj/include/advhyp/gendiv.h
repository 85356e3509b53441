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

// Generalized divergence: the smallest D(P_X || P) over sources P_X that can
// be moved onto P_Y with expected distortion at most delta.

#ifndef ADVHYP_GENDIV_H_
#define ADVHYP_GENDIV_H_

#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "advhyp/budget.h"
#include "advhyp/simplex.h"
#include "advhyp/types.h"

namespace advhyp {

struct GenDivDiagnostics {
  int iterations = 0;  // Newton steps
  double primal_dual_gap = 0.0;
  bool converged = true;
  // Empty when finite; "support" when no feasible P_X lies inside supp(p).
  std::string infinite_reason;
};

struct GenDivResult {
  double value = 0.0;
  Pmf argmin_px;     // X marginal of `coupling`
  Coupling coupling;  // rows X, columns Y = py
  GenDivDiagnostics diagnostics;
};

// Coupling rows are the source letter x, columns the observed letter y.
GenDivResult gen_divergence(const Pmf& py, const Pmf& p, const DistortionMatrix& d,
                            double delta);

// Finite-n version: minimum of D(x-type / n || p) over x types that some
// admissible joint composition links to y_type. +infinity if none.
double gen_divergence_empirical(const Composition& y_type, const Pmf& p,
                                const DistortionMatrix& d, double delta);

// gen_divergence_empirical with a per-y-type memo, for repeated evaluation
// inside simulations. Thread-safe.
class EmpiricalGenDiv {
 public:
  EmpiricalGenDiv(const Pmf& p, const DistortionMatrix& d, double delta);

  double operator()(const Composition& y_type) const;

 private:
  Pmf p_;
  DistortionMatrix d_;
  DistortionBudget budget_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<int>, double> memo_;
};

}  // namespace advhyp

#endif  // ADVHYP_GENDIV_H_
