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

#include "advhyp/gendiv.h"

#include <cmath>
#include <limits>
#include <string>

#include "advhyp/transport.h"
#include "coupling_program.h"

namespace advhyp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_inputs(const Pmf& a, const Pmf& p, const DistortionMatrix& d, double delta) {
  if (a.alphabet_size() != p.alphabet_size() || d.alphabet_size() != p.alphabet_size()) {
    throw DimensionError("gen_divergence: alphabet sizes differ");
  }
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ValidationError("gen_divergence: delta must be finite and >= 0");
  }
}

// D(counts / n || p) in nats.
double type_divergence(const std::vector<int>& counts, int n, const Pmf& p) {
  double total = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (p[i] <= 0.0) return kInf;
    const double q = static_cast<double>(counts[i]) / n;
    total += q * std::log(q / p[i]);
  }
  return std::max(0.0, total);
}

double binomial_double(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double empirical_impl(const Composition& y_type, const Pmf& p,
                      const DistortionBudget& budget) {
  const int k = y_type.alphabet_size();
  const int n = y_type.n();
  if (n < 1) throw ValidationError("gen_divergence_empirical: n must be >= 1");
  if (binomial_double(n + k - 1, k - 1) > static_cast<double>(kJointCompositionBudget)) {
    throw ResourceError("gen_divergence_empirical: too many x types for n = " +
                        std::to_string(n));
  }
  std::vector<double> ycounts(y_type.counts().begin(), y_type.counts().end());
  std::vector<double> xcounts(k);
  double best = kInf;
  for (const Composition& x : all_compositions(n, k)) {
    const double div = type_divergence(x.counts(), n, p);
    if (!(div < best)) continue;
    for (int i = 0; i < k; ++i) xcounts[i] = x[i];
    // Integer marginals make the transportation polytope integral, so the LP
    // optimum is attained by a joint composition.
    const RawTransport t = solve_transport(xcounts, ycounts, budget.unit_costs());
    if (budget.AdmitsCost(t.cost, n)) best = div;
  }
  return best;
}

}  // namespace

GenDivResult gen_divergence(const Pmf& py, const Pmf& p, const DistortionMatrix& d,
                            double delta) {
  check_inputs(py, p, d, delta);
  const int k = p.alphabet_size();
  internal::ProgramBuilder builder(k);
  const internal::Block q = builder.AddBlock();
  builder.ColumnMarginal(q, py);
  builder.DistortionAtMost(q, d, delta);
  solvers::KlTerm objective = builder.RowKl(q, p);
  builder.program().objective_kl = std::move(objective);
  const solvers::ConvexSolution sol = solvers::solve_convex(builder.Finish());

  if (sol.status == solvers::ConvexStatus::kInfeasible) {
    GenDivResult r{kInf, py, Coupling::Diagonal(py), {}};
    r.diagnostics.infinite_reason = "support";
    return r;
  }
  Coupling c = internal::extract_coupling(sol.x, q);
  Pmf px = c.x_marginal();
  GenDivResult r{kl_divergence(px, p), std::move(px), std::move(c), {}};
  r.diagnostics.iterations = sol.newton_steps;
  r.diagnostics.primal_dual_gap = sol.gap;
  r.diagnostics.converged = sol.status == solvers::ConvexStatus::kOptimal;
  return r;
}

double gen_divergence_empirical(const Composition& y_type, const Pmf& p,
                                const DistortionMatrix& d, double delta) {
  if (y_type.alphabet_size() != p.alphabet_size() ||
      d.alphabet_size() != p.alphabet_size()) {
    throw DimensionError("gen_divergence_empirical: alphabet sizes differ");
  }
  return empirical_impl(y_type, p, DistortionBudget(d, delta));
}

EmpiricalGenDiv::EmpiricalGenDiv(const Pmf& p, const DistortionMatrix& d, double delta)
    : p_(p), d_(d), budget_(d, delta) {
  if (d.alphabet_size() != p.alphabet_size()) {
    throw DimensionError("EmpiricalGenDiv: alphabet sizes differ");
  }
}

double EmpiricalGenDiv::operator()(const Composition& y_type) const {
  if (y_type.alphabet_size() != p_.alphabet_size()) {
    throw DimensionError("EmpiricalGenDiv: alphabet sizes differ");
  }
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(y_type.counts());
    if (it != memo_.end()) return it->second;
  }
  const double v = empirical_impl(y_type, p_, budget_);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(y_type.counts(), v);
  return v;
}

}  // namespace advhyp
