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

#include "advhyp/solvers/barrier.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

namespace advhyp::solvers {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
// LP probe thresholds: a variable whose maximum is below kForcedZero is
// removed; one that reaches kCovered in some probe counts as interior.
constexpr double kForcedZero = 1e-12;
constexpr double kCovered = 1e-9;
constexpr double kNewtonTolerance = 1e-10;

struct ReducedKl {
  std::vector<std::vector<int>> groups;
  std::vector<double> reference;
};

struct ReducedKlConstraint {
  ReducedKl kl;
  std::vector<std::pair<int, double>> linear;
  double rhs = 0.0;
};

struct ReducedProgram {
  int n = 0;
  std::vector<bool> nonneg;
  VectorXd cost;
  std::optional<ReducedKl> objective;
  MatrixXd a;
  VectorXd b;
  // Orthonormal basis of {dx : a dx = 0}; Newton steps move only along it.
  MatrixXd z;
  std::vector<SparseRow> inequalities;
  std::vector<ReducedKlConstraint> kl;

  int NumBarrierTerms() const {
    int m = static_cast<int>(inequalities.size() + kl.size());
    for (bool nn : nonneg) m += nn ? 1 : 0;
    return m;
  }
};

double KlValue(const ReducedKl& t, const VectorXd& x) {
  double total = 0.0;
  for (size_t g = 0; g < t.groups.size(); ++g) {
    double q = 0.0;
    for (int v : t.groups[g]) q += x[v];
    if (q < 0.0) return kInf;
    if (q > 0.0) total += q * std::log(q / t.reference[g]);
  }
  return total;
}

void KlDerivatives(const ReducedKl& t, const VectorXd& x, double w,
                   VectorXd& grad, MatrixXd* hess) {
  for (size_t g = 0; g < t.groups.size(); ++g) {
    double q = 0.0;
    for (int v : t.groups[g]) q += x[v];
    const double dq = std::log(q / t.reference[g]) + 1.0;
    for (int v : t.groups[g]) {
      grad[v] += w * dq;
      if (hess != nullptr) {
        for (int u : t.groups[g]) (*hess)(v, u) += w / q;
      }
    }
  }
}

double ConstraintValue(const ReducedKlConstraint& c, const VectorXd& x) {
  double f = KlValue(c.kl, x) - c.rhs;
  for (const auto& [v, a] : c.linear) f += a * x[v];
  return f;
}

double RowValue(const SparseRow& row, const VectorXd& x) {
  double s = 0.0;
  for (const auto& [v, a] : row.terms) s += a * x[v];
  return s;
}

double Objective(const ReducedProgram& p, const VectorXd& x) {
  double f = p.cost.dot(x);
  if (p.objective) f += KlValue(*p.objective, x);
  return f;
}

// t * objective - sum of log barriers; +inf outside the domain.
double BarrierValue(const ReducedProgram& p, const VectorXd& x, double t) {
  double phi = t * Objective(p, x);
  for (int v = 0; v < p.n; ++v) {
    if (!p.nonneg[v]) continue;
    if (x[v] <= 0.0) return kInf;
    phi -= std::log(x[v]);
  }
  for (const auto& row : p.inequalities) {
    const double slack = row.rhs - RowValue(row, x);
    if (slack <= 0.0) return kInf;
    phi -= std::log(slack);
  }
  for (const auto& c : p.kl) {
    const double f = ConstraintValue(c, x);
    if (!(f < 0.0)) return kInf;
    phi -= std::log(-f);
  }
  return std::isfinite(phi) ? phi : kInf;
}

void BarrierDerivatives(const ReducedProgram& p, const VectorXd& x, double t,
                        VectorXd& grad, MatrixXd& hess) {
  grad = t * p.cost;
  hess.setZero(p.n, p.n);
  if (p.objective) KlDerivatives(*p.objective, x, t, grad, &hess);
  for (int v = 0; v < p.n; ++v) {
    if (!p.nonneg[v]) continue;
    grad[v] -= 1.0 / x[v];
    hess(v, v) += 1.0 / (x[v] * x[v]);
  }
  for (const auto& row : p.inequalities) {
    const double slack = row.rhs - RowValue(row, x);
    for (const auto& [v, a] : row.terms) {
      grad[v] += a / slack;
      for (const auto& [u, c] : row.terms) hess(v, u) += a * c / (slack * slack);
    }
  }
  for (const auto& c : p.kl) {
    const double f = ConstraintValue(c, x);
    VectorXd gf = VectorXd::Zero(p.n);
    MatrixXd hf = MatrixXd::Zero(p.n, p.n);
    KlDerivatives(c.kl, x, 1.0, gf, &hf);
    for (const auto& [v, a] : c.linear) gf[v] += a;
    grad += gf / (-f);
    hess += gf * gf.transpose() / (f * f) + hf / (-f);
  }
}

void ComputeNullBasis(ReducedProgram& p) {
  if (p.a.rows() == 0) {
    p.z = MatrixXd::Identity(p.n, p.n);
    return;
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(p.a.transpose());
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  const MatrixXd q = qr.householderQ() * MatrixXd::Identity(p.n, p.n);
  p.z = q.rightCols(p.n - rank);
}

// Newton step restricted to the null space of the equalities, so iterates
// that start on {a x = b} stay there to rounding. The reduced Hessian is
// diagonally scaled; barrier terms mix entries of wildly different size.
VectorXd NewtonDirection(const ReducedProgram& p, const VectorXd& grad,
                         const MatrixXd& hess, double* decrement_sq) {
  const int d = static_cast<int>(p.z.cols());
  if (d == 0) {
    *decrement_sq = 0.0;
    return VectorXd::Zero(p.n);
  }
  const MatrixXd hz = p.z.transpose() * hess * p.z;
  const VectorXd gz = p.z.transpose() * grad;
  VectorXd scale(d);
  for (int i = 0; i < d; ++i) {
    scale[i] = hz(i, i) > 0.0 ? 1.0 / std::sqrt(hz(i, i)) : 1.0;
  }
  const MatrixXd hs = scale.asDiagonal() * hz * scale.asDiagonal();
  const VectorXd rs = -scale.cwiseProduct(gz);
  Eigen::LDLT<MatrixXd> ldlt(hs);
  VectorXd y = ldlt.solve(rs);
  if (ldlt.info() != Eigen::Success || !y.allFinite()) y = hs.fullPivLu().solve(rs);
  *decrement_sq = y.dot(hs * y);
  return p.z * scale.cwiseProduct(y);
}

struct CenteringOutcome {
  bool converged = false;
  bool stopped_early = false;
};

CenteringOutcome Center(const ReducedProgram& p, VectorXd& x, double t,
                        const BarrierOptions& opt, int* newton_total,
                        const std::function<bool(const VectorXd&)>& stop) {
  CenteringOutcome out;
  VectorXd grad;
  MatrixXd hess;
  for (int it = 0; it < opt.max_newton_per_centering; ++it) {
    if (*newton_total >= opt.max_newton_total) return out;
    BarrierDerivatives(p, x, t, grad, hess);
    double dec_sq = 0.0;
    const VectorXd dx = NewtonDirection(p, grad, hess, &dec_sq);
    if (!dx.allFinite()) return out;
    if (dec_sq / 2.0 <= kNewtonTolerance) {
      out.converged = true;
      return out;
    }
    ++*newton_total;

    double step = 1.0;
    for (int v = 0; v < p.n; ++v) {
      if (p.nonneg[v] && dx[v] < 0.0) step = std::min(step, -0.99 * x[v] / dx[v]);
    }
    for (const auto& row : p.inequalities) {
      const double dc = RowValue(row, dx);
      if (dc > 0.0) {
        step = std::min(step, 0.99 * (row.rhs - RowValue(row, x)) / dc);
      }
    }
    const double phi0 = BarrierValue(p, x, t);
    const double slope = grad.dot(dx);
    const bool damped = dec_sq > 0.04;
    bool accepted = false;
    for (int halvings = 0; halvings < 80; ++halvings) {
      const VectorXd trial = x + step * dx;
      const double phi = BarrierValue(p, trial, t);
      if (std::isfinite(phi) &&
          (!damped || phi <= phi0 + 0.25 * step * slope)) {
        x = trial;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Rounding floor: the direction no longer decreases phi measurably.
      out.converged = dec_sq < 1e-6;
      return out;
    }
    if (stop && stop(x)) {
      out.stopped_early = true;
      return out;
    }
  }
  return out;
}

struct BarrierOutcome {
  bool converged = false;
  bool stopped_early = false;
  double gap = 0.0;
};

BarrierOutcome RunBarrier(const ReducedProgram& p, VectorXd& x,
                          const BarrierOptions& opt, int* newton_total,
                          const std::function<bool(const VectorXd&)>& stop) {
  BarrierOutcome out;
  const int m = p.NumBarrierTerms();
  double t = 1.0;
  bool all_converged = true;
  while (true) {
    const CenteringOutcome c = Center(p, x, t, opt, newton_total, stop);
    if (c.stopped_early) {
      out.stopped_early = true;
      return out;
    }
    all_converged = all_converged && c.converged;
    out.gap = m / t;
    if (*newton_total >= opt.max_newton_total) break;
    if (out.gap <= opt.gap_tolerance) break;
    t *= opt.growth;
  }
  out.converged = all_converged || *newton_total < opt.max_newton_total;
  return out;
}

}  // namespace

double KlTerm::Evaluate(const std::vector<double>& x) const {
  double total = 0.0;
  for (size_t g = 0; g < groups.size(); ++g) {
    double q = 0.0;
    for (int v : groups[g]) q += x[v];
    if (q > 0.0) total += q * std::log(q / reference[g]);
  }
  return total;
}

ConvexSolution solve_convex(const ConvexProgram& program,
                            const BarrierOptions& options) {
  const int n = program.num_vars;
  std::vector<bool> is_free(n, false);
  if (!program.free.empty()) {
    for (int v = 0; v < n; ++v) is_free[v] = program.free[v];
  }
  std::vector<bool> removed(n, false);
  for (int v : program.fixed_zero) removed[v] = true;

  ConvexSolution result;

  // --- LP probes on the linear part -------------------------------------
  std::vector<int> lp_index(n, -1);
  int n_lp = 0;
  for (int v = 0; v < n; ++v) {
    if (!is_free[v] && !removed[v]) lp_index[v] = n_lp++;
  }
  const auto remap_lp = [&](const SparseRow& row) {
    SparseRow out{{}, row.rhs};
    for (const auto& [v, a] : row.terms) {
      if (is_free[v]) {
        throw std::logic_error("solve_convex: free variable in a linear row");
      }
      if (lp_index[v] >= 0) out.terms.emplace_back(lp_index[v], a);
    }
    return out;
  };
  LinearProgram base;
  base.num_vars = n_lp;
  for (const auto& row : program.equalities) base.equalities.push_back(remap_lp(row));
  for (const auto& row : program.inequalities) {
    base.inequalities.push_back(remap_lp(row));
  }
  const int n_ineq = static_cast<int>(base.inequalities.size());

  std::vector<std::vector<double>> pool;
  std::vector<bool> var_covered(n_lp, false), forced(n_lp, false);
  std::vector<bool> ineq_covered(n_ineq, false), tight(n_ineq, false);
  const auto mark = [&](const std::vector<double>& xs) {
    for (int j = 0; j < n_lp; ++j) var_covered[j] = var_covered[j] || xs[j] > kCovered;
    for (int k = 0; k < n_ineq; ++k) {
      const double slack = base.inequalities[k].rhs - base.inequalities[k].Evaluate(xs);
      ineq_covered[k] = ineq_covered[k] || slack > kCovered;
    }
  };
  const auto probe = [&](std::vector<double> objective) {
    LinearProgram lp = base;
    lp.objective = std::move(objective);
    ++result.lp_solves;
    LpSolution s = solve_lp(lp);
    if (s.status == LpStatus::kUnbounded) {
      throw std::logic_error("solve_convex: unbounded linear part");
    }
    return s;
  };

  {
    LpSolution s = probe({});
    if (s.status != LpStatus::kOptimal) {
      result.status = ConvexStatus::kInfeasible;
      return result;
    }
    pool.push_back(s.x);
    mark(s.x);
  }
  for (int j = 0; j < n_lp; ++j) {
    if (var_covered[j]) continue;
    std::vector<double> obj(n_lp, 0.0);
    obj[j] = -1.0;
    LpSolution s = probe(std::move(obj));
    if (s.status != LpStatus::kOptimal || s.x[j] <= kForcedZero) {
      forced[j] = true;
      continue;
    }
    pool.push_back(s.x);
    mark(s.x);
  }
  for (int k = 0; k < n_ineq; ++k) {
    if (ineq_covered[k]) continue;
    std::vector<double> obj(n_lp, 0.0);
    for (const auto& [j, a] : base.inequalities[k].terms) obj[j] += a;
    LpSolution s = probe(std::move(obj));
    if (s.status != LpStatus::kOptimal ||
        base.inequalities[k].rhs - s.value <= kForcedZero) {
      tight[k] = true;
      continue;
    }
    pool.push_back(s.x);
    mark(s.x);
  }
  std::vector<double> center(n_lp, 0.0);
  for (const auto& xs : pool) {
    for (int j = 0; j < n_lp; ++j) center[j] += xs[j] / pool.size();
  }

  // --- Reduced program ---------------------------------------------------
  std::vector<int> rindex(n, -1);
  ReducedProgram red;
  std::vector<int> original;
  for (int v = 0; v < n; ++v) {
    const bool keep = is_free[v] || (lp_index[v] >= 0 && !forced[lp_index[v]]);
    if (!keep) continue;
    rindex[v] = red.n++;
    original.push_back(v);
    red.nonneg.push_back(!is_free[v]);
  }
  const auto remap = [&](const SparseRow& row) {
    SparseRow out{{}, row.rhs};
    for (const auto& [v, a] : row.terms) {
      if (rindex[v] >= 0) out.terms.emplace_back(rindex[v], a);
    }
    return out;
  };
  const auto remap_kl = [&](const KlTerm& term) {
    ReducedKl out;
    for (size_t g = 0; g < term.groups.size(); ++g) {
      std::vector<int> members;
      for (int v : term.groups[g]) {
        if (rindex[v] >= 0) members.push_back(rindex[v]);
      }
      if (members.empty()) continue;
      if (!(term.reference[g] > 0.0)) {
        throw std::logic_error("solve_convex: nonpositive KL reference");
      }
      out.groups.push_back(std::move(members));
      out.reference.push_back(term.reference[g]);
    }
    return out;
  };

  red.cost = VectorXd::Zero(red.n);
  for (int v = 0; v < n && v < static_cast<int>(program.cost.size()); ++v) {
    if (rindex[v] >= 0) red.cost[rindex[v]] = program.cost[v];
  }
  if (program.objective_kl) red.objective = remap_kl(*program.objective_kl);

  std::vector<SparseRow> eq_rows;
  for (const auto& row : program.equalities) eq_rows.push_back(remap(row));
  for (int k = 0; k < n_ineq; ++k) {
    SparseRow row = remap(program.inequalities[k]);
    if (tight[k]) {
      eq_rows.push_back(std::move(row));
    } else if (!row.terms.empty()) {
      red.inequalities.push_back(std::move(row));
    }
  }
  {
    MatrixXd a = MatrixXd::Zero(static_cast<int>(eq_rows.size()), red.n);
    VectorXd b(static_cast<int>(eq_rows.size()));
    for (size_t r = 0; r < eq_rows.size(); ++r) {
      for (const auto& [v, c] : eq_rows[r].terms) a(r, v) += c;
      b[r] = eq_rows[r].rhs;
    }
    if (a.rows() > 0 && red.n > 0) {
      Eigen::ColPivHouseholderQR<MatrixXd> qr(a.transpose());
      qr.setThreshold(1e-10);
      const int rank = static_cast<int>(qr.rank());
      red.a.resize(rank, red.n);
      red.b.resize(rank);
      for (int r = 0; r < rank; ++r) {
        const int row = qr.colsPermutation().indices()(r);
        red.a.row(r) = a.row(row);
        red.b[r] = b[row];
      }
    } else {
      red.a.resize(0, red.n);
      red.b.resize(0);
    }
    ComputeNullBasis(red);
  }
  for (const auto& c : program.kl_constraints) {
    ReducedKlConstraint rc;
    rc.kl = remap_kl(c.kl);
    for (const auto& [v, a] : c.linear) {
      if (rindex[v] >= 0) rc.linear.emplace_back(rindex[v], a);
    }
    rc.rhs = c.rhs;
    red.kl.push_back(std::move(rc));
  }

  VectorXd x = VectorXd::Zero(red.n);
  for (int r = 0; r < red.n; ++r) {
    const int v = original[r];
    if (lp_index[v] >= 0) x[r] = center[lp_index[v]];
  }

  // --- Phase I: strict feasibility of the entropy constraints ------------
  const auto max_violation = [&](const VectorXd& xs) {
    double worst = -kInf;
    for (const auto& c : red.kl) worst = std::max(worst, ConstraintValue(c, xs));
    return worst;
  };
  // An epigraph variable entering every entropy constraint with a negative
  // coefficient restores strict feasibility directly. Phase I would otherwise
  // see an unbounded flat direction along it.
  if (!red.kl.empty() && !(max_violation(x) < 0.0)) {
    for (int v = 0; v < red.n; ++v) {
      if (red.nonneg[v] || (red.a.rows() > 0 && red.a.col(v).any())) continue;
      double weakest = kInf;
      for (const auto& c : red.kl) {
        double coef = 0.0;
        for (const auto& [u, a] : c.linear) {
          if (u == v) coef += a;
        }
        weakest = std::min(weakest, -coef);
      }
      if (!(weakest > 0.0)) continue;
      const double worst = max_violation(x);
      if (!std::isfinite(worst)) break;
      x[v] += (worst + 1.0) / weakest;
      break;
    }
  }
  if (!red.kl.empty() && !(max_violation(x) < 0.0)) {
    ReducedProgram aux = red;
    aux.objective.reset();
    const int s = aux.n++;
    aux.nonneg.push_back(false);
    aux.cost = VectorXd::Zero(aux.n);
    aux.cost[s] = 1.0;
    aux.a.conservativeResize(aux.a.rows(), aux.n);
    if (aux.a.rows() > 0) aux.a.col(s).setZero();
    ComputeNullBasis(aux);
    for (auto& c : aux.kl) c.linear.emplace_back(s, -1.0);
    VectorXd xa(aux.n);
    xa.head(red.n) = x;
    xa[s] = max_violation(x) + 1.0;
    const auto feasible = [&](const VectorXd& xs) {
      return max_violation(xs.head(red.n)) < 0.0;
    };
    RunBarrier(aux, xa, options, &result.newton_steps, feasible);
    if (!feasible(xa)) {
      result.status = ConvexStatus::kInfeasible;
      return result;
    }
    x = xa.head(red.n);
  }

  // --- Phase II ----------------------------------------------------------
  const BarrierOutcome outcome =
      RunBarrier(red, x, options, &result.newton_steps, nullptr);
  result.gap = outcome.gap;
  result.status = result.newton_steps >= options.max_newton_total
                      ? ConvexStatus::kIterationCap
                      : ConvexStatus::kOptimal;
  result.x.assign(n, 0.0);
  for (int r = 0; r < red.n; ++r) result.x[original[r]] = x[r];
  result.objective = 0.0;
  for (int v = 0; v < n && v < static_cast<int>(program.cost.size()); ++v) {
    result.objective += program.cost[v] * result.x[v];
  }
  if (program.objective_kl) {
    result.objective += program.objective_kl->Evaluate(result.x);
  }
  return result;
}

}  // namespace advhyp::solvers
