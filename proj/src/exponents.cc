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

#include "advhyp/exponents.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "advhyp/gendiv.h"
#include "advhyp/rng.h"
#include "advhyp/solvers/lp.h"
#include "advhyp/transport.h"
#include "coupling_program.h"

namespace advhyp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kBoundaryTolerance = 1e-6;

using internal::Block;
using internal::ProgramBuilder;

void require_lambda(const GameSpec& spec) {
  if (!spec.lambda) throw ValidationError("Neyman-Pearson game needs lambda");
  if (!(*spec.lambda > 0.0) || !std::isfinite(*spec.lambda)) {
    throw ValidationError("lambda must be finite and > 0");
  }
}

double require_a(const GameSpec& spec) {
  if (!spec.a) throw ValidationError("Bayesian game needs a");
  if (!(*spec.a >= 0.0) || !std::isfinite(*spec.a)) {
    throw ValidationError("a must be finite and >= 0");
  }
  return *spec.a;
}

void fill_solver_diagnostics(const solvers::ConvexSolution& sol,
                             ExponentDiagnostics& diag) {
  diag.newton_steps = sol.newton_steps;
  diag.lp_solves = sol.lp_solves;
  diag.gap = sol.gap;
  diag.converged = sol.status == solvers::ConvexStatus::kOptimal;
}

// Recomputes both generalized divergences at py and stores the witnesses.
ExponentResult finish(const GameSpec& spec, double value, const Pmf& py,
                      const ExponentDiagnostics& diag) {
  GenDivResult g0 = gen_divergence(py, spec.p0, spec.d, spec.delta0);
  GenDivResult g1 = gen_divergence(py, spec.p1, spec.d, spec.delta1);
  ExponentResult r{value, py, {g0.coupling, g1.coupling}, diag};
  r.diagnostics.d0_at_argmin = g0.value;
  r.diagnostics.d1_at_argmin = g1.value;
  return r;
}

ExponentResult infeasible_result(const GameSpec& spec,
                                 const solvers::ConvexSolution& sol) {
  ExponentDiagnostics diag;
  fill_solver_diagnostics(sol, diag);
  diag.converged = true;
  return finish(spec, kInf, spec.p0, diag);
}

// min max{D~1(P_Y), D~0(P_Y) - a} in epigraph form.
ExponentResult payoff_program(const GameSpec& spec, double a) {
  const int k = spec.p0.alphabet_size();
  ProgramBuilder b(k);
  const Block q0 = b.AddBlock();
  const Block q1 = b.AddBlock();
  const int t = b.AddFreeVar();
  b.TotalMass(q0, 1.0);
  b.SharedColumns(q0, q1);
  b.DistortionAtMost(q0, spec.d, spec.delta0);
  b.DistortionAtMost(q1, spec.d, spec.delta1);
  solvers::KlConstraint c1{b.RowKl(q1, spec.p1), {{t, -1.0}}, 0.0};
  solvers::KlConstraint c0{b.RowKl(q0, spec.p0), {{t, -1.0}}, a};
  b.program().kl_constraints = {std::move(c1), std::move(c0)};
  b.program().cost.assign(b.program().num_vars, 0.0);
  b.program().cost[t] = 1.0;
  const solvers::ConvexSolution sol = solvers::solve_convex(b.Finish());
  if (sol.status == solvers::ConvexStatus::kInfeasible) {
    return infeasible_result(spec, sol);
  }
  const Coupling c0x = internal::extract_coupling(sol.x, q0);
  const Coupling c1x = internal::extract_coupling(sol.x, q1);
  const double value = std::max(kl_divergence(c1x.x_marginal(), spec.p1),
                                kl_divergence(c0x.x_marginal(), spec.p0) - a);
  ExponentDiagnostics diag;
  fill_solver_diagnostics(sol, diag);
  return finish(spec, std::max(0.0, value), c1x.y_marginal(), diag);
}

// Points on the ray P0 + s u, s in [0, s_max], with s_max the simplex exit.
struct Ray {
  std::vector<double> u;
  double s_max = 0.0;
};

std::optional<Ray> make_ray(const Pmf& origin, std::vector<double> u) {
  double norm = 0.0;
  for (double v : u) norm += v * v;
  norm = std::sqrt(norm);
  if (norm < 1e-14) return std::nullopt;
  double s_max = kInf;
  for (size_t i = 0; i < u.size(); ++i) {
    u[i] /= norm;
    if (u[i] < -1e-15) s_max = std::min(s_max, origin[i] / -u[i]);
  }
  if (!(s_max > 1e-14) || !std::isfinite(s_max)) return std::nullopt;
  return Ray{std::move(u), s_max};
}

Pmf ray_point(const Pmf& origin, const Ray& ray, double s) {
  const int k = origin.alphabet_size();
  std::vector<double> p(k);
  double total = 0.0;
  for (int i = 0; i < k; ++i) {
    p[i] = std::max(0.0, origin[i] + s * ray.u[i]);
    total += p[i];
  }
  for (double& v : p) v /= total;
  return Pmf(std::move(p));
}

// Minimizes D~0 over {D~0 - D~1 >= a}. D~0 is convex with minimum 0 at P0,
// hence nondecreasing along every ray leaving P0, so on each ray the optimum
// is the first point that enters the set.
class FpSearch {
 public:
  FpSearch(const GameSpec& spec, double a) : spec_(spec), a_(a) {}

  double best() const { return best_; }
  const std::optional<Pmf>& argmin() const { return argmin_; }
  int rays() const { return rays_; }

  bool CheckOrigin() {
    const double d1 = gen_divergence(spec_.p0, spec_.p1, spec_.d, spec_.delta1).value;
    if (0.0 - d1 >= a_) {
      best_ = 0.0;
      argmin_ = spec_.p0;
      return true;
    }
    return false;
  }

  // Value of the first entry along the ray (or +inf); updates the incumbent.
  double Scan(const Ray& ray, int grid) {
    ++rays_;
    double prev = 0.0;
    for (int g = 1; g <= grid; ++g) {
      const double s = ray.s_max * g / grid;
      const Pmf p = ray_point(spec_.p0, ray, s);
      const double d0 = D0(p);
      // Later points on this ray cannot beat the incumbent.
      if (!(d0 < best_)) return kInf;
      if (InRegion(p, d0)) return Refine(ray, prev, s);
      prev = s;
    }
    return kInf;
  }

 private:
  double D0(const Pmf& p) const {
    return gen_divergence(p, spec_.p0, spec_.d, spec_.delta0).value;
  }
  bool InRegion(const Pmf& p, double d0) const {
    const double d1 = gen_divergence(p, spec_.p1, spec_.d, spec_.delta1).value;
    return d0 - d1 >= a_;
  }

  double Refine(const Ray& ray, double lo, double hi) {
    for (int it = 0; it < 44 && hi - lo > 1e-13 * ray.s_max; ++it) {
      const double mid = 0.5 * (lo + hi);
      const Pmf p = ray_point(spec_.p0, ray, mid);
      if (InRegion(p, D0(p))) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    Pmf p = ray_point(spec_.p0, ray, hi);
    const double v = D0(p);
    if (v < best_) {
      best_ = v;
      argmin_ = std::move(p);
    }
    return v;
  }

  const GameSpec& spec_;
  double a_;
  double best_ = kInf;
  std::optional<Pmf> argmin_;
  int rays_ = 0;
};

void search_fp(const GameSpec& spec, double a, BayesExponents& out) {
  FpSearch search(spec, a);
  const int k = spec.p0.alphabet_size();
  if (!search.CheckOrigin()) {
    if (k == 2) {
      for (double sign : {1.0, -1.0}) {
        if (auto ray = make_ray(spec.p0, {sign, -sign})) search.Scan(*ray, 128);
      }
    } else if (k == 3) {
      // Orthonormal basis of the plane sum(u) = 0.
      const double e1[3] = {1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0.0};
      const double e2[3] = {1 / std::sqrt(6.0), 1 / std::sqrt(6.0), -2 / std::sqrt(6.0)};
      auto dir = [&](double th) {
        return std::vector<double>{std::cos(th) * e1[0] + std::sin(th) * e2[0],
                                   std::cos(th) * e1[1] + std::sin(th) * e2[1],
                                   std::cos(th) * e1[2] + std::sin(th) * e2[2]};
      };
      auto value_at = [&](double th) {
        auto ray = make_ray(spec.p0, dir(th));
        return ray ? search.Scan(*ray, 32) : kInf;
      };
      constexpr int kAngles = 96;
      const double step = 2 * std::numbers::pi / kAngles;
      std::vector<double> coarse(kAngles);
      for (int i = 0; i < kAngles; ++i) coarse[i] = value_at(i * step);
      // Golden-section refinement around the best few coarse angles.
      std::vector<int> order(kAngles);
      for (int i = 0; i < kAngles; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](int x, int y) { return coarse[x] < coarse[y]; });
      const double phi = (std::sqrt(5.0) - 1) / 2;
      for (int r = 0; r < 3 && std::isfinite(coarse[order[r]]); ++r) {
        double lo = (order[r] - 1) * step;
        double hi = (order[r] + 1) * step;
        double x1 = hi - phi * (hi - lo);
        double x2 = lo + phi * (hi - lo);
        double f1 = value_at(x1);
        double f2 = value_at(x2);
        for (int it = 0; it < 24; ++it) {
          if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = value_at(x1);
          } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = value_at(x2);
          }
        }
      }
    } else {
      out.fp_heuristic = true;
      Rng rng = Rng::Stream(0x5eed, {static_cast<std::uint64_t>(k)});
      for (int r = 0; r < 400; ++r) {
        std::vector<double> u(k);
        double mean = 0.0;
        for (double& v : u) {
          // Box-Muller keeps the draws toolchain independent.
          const double u1 = 1.0 - rng.uniform01();
          const double u2 = rng.uniform01();
          v = std::sqrt(-2 * std::log(u1)) * std::cos(2 * std::numbers::pi * u2);
          mean += v / k;
        }
        for (double& v : u) v -= mean;
        // Also aim at every vertex, where the region is often largest.
        if (r < k) {
          for (int i = 0; i < k; ++i) u[i] = (i == r ? 1.0 : 0.0) - spec.p0[i];
        }
        if (auto ray = make_ray(spec.p0, u)) search.Scan(*ray, 32);
      }
    }
  }
  out.fp_exponent = search.best();
  out.fp_argmin = search.argmin();
  out.fp_rays = search.rays();
}

solvers::LinearProgram to_lp(const solvers::ConvexProgram& p,
                             std::vector<double> objective) {
  solvers::LinearProgram lp;
  lp.num_vars = p.num_vars;
  lp.objective = std::move(objective);
  lp.equalities = p.equalities;
  lp.inequalities = p.inequalities;
  return lp;
}

}  // namespace

void GameSpec::Validate() const {
  const int k = p0.alphabet_size();
  if (p1.alphabet_size() != k || d.alphabet_size() != k) {
    throw DimensionError("GameSpec: alphabet sizes differ");
  }
  for (double v : {delta0, delta1}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("GameSpec: distortion budgets must be finite and >= 0");
    }
  }
}

ExponentResult np_fn_exponent(const GameSpec& spec) {
  spec.Validate();
  require_lambda(spec);
  const int k = spec.p0.alphabet_size();
  ProgramBuilder b(k);
  const Block q0 = b.AddBlock();
  const Block q1 = b.AddBlock();
  b.TotalMass(q0, 1.0);
  b.SharedColumns(q0, q1);
  b.DistortionAtMost(q0, spec.d, spec.delta0);
  b.DistortionAtMost(q1, spec.d, spec.delta1);
  solvers::KlConstraint fp{b.RowKl(q0, spec.p0), {}, *spec.lambda};
  b.program().kl_constraints.push_back(std::move(fp));
  b.program().objective_kl = b.RowKl(q1, spec.p1);
  const solvers::ConvexSolution sol = solvers::solve_convex(b.Finish());
  if (sol.status == solvers::ConvexStatus::kInfeasible) {
    return infeasible_result(spec, sol);
  }
  const Coupling c1 = internal::extract_coupling(sol.x, q1);
  ExponentDiagnostics diag;
  fill_solver_diagnostics(sol, diag);
  ExponentResult r =
      finish(spec, kl_divergence(c1.x_marginal(), spec.p1), c1.y_marginal(), diag);
  r.diagnostics.boundary_active =
      std::abs(r.diagnostics.d0_at_argmin - *spec.lambda) <= kBoundaryTolerance;
  return r;
}

ExponentResult np_fn_exponent_metric_form(const GameSpec& spec) {
  spec.Validate();
  require_lambda(spec);
  const int k = spec.p0.alphabet_size();
  ProgramBuilder b(k);
  const Block q = b.AddBlock();
  b.TotalMass(q, 1.0);
  b.DistortionAtMost(q, spec.d, spec.delta0 + spec.delta1);
  solvers::KlConstraint fp{b.ColumnKl(q, spec.p0), {}, *spec.lambda};
  b.program().kl_constraints.push_back(std::move(fp));
  b.program().objective_kl = b.RowKl(q, spec.p1);
  const solvers::ConvexSolution sol = solvers::solve_convex(b.Finish());
  if (sol.status == solvers::ConvexStatus::kInfeasible) {
    return infeasible_result(spec, sol);
  }
  const Coupling c = internal::extract_coupling(sol.x, q);
  ExponentDiagnostics diag;
  fill_solver_diagnostics(sol, diag);
  const Pmf py = c.y_marginal();
  ExponentResult r = finish(spec, kl_divergence(c.x_marginal(), spec.p1), py, diag);
  r.diagnostics.boundary_active =
      std::abs(kl_divergence(py, spec.p0) - *spec.lambda) <= kBoundaryTolerance;
  return r;
}

BayesExponents bayes_exponent(const GameSpec& spec) {
  spec.Validate();
  const double a = require_a(spec);
  BayesExponents out{payoff_program(spec, a), 0.0, 0.0, std::nullopt, 0, false};
  // For a >= 0 a payoff minimizer can always be moved onto the FN set
  // {D~0 - D~1 <= a} without increasing the max, so the two minima agree.
  out.fn_exponent = out.payoff_exponent.value;
  search_fp(spec, a, out);
  if (out.fp_exponent < a - 1e-8) {
    throw std::logic_error("bayes_exponent: fp exponent below a");
  }
  return out;
}

LimitExponents limit_exponents(const GameSpec& spec) {
  spec.Validate();
  const int k = spec.p0.alphabet_size();
  ProgramBuilder b(k);
  const Block q = b.AddBlock();
  const Block q1 = b.AddBlock();
  b.RowMarginal(q, spec.p0);
  b.SharedColumns(q, q1);
  b.DistortionAtMost(q, spec.d, spec.delta0);
  b.DistortionAtMost(q1, spec.d, spec.delta1);
  b.program().objective_kl = b.RowKl(q1, spec.p1);
  const solvers::ConvexSolution sol = solvers::solve_convex(b.Finish());
  LimitExponents out;
  if (sol.status == solvers::ConvexStatus::kInfeasible) {
    out.np_limit = kInf;
  } else {
    out.np_limit =
        kl_divergence(internal::extract_coupling(sol.x, q1).x_marginal(), spec.p1);
  }
  out.bayes_limit = payoff_program(spec, 0.0).value;
  return out;
}

Indistinguishability indistinguishability(const Pmf& p0, const Pmf& p,
                                          const DistortionMatrix& d, double delta0,
                                          double delta1) {
  const int k = p0.alphabet_size();
  if (p.alphabet_size() != k || d.alphabet_size() != k) {
    throw DimensionError("indistinguishability: alphabet sizes differ");
  }
  for (double v : {delta0, delta1}) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("indistinguishability: budgets must be finite and >= 0");
    }
  }
  Indistinguishability out;
  out.emd_p0_p = emd(p0, p, d).cost;

  // Q0 moves P0 onto P_Y within delta0; Q moves P onto the same P_Y.
  ProgramBuilder b(k);
  const Block q0 = b.AddBlock();
  const Block q = b.AddBlock();
  b.RowMarginal(q0, p0);
  b.RowMarginal(q, p);
  b.SharedColumns(q0, q);
  b.DistortionAtMost(q0, d, delta0);
  std::vector<double> objective(b.program().num_vars, 0.0);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) objective[q.var(i, j)] = d(i, j);
  const solvers::LpSolution sol = solvers::solve_lp(to_lp(b.program(), objective));
  if (sol.status != solvers::LpStatus::kOptimal) {
    throw std::logic_error("indistinguishability: transport LP did not solve");
  }
  out.inner_value = std::max(0.0, sol.value);
  out.member = out.inner_value <= delta1 + 1e-9;
  if (d.is_metric()) {
    out.closed_form_error =
        std::abs(out.inner_value - std::max(0.0, out.emd_p0_p - delta0));
    if (out.emd_p0_p > delta0) out.alpha = 1.0 - delta0 / out.emd_p0_p;
  }
  return out;
}

std::vector<Pmf> sweep_lattice(int alphabet_size, double grid_step) {
  if (alphabet_size != 2 && alphabet_size != 3) {
    throw ValidationError("region_sweep: only K = 2 or K = 3 is supported");
  }
  if (!(grid_step > 0.0) || grid_step > 0.5) {
    throw ValidationError("region_sweep: grid_step must lie in (0, 0.5]");
  }
  const double inv = 1.0 / grid_step;
  const long m = std::lround(inv);
  if (std::abs(inv - m) > 1e-9 * inv) {
    throw ValidationError("region_sweep: 1 / grid_step must be an integer");
  }
  std::vector<Pmf> out;
  if (alphabet_size == 2) {
    for (long i = 0; i <= m; ++i) {
      const double x = static_cast<double>(i) / m;
      out.emplace_back(std::vector<double>{x, 1.0 - x});
    }
  } else {
    for (long i = 0; i <= m; ++i) {
      for (long j = 0; i + j <= m; ++j) {
        const double x = static_cast<double>(i) / m;
        const double y = static_cast<double>(j) / m;
        out.emplace_back(std::vector<double>{x, y, static_cast<double>(m - i - j) / m});
      }
    }
  }
  return out;
}

std::vector<SweepRow> region_sweep(const Pmf& p0, const DistortionMatrix& d,
                                   double delta0, double delta1, double grid_step,
                                   int threads) {
  if (d.alphabet_size() != p0.alphabet_size()) {
    throw DimensionError("region_sweep: alphabet sizes differ");
  }
  const std::vector<Pmf> lattice = sweep_lattice(p0.alphabet_size(), grid_step);
  std::vector<std::optional<SweepRow>> rows(lattice.size());
  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      for (size_t i = next++; i < lattice.size(); i = next++) {
        const Pmf& p = lattice[i];
        const Indistinguishability ind = indistinguishability(p0, p, d, delta0, delta1);
        GameSpec spec{p0, p, d, delta0, delta1, std::nullopt, std::nullopt};
        const LimitExponents lim = limit_exponents(spec);
        rows[i] = SweepRow{p, ind.member, ind.inner_value, lim.np_limit, lim.bayes_limit};
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = lattice.size();
    }
  };
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp<int>(n_threads, 1, static_cast<int>(lattice.size()));
  std::vector<std::thread> pool;
  for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<SweepRow> out;
  out.reserve(rows.size());
  for (auto& r : rows) out.push_back(std::move(*r));
  return out;
}

}  // namespace advhyp
