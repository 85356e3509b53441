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

#include "advhyp/game.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <string>
#include <thread>

#include "advhyp/gendiv.h"
#include "advhyp/rng.h"

namespace advhyp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln P(X type = counts) for X i.i.d. p; -inf when impossible.
double log_type_probability(const std::vector<int>& counts, const Pmf& p) {
  int n = 0;
  double lp = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] == 0) continue;
    if (p[i] <= 0.0) return -kInf;
    lp += counts[i] * std::log(p[i]) - std::lgamma(counts[i] + 1.0);
    n += counts[i];
  }
  return lp + std::lgamma(n + 1.0);
}

DefenseEval threshold(double score, double a) {
  // U(0) = 1: ties go to H1.
  return DefenseEval{score - a >= 0.0 ? 1.0 : 0.0, score};
}

DefenseEval single_letter(const Composition& y, const GameSpec& spec,
                          const EmpiricalGenDiv& g0, const EmpiricalGenDiv& g1) {
  const double d0 = g0(y);
  const double d1 = g1(y);
  double score;
  if (std::isinf(d0) && std::isinf(d1)) {
    score = 0.0;
  } else {
    score = d0 - d1;
  }
  return threshold(score, spec.a.value_or(0.0));
}

double exact_score(const TypeLaw& q0, const TypeLaw& q1, const Composition& y) {
  const auto f0 = q0.find(y.counts());
  const auto f1 = q1.find(y.counts());
  const double m0 = f0 == q0.end() ? 0.0 : f0->second;
  const double m1 = f1 == q1.end() ? 0.0 : f1->second;
  if (m0 <= 0.0 && m1 <= 0.0) return 0.0;
  if (m0 <= 0.0) return kInf;
  if (m1 <= 0.0) return -kInf;
  return (std::log(m1) - std::log(m0)) / y.n();
}

int draw_symbol(const std::vector<double>& cdf, int last_positive, double u) {
  for (size_t i = 0; i < cdf.size(); ++i) {
    if (u < cdf[i]) return static_cast<int>(i);
  }
  return last_positive;
}

}  // namespace

DefenseEval np_defense_prob(const Composition& y_type, const Pmf& p0,
                            const DistortionMatrix& d, double delta0, double lambda) {
  if (!(lambda > 0.0)) throw ValidationError("np_defense_prob: lambda must be > 0");
  const double score = gen_divergence_empirical(y_type, p0, d, delta0);
  const double excess = std::max(0.0, lambda - score);
  return DefenseEval{std::exp(-y_type.n() * excess), score};
}

TypeLaw induced_type_law(const Pmf& p, const DistortionMatrix& d, double delta, int n) {
  const int k = p.alphabet_size();
  if (d.alphabet_size() != k) throw DimensionError("induced_type_law: K mismatch");
  if (n < 1) throw ValidationError("induced_type_law: n must be >= 1");
  const DistortionBudget budget(d, delta);
  TypeLaw law;
  std::int64_t remaining = kJointCompositionBudget;
  std::vector<int> y(k);
  std::vector<std::vector<int>> targets;
  for (const Composition& x : all_compositions(n, k)) {
    const double lp = log_type_probability(x.counts(), p);
    if (!std::isfinite(lp)) continue;
    targets.clear();
    std::int64_t count = 0;
    visit_joint_compositions(
        x, budget,
        [&](std::span<const int> c) {
          std::fill(y.begin(), y.end(), 0);
          for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) y[j] += c[i * k + j];
          targets.push_back(y);
          ++count;
        },
        remaining);
    remaining -= count;
    // The attacker picks one of the `count` admissible classes uniformly.
    const double share = std::exp(lp) / static_cast<double>(count);
    for (const auto& t : targets) law[t] += share;
  }
  return law;
}

TypeLaw induced_output_pmf(const Pmf& p, const DistortionMatrix& d, double delta,
                           int n) {
  TypeLaw law = induced_type_law(p, d, delta, n);
  for (auto& [counts, mass] : law) mass /= to_double(multinomial(counts));
  return law;
}

DefenseEval bayes_defense(const Composition& y_type, const GameSpec& spec,
                          BayesMode mode) {
  spec.Validate();
  const double a = spec.a.value_or(0.0);
  if (mode == BayesMode::kSingleLetter) {
    const EmpiricalGenDiv g0(spec.p0, spec.d, spec.delta0);
    const EmpiricalGenDiv g1(spec.p1, spec.d, spec.delta1);
    return single_letter(y_type, spec, g0, g1);
  }
  const TypeLaw q0 = induced_type_law(spec.p0, spec.d, spec.delta0, y_type.n());
  const TypeLaw q1 = induced_type_law(spec.p1, spec.d, spec.delta1, y_type.n());
  return threshold(exact_score(q0, q1, y_type), a);
}

DefenseEval bayes_defense(std::span<const int> y, const GameSpec& spec,
                          BayesMode mode) {
  return bayes_defense(Composition::Of(y, spec.p0.alphabet_size()), spec, mode);
}

Defense accept_h0_defense() {
  return [](const Composition&) { return DefenseEval{0.0, 0.0}; };
}

Defense accept_h1_defense() {
  return [](const Composition&) { return DefenseEval{1.0, 0.0}; };
}

Defense make_np_defense(const GameSpec& spec) {
  spec.Validate();
  if (!spec.lambda || !(*spec.lambda > 0.0)) {
    throw ValidationError("NP defense needs lambda > 0");
  }
  auto g0 = std::make_shared<EmpiricalGenDiv>(spec.p0, spec.d, spec.delta0);
  const double lambda = *spec.lambda;
  return [g0, lambda](const Composition& y) {
    const double score = (*g0)(y);
    const double excess = std::max(0.0, lambda - score);
    return DefenseEval{std::exp(-y.n() * excess), score};
  };
}

Defense make_bayes_defense(const GameSpec& spec, int n, BayesMode mode) {
  spec.Validate();
  const double a = spec.a.value_or(0.0);
  if (mode == BayesMode::kSingleLetter) {
    auto g0 = std::make_shared<EmpiricalGenDiv>(spec.p0, spec.d, spec.delta0);
    auto g1 = std::make_shared<EmpiricalGenDiv>(spec.p1, spec.d, spec.delta1);
    return [spec, g0, g1](const Composition& y) {
      return single_letter(y, spec, *g0, *g1);
    };
  }
  auto q0 = std::make_shared<TypeLaw>(induced_type_law(spec.p0, spec.d, spec.delta0, n));
  auto q1 = std::make_shared<TypeLaw>(induced_type_law(spec.p1, spec.d, spec.delta1, n));
  return [q0, q1, a, n](const Composition& y) {
    if (y.n() != n) throw ValidationError("exact Bayes defense built for another n");
    return threshold(exact_score(*q0, *q1, y), a);
  };
}

ErrorProbs exact_error_probs(const Defense& defense, const GameSpec& spec, int n) {
  spec.Validate();
  const TypeLaw q0 = induced_type_law(spec.p0, spec.d, spec.delta0, n);
  const TypeLaw q1 = induced_type_law(spec.p1, spec.d, spec.delta1, n);
  ErrorProbs out;
  for (const auto& [counts, mass] : q0) {
    out.fp += mass * defense(Composition(counts)).accept_h1_prob;
  }
  for (const auto& [counts, mass] : q1) {
    out.fn += mass * (1.0 - defense(Composition(counts)).accept_h1_prob);
  }
  return out;
}

std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials,
                                          double z) {
  if (trials <= 0) return {0.0, 1.0};
  const double nt = static_cast<double>(trials);
  const double p = successes / nt;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nt;
  const double center = (p + z2 / (2 * nt)) / denom;
  const double half = z / denom * std::sqrt(p * (1 - p) / nt + z2 / (4 * nt * nt));
  return {std::max(0.0, std::min(p, center - half)),
          std::min(1.0, std::max(p, center + half))};
}

SlopeFit fit_slope(const std::vector<int>& n, const std::vector<std::int64_t>& errors,
                   const std::vector<std::int64_t>& trials) {
  // Delta method: var(-ln p_hat) ~= (1 - p) / (trials p).
  double sw = 0, swx = 0, swy = 0, swxx = 0, swxy = 0;
  SlopeFit fit;
  for (size_t i = 0; i < n.size(); ++i) {
    if (errors[i] < kMinErrorEvents) continue;
    const double p = static_cast<double>(errors[i]) / trials[i];
    const double var = (1.0 - p) / (trials[i] * p);
    const double w = var > 0.0 ? 1.0 / var : 1e300;
    const double x = n[i];
    const double y = -std::log(p);
    sw += w;
    swx += w * x;
    swy += w * y;
    swxx += w * x * x;
    swxy += w * x * y;
    ++fit.points_used;
  }
  if (fit.points_used < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    fit.standard_error = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  const double det = sw * swxx - swx * swx;
  fit.slope = (sw * swxy - swx * swy) / det;
  fit.standard_error = std::sqrt(sw / det);
  return fit;
}

SimulationReport monte_carlo_simulate(const GameSpec& spec, DefenseMode mode,
                                      const std::vector<int>& n_grid,
                                      std::int64_t trials, std::uint64_t seed,
                                      int threads) {
  spec.Validate();
  if (trials < 1000) throw ValidationError("monte_carlo_simulate: trials must be >= 1000");
  if (n_grid.empty()) throw ValidationError("monte_carlo_simulate: empty n grid");
  for (int n : n_grid) {
    if (n < 1) throw ValidationError("monte_carlo_simulate: n must be >= 1");
  }
  const int k = spec.p0.alphabet_size();
  Defense defense;
  if (mode == DefenseMode::kNp) {
    defense = make_np_defense(spec);
  } else {
    if (!spec.a) throw ValidationError("Bayesian defense needs a");
    defense = make_bayes_defense(spec, n_grid.front(), BayesMode::kSingleLetter);
  }
  const AttackSampler sampler0(spec.d, spec.delta0);
  const AttackSampler sampler1(spec.d, spec.delta1);
  std::vector<double> cdf[2];
  int last_positive[2] = {0, 0};
  for (int h = 0; h < 2; ++h) {
    const Pmf& p = h == 0 ? spec.p0 : spec.p1;
    double c = 0.0;
    for (int i = 0; i < k; ++i) {
      c += p[i];
      cdf[h].push_back(c);
      if (p[i] > 0.0) last_positive[h] = i;
    }
  }

  const std::int64_t blocks = (trials + kTrialsPerBlock - 1) / kTrialsPerBlock;
  struct Task {
    int grid_index;
    int hypothesis;
    std::int64_t block;
  };
  std::vector<Task> tasks;
  for (int i = 0; i < static_cast<int>(n_grid.size()); ++i)
    for (int h = 0; h < 2; ++h)
      for (std::int64_t b = 0; b < blocks; ++b) tasks.push_back({i, h, b});
  std::vector<std::int64_t> errors(tasks.size(), 0);

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    try {
      std::vector<int> x;
      for (size_t t = next++; t < tasks.size(); t = next++) {
        const Task& task = tasks[t];
        const int n = n_grid[task.grid_index];
        const int h = task.hypothesis;
        const AttackSampler& sampler = h == 0 ? sampler0 : sampler1;
        Rng rng = Rng::Stream(seed, {static_cast<std::uint64_t>(task.grid_index),
                                     static_cast<std::uint64_t>(h),
                                     static_cast<std::uint64_t>(task.block)});
        const std::int64_t begin = task.block * kTrialsPerBlock;
        const std::int64_t end = std::min(trials, begin + kTrialsPerBlock);
        x.resize(n);
        std::int64_t count = 0;
        for (std::int64_t r = begin; r < end; ++r) {
          for (int& s : x) s = draw_symbol(cdf[h], last_positive[h], rng.uniform01());
          const std::vector<int> y = sampler.Sample(x, rng);
          const DefenseEval e = defense(Composition::Of(y, k));
          bool decide_h1;
          if (mode == DefenseMode::kNp) {
            decide_h1 = rng.uniform01() < e.accept_h1_prob;
          } else {
            decide_h1 = e.accept_h1_prob >= 0.5;
          }
          if (h == 0 ? decide_h1 : !decide_h1) ++count;
        }
        errors[t] = count;
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = tasks.size();
    }
  };
  int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::clamp<int>(n_threads, 1, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);

  SimulationReport report;
  report.seed = seed;
  std::vector<std::int64_t> fp_err(n_grid.size(), 0), fn_err(n_grid.size(), 0);
  for (size_t t = 0; t < tasks.size(); ++t) {
    auto& target = tasks[t].hypothesis == 0 ? fp_err : fn_err;
    target[tasks[t].grid_index] += errors[t];
  }
  std::vector<std::int64_t> tr(n_grid.size(), trials);
  for (size_t i = 0; i < n_grid.size(); ++i) {
    SimulationPoint pt;
    pt.n = n_grid[i];
    pt.trials = trials;
    pt.fp_errors = fp_err[i];
    pt.fn_errors = fn_err[i];
    pt.fp_hat = static_cast<double>(fp_err[i]) / trials;
    pt.fn_hat = static_cast<double>(fn_err[i]) / trials;
    pt.fp_ci95 = wilson_interval(fp_err[i], trials);
    pt.fn_ci95 = wilson_interval(fn_err[i], trials);
    report.per_n.push_back(pt);
  }
  report.fn_fit = fit_slope(n_grid, fn_err, tr);
  report.fp_fit = fit_slope(n_grid, fp_err, tr);
  return report;
}

}  // namespace advhyp
