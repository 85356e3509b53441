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

// Finite-n detection games: defenses, the law of the attacked output, exact
// error probabilities by type aggregation, and Monte Carlo estimates.

#ifndef ADVHYP_GAME_H_
#define ADVHYP_GAME_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "advhyp/exponents.h"
#include "advhyp/types.h"

namespace advhyp {

struct DefenseEval {
  double accept_h1_prob = 0.0;
  double score = 0.0;  // decision statistic, nats
};

// Neyman-Pearson defense: score = D~^n_{delta0}(y type, P0),
// accept H1 with probability exp(-n [lambda - score]_+).
DefenseEval np_defense_prob(const Composition& y_type, const Pmf& p0,
                            const DistortionMatrix& d, double delta0, double lambda);

// y counts -> probability of the whole type class under the attacked source.
using TypeLaw = std::map<std::vector<int>, double>;

// Probability that an attacked length-n source sequence lands in each y type.
// Throws ResourceError past kJointCompositionBudget joint compositions.
TypeLaw induced_type_law(const Pmf& p, const DistortionMatrix& d, double delta, int n);

// Q*(y) for any single y in each type class (type law / class size).
TypeLaw induced_output_pmf(const Pmf& p, const DistortionMatrix& d, double delta, int n);

enum class BayesMode { kExact, kSingleLetter };

// Deterministic Bayesian defense, deciding H1 when score - a >= 0.
// kExact: score = (1/n) ln(Q*_1(y) / Q*_0(y)).
// kSingleLetter: score = D~^n_{delta0}(y, P0) - D~^n_{delta1}(y, P1).
DefenseEval bayes_defense(const Composition& y_type, const GameSpec& spec,
                          BayesMode mode);
DefenseEval bayes_defense(std::span<const int> y, const GameSpec& spec,
                          BayesMode mode);

// A defense strategy: maps the observed type to Phi(H1 | y). All defenses in
// this library depend on y only through its type.
using Defense = std::function<DefenseEval(const Composition&)>;

Defense accept_h0_defense();
Defense accept_h1_defense();
// Memoized per type; thread-safe.
Defense make_np_defense(const GameSpec& spec);
// Exact mode precomputes both output laws for length n.
Defense make_bayes_defense(const GameSpec& spec, int n, BayesMode mode);

struct ErrorProbs {
  double fp = 0.0;
  double fn = 0.0;
};

// Error probabilities of `defense` when both hypotheses face the dominant
// attack (A*_{delta0} under H0, A*_{delta1} under H1).
ErrorProbs exact_error_probs(const Defense& defense, const GameSpec& spec, int n);

enum class DefenseMode { kNp, kBayesSingleLetter };

struct SimulationPoint {
  int n = 0;
  std::int64_t trials = 0;
  std::int64_t fp_errors = 0;
  std::int64_t fn_errors = 0;
  double fp_hat = 0.0;
  double fn_hat = 0.0;
  std::pair<double, double> fp_ci95;
  std::pair<double, double> fn_ci95;
};

struct SlopeFit {
  // Weighted least squares of -ln(estimate) on n; NaN with fewer than two
  // grid points carrying at least kMinErrorEvents errors.
  double slope = 0.0;
  double standard_error = 0.0;
  int points_used = 0;
};

struct SimulationReport {
  std::vector<SimulationPoint> per_n;
  SlopeFit fn_fit;
  SlopeFit fp_fit;
  std::uint64_t seed = 0;
};

inline constexpr std::int64_t kMinErrorEvents = 50;
inline constexpr std::int64_t kTrialsPerBlock = 4096;

// Wilson score interval.
std::pair<double, double> wilson_interval(std::int64_t successes, std::int64_t trials,
                                          double z = 1.959963984540054);

SlopeFit fit_slope(const std::vector<int>& n, const std::vector<std::int64_t>& errors,
                   const std::vector<std::int64_t>& trials);

// Trials are split into blocks of kTrialsPerBlock. Block b of hypothesis h at
// grid index i draws from Rng::Stream(seed, {i, h, b}): the n source letters
// (inverse CDF on uniform01), then the attack sample, then for the NP defense
// one uniform01 compared against accept_h1_prob. Counts are integers summed
// over blocks, so the report does not depend on `threads`.
SimulationReport monte_carlo_simulate(const GameSpec& spec, DefenseMode mode,
                                      const std::vector<int>& n_grid,
                                      std::int64_t trials, std::uint64_t seed,
                                      int threads = 0);

}  // namespace advhyp

#endif  // ADVHYP_GAME_H_
