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

// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance [--criterion N]... [--threads T]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "advhyp/exponents.h"
#include "advhyp/game.h"
#include "advhyp/gendiv.h"
#include "advhyp/transport.h"
#include "advhyp/types.h"
#include "support/oracles.h"

using namespace advhyp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char* name;
  double time_limit_s;  // <= 0: none
  std::function<Outcome(int threads)> run;
};

std::vector<double> vec(const Pmf& p) { return {p.probs().begin(), p.probs().end()}; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const DistortionMatrix& hamming(int k) {
  static const DistortionMatrix h2 = make_distortion(HammingDistortion{}, 2);
  static const DistortionMatrix h3 = make_distortion(HammingDistortion{}, 3);
  return k == 2 ? h2 : h3;
}

// Tracks the worst deviation and the number of violated instances.
struct Tally {
  int checked = 0;
  int failed = 0;
  double worst = 0.0;
  void add(bool ok, double deviation = 0.0) {
    ++checked;
    if (!ok) ++failed;
    if (std::isfinite(deviation)) worst = std::max(worst, deviation);
  }
  Outcome outcome(const std::string& what) const {
    std::ostringstream s;
    s << checked << " " << what << ", " << failed << " violations, worst " << worst;
    return {failed == 0 && checked > 0, s.str()};
  }
};

Outcome stein(int) {
  std::mt19937_64 gen(1001);
  Tally t;
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + i % 2;
    const Pmf p0(oracle::random_pmf(gen, k)), p1(oracle::random_pmf(gen, k));
    const double lim = limit_exponents(GameSpec{p0, p1, hamming(k), 0, 0, {}, {}}).np_limit;
    const double dev = std::abs(lim - oracle::kl(vec(p0), vec(p1)));
    t.add(dev <= 1e-6, dev);
  }
  return t.outcome("pairs");
}

Outcome chernoff(int) {
  std::mt19937_64 gen(1002);
  Tally t;
  for (int i = 0; i < 20; ++i) {
    const Pmf p0(oracle::random_pmf(gen, 2)), p1(oracle::random_pmf(gen, 2));
    const double v =
        bayes_exponent(GameSpec{p0, p1, hamming(2), 0, 0, std::nullopt, 0.0}).payoff_exponent.value;
    const double dev = std::abs(v - oracle::chernoff(vec(p0), vec(p1)));
    t.add(dev <= 1e-6, dev);
  }
  return t.outcome("pairs");
}

Outcome convexity(int) {
  std::mt19937_64 gen(1003);
  Tally t;
  for (int i = 0; i < 500; ++i) {
    const int k = 2 + i % 2;
    const Pmf a(oracle::random_pmf(gen, k, 0.0)), b(oracle::random_pmf(gen, k, 0.0));
    const Pmf p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = i % 3 == 0   ? make_distortion(HammingDistortion{}, k)
                               : i % 3 == 1 ? make_distortion(LpPowerDistortion{1}, k)
                                            : make_distortion(LpPowerDistortion{2}, k);
    const double delta = oracle::uniform(gen, 0.0, 0.4);
    const double w = oracle::uniform(gen, 0.0, 1.0);
    const double lhs = gen_divergence(Pmf::Mix(w, a, b), p, d, delta).value;
    const double rhs = w * gen_divergence(a, p, d, delta).value +
                       (1 - w) * gen_divergence(b, p, d, delta).value;
    t.add(lhs <= rhs + 1e-8, std::max(0.0, lhs - rhs));
  }
  return t.outcome("instances (excess shown)");
}

Outcome metric_form(int) {
  std::mt19937_64 gen(1004);
  Tally eq, ub;
  for (int i = 0; i < 50; ++i) {
    const int k = 2 + i % 2;
    const Pmf p0(oracle::random_pmf(gen, k)), p1(oracle::random_pmf(gen, k));
    const GameSpec spec{p0, p1, hamming(k), oracle::uniform(gen, 0, 0.2),
                        oracle::uniform(gen, 0, 0.2), oracle::uniform(gen, 0.005, 0.3), {}};
    const double dev = std::abs(np_fn_exponent(spec).value - np_fn_exponent_metric_form(spec).value);
    eq.add(dev <= 1e-6, dev);
  }
  const DistortionMatrix l2 = make_distortion(LpPowerDistortion{2}, 3);
  for (int i = 0; i < 10; ++i) {
    const Pmf p0(oracle::random_pmf(gen, 3)), p1(oracle::random_pmf(gen, 3));
    const GameSpec spec{p0, p1, l2, oracle::uniform(gen, 0, 0.3), oracle::uniform(gen, 0, 0.3),
                        oracle::uniform(gen, 0.005, 0.3), {}};
    const double gap = np_fn_exponent_metric_form(spec).value - np_fn_exponent(spec).value;
    ub.add(gap >= -1e-8, std::max(0.0, -gap));
  }
  const Outcome a = eq.outcome("Hamming specs"), b = ub.outcome("squared-L2 specs");
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome closed_form(int) {
  std::mt19937_64 gen(1005);
  Tally t;
  while (t.checked < 50) {
    const int k = 2 + t.checked % 2;
    const DistortionMatrix d = t.checked % 4 < 2 ? make_distortion(HammingDistortion{}, k)
                                                 : make_distortion(LpPowerDistortion{1}, k);
    const Pmf p0(oracle::random_pmf(gen, k, 0.0)), p(oracle::random_pmf(gen, k, 0.0));
    const double e = emd(p0, p, d).cost;
    const double d0 = oracle::uniform(gen, 0, e);
    const double d1 = oracle::uniform(gen, 0, 1.2 * e);
    if (!(e > d0)) continue;
    const Indistinguishability r = indistinguishability(p0, p, d, d0, d1);
    const double dev = std::abs(r.inner_value - (e - d0));
    const bool member_ok = std::abs(e - d0 - d1) <= 1e-12 || r.member == (e <= d0 + d1);
    t.add(dev <= 1e-8 && member_ok, dev);
  }
  return t.outcome("instances");
}

Outcome sweep_bound(int threads) {
  const Pmf p0({0.5, 0.3, 0.2});
  const DistortionMatrix d = make_distortion(LpPowerDistortion{2}, 3);
  const double d0 = 0.1, d1 = 0.2;
  const double bound = std::pow(std::sqrt(d0) + std::sqrt(d1), 2);
  const auto rows = region_sweep(p0, d, d0, d1, 0.02, threads);
  int members = 0, outside_bound = 0, missed = 0;
  double widest = 0.0;
  for (const SweepRow& r : rows) {
    const double e = emd(p0, r.pmf, d).cost;
    if (r.member) {
      ++members;
      widest = std::max(widest, e);
      if (e > bound + 1e-9) ++outside_bound;
    }
    if (e <= d0 + d1 && !r.member) ++missed;
  }
  std::ostringstream s;
  s << rows.size() << " lattice points, " << members << " members, widest member emd " << widest
    << " vs bound " << bound << ", " << outside_bound << " beyond bound, " << missed
    << " ball points not members";
  return {outside_bound == 0 && missed == 0 && rows.size() == 1326, s.str()};
}

Outcome dominance(int) {
  const int n = 3, k = 2;
  const double delta1 = 1.0 / 3.0;
  const DistortionMatrix& d = hamming(2);
  const auto seqs = oracle::all_sequences(n, k);
  const auto adm = oracle::admissible_outputs(n, d, delta1);
  const double factor = std::pow(n + 1.0, -k * (k - 1));
  Tally t;
  double min_ratio = kInf;
  for (double lambda : {0.05, 0.2}) {
    const GameSpec spec{Pmf({0.8, 0.2}), Pmf({0.3, 0.7}), d, 1.0 / 3.0, delta1, lambda, {}};
    const Defense phi = make_np_defense(spec);
    std::vector<double> reject(seqs.size());
    for (size_t y = 0; y < seqs.size(); ++y) {
      reject[y] = 1.0 - phi(Composition::Of(seqs[y], k)).accept_h1_prob;
    }
    const double fn_star = exact_error_probs(phi, spec, n).fn;
    std::vector<double> px(seqs.size());
    for (size_t x = 0; x < seqs.size(); ++x) px[x] = oracle::seq_prob(spec.p1, seqs[x]);
    const auto check = [&](double fn_a) {
      t.add(fn_star >= factor * fn_a - 1e-15);
      if (fn_a > 0) min_ratio = std::min(min_ratio, fn_star / fn_a);
    };
    // Every deterministic admissible map, as a mixed-radix counter.
    std::vector<size_t> choice(seqs.size(), 0);
    while (true) {
      double fn_a = 0.0;
      for (size_t x = 0; x < seqs.size(); ++x) fn_a += px[x] * reject[adm[x][choice[x]]];
      check(fn_a);
      size_t x = 0;
      while (x < seqs.size() && ++choice[x] == adm[x].size()) choice[x++] = 0;
      if (x == seqs.size()) break;
    }
    std::mt19937_64 gen(1007);
    for (int c = 0; c < 1000; ++c) {
      double fn_a = 0.0;
      for (size_t x = 0; x < seqs.size(); ++x) {
        std::vector<double> w;
        double total = 0.0;
        for (size_t j = 0; j < adm[x].size(); ++j) total += w.emplace_back(-std::log(oracle::uniform(gen, 1e-300, 1.0)));
        for (size_t j = 0; j < adm[x].size(); ++j) fn_a += px[x] * w[j] / total * reject[adm[x][j]];
      }
      check(fn_a);
    }
  }
  Outcome o = t.outcome("attacks");
  o.detail += ", smallest fn ratio " + fmt("%.4g", min_ratio) + " vs factor " + fmt("%.4g", factor);
  return o;
}

Outcome fp_bound(int) {
  const int k = 2;
  std::mt19937_64 gen(1008);
  Tally t;
  double max_ratio = 0.0;
  for (int n : {4, 5, 6}) {
    for (double lambda : {0.1, 0.3}) {
      for (int rep = 0; rep < 5; ++rep) {
        const Pmf p0(oracle::random_pmf(gen, 2)), p1(oracle::random_pmf(gen, 2));
        const GameSpec spec{p0, p1, hamming(2), oracle::uniform(gen, 0, 0.4),
                            oracle::uniform(gen, 0, 0.4), lambda, {}};
        const double fp = exact_error_probs(make_np_defense(spec), spec, n).fp;
        const double bound =
            std::pow(n + 1.0, (k * k + 2 * k) * (k - 1) + k) * std::exp(-n * lambda);
        t.add(fp <= bound);
        max_ratio = std::max(max_ratio, fp / bound);
      }
    }
  }
  Outcome o = t.outcome("games");
  o.detail += ", largest fp/bound " + fmt("%.3g", max_ratio);
  return o;
}

Outcome brute_force(int) {
  std::mt19937_64 gen(1009);
  Tally law, err, emp;
  for (int n = 1; n <= 6; ++n) {
    for (int rep = 0; rep < 4; ++rep) {
      const Pmf p0(oracle::random_pmf(gen, 2)), p1(oracle::random_pmf(gen, 2));
      const DistortionMatrix d = rep % 2 ? hamming(2)
                                         : DistortionMatrix(2, {0.0, oracle::uniform(gen, 0.3, 2),
                                                                oracle::uniform(gen, 0.3, 2), 0.0});
      const double d0 = oracle::uniform(gen, 0, 0.6), d1 = oracle::uniform(gen, 0, 0.6);
      const auto seqs = oracle::all_sequences(n, 2);
      const auto q0 = oracle::output_law(p0, oracle::dominant_channel(n, d, d0));
      const auto q1 = oracle::output_law(p1, oracle::dominant_channel(n, d, d1));
      const TypeLaw lib = induced_output_pmf(p0, d, d0, n);
      for (size_t y = 0; y < seqs.size(); ++y) {
        const auto it = lib.find(Composition::Of(seqs[y], 2).counts());
        const double dev = std::abs((it == lib.end() ? 0.0 : it->second) - q0[y]);
        law.add(dev <= 1e-12, dev);
        const double g = gen_divergence_empirical(Composition::Of(seqs[y], 2), p0, d, d0);
        const double gb = oracle::empirical_gendiv(seqs[y], p0, d, d0);
        const double gdev = std::isinf(g) || std::isinf(gb) ? (g == gb ? 0.0 : kInf)
                                                            : std::abs(g - gb);
        emp.add(gdev <= 1e-12, gdev);
      }
      const GameSpec spec = rep < 2 ? GameSpec{p0, p1, d, d0, d1, 0.1, {}}
                                    : GameSpec{p0, p1, d, d0, d1, {}, 0.02};
      const Defense phi = rep < 2 ? make_np_defense(spec)
                                  : make_bayes_defense(spec, n, BayesMode::kExact);
      double fp = 0.0, fn = 0.0;
      for (size_t y = 0; y < seqs.size(); ++y) {
        const double acc = phi(Composition::Of(seqs[y], 2)).accept_h1_prob;
        fp += q0[y] * acc;
        fn += q1[y] * (1.0 - acc);
      }
      const ErrorProbs e = exact_error_probs(phi, spec, n);
      const double edev = std::max(std::abs(e.fp - fp), std::abs(e.fn - fn));
      err.add(edev <= 1e-12, edev);
    }
  }
  const Outcome a = law.outcome("output probabilities"), b = err.outcome("error pairs"),
                c = emp.outcome("empirical divergences");
  return {a.pass && b.pass && c.pass, a.detail + "; " + b.detail + "; " + c.detail};
}

Outcome mc_slope(int threads) {
  const GameSpec spec{Pmf({0.8, 0.2}), Pmf({0.3, 0.7}), hamming(2), 0.05, 0.05, 0.05, {}};
  const double e = np_fn_exponent(spec).value;
  const std::vector<int> grid{50, 100, 200, 400};
  const SimulationReport r = monte_carlo_simulate(spec, DefenseMode::kNp, grid, 200000, 20260101, threads);
  std::ostringstream s;
  s << "exponent " << e << ", fn errors per n:";
  const Defense phi = make_np_defense(spec);
  for (const SimulationPoint& p : r.per_n) {
    s << " n=" << p.n << ":" << p.fn_errors << " (exact fn " << fmt("%.3g", exact_error_probs(phi, spec, p.n).fn) << ")";
  }
  s << "; fitted slope " << r.fn_fit.slope << " +- " << r.fn_fit.standard_error << " from "
    << r.fn_fit.points_used << " points";
  const double tol = std::max(0.15 * e, 3 * r.fn_fit.standard_error);
  const bool pass = std::isfinite(r.fn_fit.slope) && std::abs(r.fn_fit.slope - e) <= tol;
  if (!pass && r.fn_fit.points_used < 2) s << " (too few error events to fit)";
  return {pass, s.str()};
}

Outcome bayes_floor(int) {
  std::mt19937_64 gen(1011);
  Tally t;
  for (int i = 0; i < 20; ++i) {
    const int k = 2 + i % 2;
    const double a = i % 4 < 2 ? 0.05 : 0.1;
    const Pmf p0(oracle::random_pmf(gen, k)), p1(oracle::random_pmf(gen, k));
    const DistortionMatrix d = i % 3 ? hamming(k) : make_distortion(LpPowerDistortion{2}, k);
    const BayesExponents b = bayes_exponent(GameSpec{p0, p1, d, oracle::uniform(gen, 0, 0.15),
                                                     oracle::uniform(gen, 0, 0.15), std::nullopt, a});
    t.add(b.fp_exponent >= a - 1e-8, std::max(0.0, a - b.fp_exponent));
  }
  return t.outcome("specs (shortfall shown)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"advhyp acceptance suite"};
  std::vector<int> only;
  int threads = 0;
  app.add_option("--criterion", only, "run only these criteria")->check(CLI::Range(1, 11));
  app.add_option("--threads", threads, "worker cap (0: all cores)")->check(CLI::NonNegativeNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "Stein limit without attack", 10, stein},
      {2, "Chernoff payoff without attack", 30, chernoff},
      {3, "convexity of the generalized divergence", 60, convexity},
      {4, "metric-form exponent", 300, metric_form},
      {5, "closed-form inner value", 0, closed_form},
      {6, "region sweep bound and containment", 600, sweep_bound},
      {7, "dominant attack at desk scale", 300, dominance},
      {8, "np false-positive bound", 0, fp_bound},
      {9, "exact computations vs enumeration", 0, brute_force},
      {10, "Monte Carlo fn slope", 900, mc_slope},
      {11, "Bayes fp floor", 0, bayes_floor},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(threads);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit_s > 0 && secs > c.time_limit_s) {
      o.pass = false;
      o.detail += "; over the " + fmt("%.0f", c.time_limit_s) + " s limit";
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s (%s) [%.1f s]\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
