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

#include <cmath>
#include <limits>
#include <random>
#include <tuple>

#include "doctest.h"

#include "advhyp/gendiv.h"
#include "advhyp/transport.h"
#include "support/oracles.h"

using namespace advhyp;

namespace {

std::vector<double> vec(const Pmf& p) { return {p.probs().begin(), p.probs().end()}; }

const DistortionMatrix& hamming2() {
  static const DistortionMatrix d = make_distortion(HammingDistortion{}, 2);
  return d;
}

DistortionMatrix pick_distortion(int trial, int k) {
  switch (trial % 3) {
    case 0:
      return make_distortion(HammingDistortion{}, k);
    case 1:
      return make_distortion(LpPowerDistortion{1}, k);
    default:
      return make_distortion(LpPowerDistortion{2}, k);
  }
}

void check_invariants(const GenDivResult& g, const Pmf& py, const Pmf& p,
                      const DistortionMatrix& d, double delta) {
  REQUIRE(std::isfinite(g.value));
  const Pmf y = g.coupling.y_marginal();
  for (int i = 0; i < py.alphabet_size(); ++i) CHECK(std::abs(y[i] - py[i]) <= 1e-9);
  CHECK(expected_distortion(g.coupling, d) <= delta + 1e-9);
  CHECK(g.argmin_px == g.coupling.x_marginal());
  CHECK(std::abs(g.value - kl_divergence(g.argmin_px, p)) <= 1e-9);
  CHECK(g.diagnostics.converged);
  CHECK(g.diagnostics.primal_dual_gap <= 1e-9 * std::max(1.0, g.value));
}

}  // namespace

TEST_SUITE("gendiv") {

TEST_CASE("generalized divergence examples") {
  const Pmf py({0.5, 0.5}), p({0.9, 0.1});
  CHECK(gen_divergence(py, p, hamming2(), 0.0).value ==
        doctest::Approx(kl_divergence(py, p)).epsilon(1e-10));
  const GenDivResult g = gen_divergence(py, p, hamming2(), 0.2);
  const double ref = kl_divergence(Pmf({0.7, 0.3}), p);
  CHECK(std::abs(g.value - ref) <= 1e-9);
  CHECK(std::abs(g.value - oracle::binary_gendiv(0.5, {0.9, 0.1}, 0.2)) <= 1e-9);
  CHECK(std::abs(ref - 0.1537) < 1e-4);
  check_invariants(g, py, p, hamming2(), 0.2);

  const double e = emd(py, p, hamming2()).cost;
  const GenDivResult z = gen_divergence(py, p, hamming2(), e + 0.01);
  CHECK(z.value <= 1e-12);
  CHECK(std::abs(z.argmin_px[0] - 0.9) <= 1e-6);
}

TEST_CASE("generalized divergence at zero budget is the plain divergence") {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + trial % 3;
    const Pmf py(oracle::random_pmf(gen, k)), p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = pick_distortion(trial, k);
    CHECK(std::abs(gen_divergence(py, p, d, 0.0).value - kl_divergence(py, p)) <= 1e-9);
  }
}

TEST_CASE("support violations give infinity with a reason") {
  const GenDivResult g = gen_divergence(Pmf({0.0, 1.0}), Pmf({1.0, 0.0}), hamming2(), 0.5);
  CHECK(std::isinf(g.value));
  CHECK(g.diagnostics.infinite_reason == "support");
  const GenDivResult f = gen_divergence(Pmf({0.3, 0.7}), Pmf({1.0, 0.0}), hamming2(), 0.7);
  CHECK(f.value <= 1e-12);
  const GenDivResult h = gen_divergence(Pmf({0.3, 0.7}), Pmf({1.0, 0.0}), hamming2(), 0.69);
  CHECK(std::isinf(h.value));
}

TEST_CASE("generalized divergence matches the binary oracle") {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 200; ++trial) {
    const Pmf py(oracle::random_pmf(gen, 2, 0.0)), p(oracle::random_pmf(gen, 2));
    const double delta = oracle::uniform(gen, 0.0, 0.6);
    const GenDivResult g = gen_divergence(py, p, hamming2(), delta);
    check_invariants(g, py, p, hamming2(), delta);
    CHECK(std::abs(g.value - oracle::binary_gendiv(py[0], vec(p), delta)) <= 1e-9);
  }
}

TEST_CASE("generalized divergence matches a simplex grid search") {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 8; ++trial) {
    const int k = trial < 2 ? 2 : 3;
    const Pmf py(oracle::random_pmf(gen, k)), p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = pick_distortion(trial, k);
    const double delta = oracle::uniform(gen, 0.02, 0.3);
    const auto emd_fn = [&](const std::vector<double>& a, const std::vector<double>& b) {
      return emd(Pmf(a), Pmf(b), d).cost;
    };
    const GenDivResult g = gen_divergence(py, p, d, delta);
    check_invariants(g, py, p, d, delta);
    const double grid = oracle::gendiv_grid(vec(py), vec(p), delta, emd_fn);
    CHECK(g.value <= grid + 1e-9);
    CHECK(std::abs(g.value - grid) <= 1e-6);
  }
}

TEST_CASE("generalized divergence is nonincreasing in the budget") {
  std::mt19937_64 gen(44);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + trial % 2;
    const Pmf py(oracle::random_pmf(gen, k)), p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = pick_distortion(trial, k);
    double prev = kl_divergence(py, p);
    for (double delta : {0.0, 0.01, 0.05, 0.1, 0.2, 0.4, 0.8}) {
      const double v = gen_divergence(py, p, d, delta).value;
      CHECK(v <= prev + 1e-9);
      prev = v;
    }
  }
}

TEST_CASE("generalized divergence is convex in the observed marginal") {
  std::mt19937_64 gen(45);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = 2 + trial % 2;
    const Pmf a(oracle::random_pmf(gen, k, 0.0)), b(oracle::random_pmf(gen, k, 0.0));
    const Pmf p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = pick_distortion(trial, k);
    const double delta = oracle::uniform(gen, 0.0, 0.3);
    const double w = oracle::uniform(gen, 0.05, 0.95);
    const double lhs = gen_divergence(Pmf::Mix(w, a, b), p, d, delta).value;
    const double rhs = w * gen_divergence(a, p, d, delta).value +
                       (1 - w) * gen_divergence(b, p, d, delta).value;
    CHECK(lhs <= rhs + 1e-8);
  }
}

TEST_CASE("zero level set is the transport ball") {
  std::mt19937_64 gen(46);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + trial % 2;
    const Pmf py(oracle::random_pmf(gen, k)), p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = pick_distortion(trial, k);
    const double e = emd(py, p, d).cost;
    // Budgets clearly on either side of the transport cost.
    const double inside = e * oracle::uniform(gen, 1.0 + 1e-6, 1.5);
    const double outside = e * oracle::uniform(gen, 0.0, 0.9);
    CHECK(gen_divergence(py, p, d, inside).value <= 1e-9);
    CHECK(gen_divergence(py, p, d, outside).value > 1e-12);
  }
}

TEST_CASE("empirical generalized divergence examples") {
  const Pmf p({0.9, 0.1});
  CHECK(gen_divergence_empirical(Composition({1, 1}), p, hamming2(), 0.0) ==
        doctest::Approx(kl_divergence(Pmf({0.5, 0.5}), p)).epsilon(1e-14));
  CHECK(gen_divergence_empirical(Composition({1, 1}), p, hamming2(), 0.5) ==
        doctest::Approx(std::log(1 / 0.9)).epsilon(1e-14));
  CHECK(std::abs(std::log(1 / 0.9) - 0.1054) < 1e-4);
  CHECK(gen_divergence_empirical(Composition({2, 0}), Pmf::Uniform(2), hamming2(), 1.0) ==
        0.0);
  CHECK(gen_divergence_empirical(Composition({1, 1}), Pmf::Uniform(2), hamming2(), 1.0) ==
        0.0);
  const Pmf q({0.2, 0.5, 0.3});
  const DistortionMatrix l2 = make_distortion(LpPowerDistortion{2}, 3);
  CHECK(gen_divergence_empirical(Composition({2, 1, 3}), q, l2, 0.0) ==
        doctest::Approx(kl_divergence(Pmf({2 / 6.0, 1 / 6.0, 3 / 6.0}), q)).epsilon(1e-14));
}

TEST_CASE("empirical generalized divergence matches sequence enumeration") {
  std::mt19937_64 gen(47);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + trial % 2;
    const int n = 1 + trial % (k == 2 ? 6 : 4);
    const Pmf p(oracle::random_pmf(gen, k));
    const DistortionMatrix d = pick_distortion(trial, k);
    const double delta = oracle::uniform(gen, 0.0, 1.0);
    const EmpiricalGenDiv cached(p, d, delta);
    for (const auto& y : oracle::all_sequences(n, k)) {
      const double brute = oracle::empirical_gendiv(y, p, d, delta);
      const Composition c = Composition::Of(y, k);
      CHECK(std::abs(gen_divergence_empirical(c, p, d, delta) - brute) <= 1e-12);
      CHECK(cached(c) == gen_divergence_empirical(c, p, d, delta));
    }
  }
}

TEST_CASE("empirical generalized divergence converges from above") {
  const Pmf p({0.85, 0.15});
  for (const auto& [d, delta, py] :
       {std::tuple{make_distortion(HammingDistortion{}, 2), 0.1, std::vector<double>{0.3, 0.7}},
        std::tuple{make_distortion(LpPowerDistortion{2}, 2), 0.17, std::vector<double>{0.4, 0.6}}}) {
    const double limit = gen_divergence(Pmf(py), p, d, delta).value;
    double prev_gap = std::numeric_limits<double>::infinity();
    double first_gap = 0.0;
    for (int n : {10, 20, 40, 80, 160, 320}) {
      std::vector<int> counts;
      for (double v : py) counts.push_back(static_cast<int>(std::lround(v * n)));
      const double emp = gen_divergence_empirical(Composition(counts), p, d, delta);
      CHECK(emp >= limit - 1e-9);
      const double gap = emp - limit;
      CHECK(gap <= prev_gap + 1e-12);
      if (n == 10) first_gap = gap;
      prev_gap = gap;
    }
    CHECK(prev_gap <= std::max(0.1 * first_gap, 1e-9));
  }
}

}  // TEST_SUITE
