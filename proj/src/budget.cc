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

#include "advhyp/budget.h"

#include <cmath>
#include <numeric>

namespace advhyp {
namespace {

constexpr std::int64_t kMaxCommonDen = 1'000'000'000;
constexpr double kSnapTolerance = 1e-12;

}  // namespace

std::optional<Rational> snap_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x) || x < 0.0 || x > 1e9) return std::nullopt;
  // Convergents h/k of the continued fraction of x.
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  double r = x;
  for (int iter = 0; iter < 64; ++iter) {
    const double fl = std::floor(r);
    const auto a = static_cast<std::int64_t>(fl);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > max_den) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    const double approx = static_cast<double>(h1) / static_cast<double>(k1);
    if (std::abs(approx - x) <= kSnapTolerance * std::max(1.0, x)) {
      return Rational{h1, k1};
    }
    const double frac = r - fl;
    if (frac < 1e-300) break;
    r = 1.0 / frac;
  }
  return std::nullopt;
}

DistortionBudget::DistortionBudget(const DistortionMatrix& d, double delta)
    : k_(d.alphabet_size()), delta_value_(delta) {
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw ValidationError("distortion budget must be finite and >= 0");
  }
  const auto values = d.values();
  std::vector<Rational> snapped;
  snapped.reserve(values.size());
  exact_ = true;
  std::int64_t den = 1;
  for (double v : values) {
    auto r = snap_rational(v);
    if (!r) {
      exact_ = false;
      break;
    }
    den = std::lcm(den, r->den);
    if (den > kMaxCommonDen) {
      exact_ = false;
      break;
    }
    snapped.push_back(*r);
  }
  std::optional<Rational> rd;
  if (exact_) rd = snap_rational(delta);
  if (!rd) exact_ = false;

  unit_cost_.assign(values.begin(), values.end());
  if (exact_) {
    common_den_ = den;
    delta_ = *rd;
    for (size_t i = 0; i < snapped.size(); ++i) {
      const __int128 scaled =
          static_cast<__int128>(snapped[i].num) * (den / snapped[i].den);
      // Integers up to 2^40 keep n-fold totals exact in a double.
      if (scaled > (static_cast<__int128>(1) << 40)) {
        exact_ = false;
        unit_cost_.assign(values.begin(), values.end());
        common_den_ = 1;
        return;
      }
      unit_cost_[i] = static_cast<double>(scaled);
    }
  }
}

double DistortionBudget::Allowance(std::int64_t n) const {
  if (exact_) {
    return static_cast<double>(n) * static_cast<double>(delta_.num) *
           static_cast<double>(common_den_) / static_cast<double>(delta_.den);
  }
  return static_cast<double>(n) * delta_value_;
}

bool DistortionBudget::AdmitsCost(double cost, std::int64_t n) const {
  if (exact_) {
    // cost * delta_den <= n * delta_num * D
    const auto c = static_cast<__int128>(std::llround(cost));
    return c * delta_.den <=
           static_cast<__int128>(n) * delta_.num * common_den_;
  }
  const double allowance = static_cast<double>(n) * delta_value_;
  return cost <= allowance + 1e-12 * std::max(1.0, allowance);
}

bool DistortionBudget::Admits(std::span<const int> counts, std::int64_t n) const {
  double cost = 0.0;
  for (size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != 0) cost += counts[i] * unit_cost_[i];
  }
  return AdmitsCost(cost, n);
}

}  // namespace advhyp
