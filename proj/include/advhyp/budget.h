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

#ifndef ADVHYP_BUDGET_H_
#define ADVHYP_BUDGET_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "advhyp/simplex.h"

namespace advhyp {

// Exact enumeration budget shared by every type-aggregated computation.
inline constexpr std::int64_t kJointCompositionBudget = 10'000'000;

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

// Best continued-fraction approximation with denominator <= max_den, returned
// only when it reproduces x to ~1e-12 relative. 0.1 -> 1/10, 1/3. -> 1/3.
std::optional<Rational> snap_rational(double x, std::int64_t max_den = 1'000'000);

// Decides sum_{ij} counts(i,j) d(i,j) <= n * delta for integer count
// matrices. When d and delta snap to rationals the test is exact integer
// arithmetic, so boundary classes (distortion exactly n * delta) are never
// lost to rounding. Otherwise it falls back to a relative 1e-12 slack.
class DistortionBudget {
 public:
  DistortionBudget(const DistortionMatrix& d, double delta);

  bool exact() const { return exact_; }
  int alphabet_size() const { return k_; }

  // Per-letter cost in the budget's units: integers scaled by a common
  // denominator when exact, the raw distortion otherwise.
  std::span<const double> unit_costs() const { return unit_cost_; }

  // Total allowance for length n in unit_costs() units.
  double Allowance(std::int64_t n) const;

  // `cost` is a total in unit_costs() units (an integer when exact()).
  bool AdmitsCost(double cost, std::int64_t n) const;
  bool Admits(std::span<const int> counts, std::int64_t n) const;

 private:
  int k_;
  bool exact_ = false;
  std::vector<double> unit_cost_;
  std::int64_t common_den_ = 1;
  Rational delta_{};
  double delta_value_ = 0.0;
};

}  // namespace advhyp

#endif  // ADVHYP_BUDGET_H_
