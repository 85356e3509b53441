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

// Method-of-types combinatorics over the alphabet {0, ..., K-1}.

#ifndef ADVHYP_TYPES_H_
#define ADVHYP_TYPES_H_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "advhyp/budget.h"
#include "advhyp/rng.h"
#include "advhyp/simplex.h"

namespace advhyp {

using BigInt = boost::multiprecision::cpp_int;

// Symbol counts of a length-n sequence.
class Composition {
 public:
  explicit Composition(std::vector<int> counts);
  static Composition Of(std::span<const int> sequence, int alphabet_size);

  int alphabet_size() const { return static_cast<int>(counts_.size()); }
  int n() const { return n_; }
  int operator[](int i) const { return counts_[i]; }
  const std::vector<int>& counts() const { return counts_; }
  Pmf empirical() const;

  friend bool operator==(const Composition&, const Composition&) = default;
  friend auto operator<=>(const Composition& a, const Composition& b) {
    return a.counts_ <=> b.counts_;
  }

 private:
  std::vector<int> counts_;
  int n_ = 0;
};

// Pair counts n_xy(i, j); rows are x letters, columns are y letters.
class JointComposition {
 public:
  JointComposition(int alphabet_size, std::vector<int> counts);
  static JointComposition Of(std::span<const int> x, std::span<const int> y,
                             int alphabet_size);

  int alphabet_size() const { return k_; }
  int n() const { return n_; }
  int operator()(int i, int j) const { return counts_[i * k_ + j]; }
  const std::vector<int>& counts() const { return counts_; }

  Composition x_type() const;
  Composition y_type() const;
  double distortion(const DistortionMatrix& d) const;

  friend bool operator==(const JointComposition&, const JointComposition&) = default;

 private:
  int k_;
  std::vector<int> counts_;
  int n_ = 0;
};

// Every composition of n into K parts, lexicographically ascending.
std::vector<Composition> all_compositions(int n, int alphabet_size);

// Joint compositions with row sums x_type and distortion <= n * delta, in
// lexicographic order of the flattened count matrix. Throws ResourceError past
// `budget` results.
std::vector<JointComposition> enumerate_joint_compositions(
    const Composition& x_type, const DistortionMatrix& d, double delta,
    std::int64_t budget = kJointCompositionBudget);

// Same enumeration with a caller-supplied exact budget test; each admissible
// flattened count matrix is passed to `visit`.
void visit_joint_compositions(const Composition& x_type,
                              const DistortionBudget& budget,
                              const std::function<void(std::span<const int>)>& visit,
                              std::int64_t limit = kJointCompositionBudget);

// N with c_n(x) = 1 / N.
std::int64_t count_admissible_conditional_classes(
    const Composition& x_type, const DistortionMatrix& d, double delta,
    std::int64_t budget = kJointCompositionBudget);

BigInt multinomial(std::span<const int> counts);
// |T(x)|
BigInt type_class_size(const Composition& c);
// |T(y|x)|: product over rows of the row multinomial.
BigInt conditional_class_size(const JointComposition& j);
// |T(x|y)|: product over columns.
BigInt reverse_conditional_class_size(const JointComposition& j);
// |T(x, y)|
BigInt joint_class_size(const JointComposition& j);

double to_double(const BigInt& v);

// Draws from the dominant attack channel A*: a uniformly chosen admissible
// conditional type class, then a uniform member of it. Randomness is consumed
// as one uniform_index over the class list, then for each symbol a = 0..K-1 a
// Fisher-Yates shuffle of the y letters assigned to the positions x_i = a.
// Admissible class lists are cached per x type; the cache is thread-safe.
class AttackSampler {
 public:
  AttackSampler(const DistortionMatrix& d, double delta);

  std::vector<int> Sample(std::span<const int> x, Rng& rng) const;
  const std::vector<JointComposition>& Classes(const Composition& x_type) const;

  const DistortionMatrix& distortion() const { return d_; }
  double delta() const { return delta_; }

 private:
  DistortionMatrix d_;
  double delta_;
  DistortionBudget budget_;
  mutable std::mutex mu_;
  mutable std::map<std::vector<int>, std::unique_ptr<std::vector<JointComposition>>>
      cache_;
};

std::vector<int> sample_attack_output(std::span<const int> x,
                                      const DistortionMatrix& d, double delta,
                                      Rng& rng);

}  // namespace advhyp

#endif  // ADVHYP_TYPES_H_
