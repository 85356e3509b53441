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

#ifndef ADVHYP_SIMPLEX_H_
#define ADVHYP_SIMPLEX_H_

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "advhyp/errors.h"

namespace advhyp {

// Absolute tolerance on the total mass of a Pmf or Coupling.
inline constexpr double kMassTolerance = 1e-12;

// Probability mass function over the alphabet {0, ..., K-1}.
class Pmf {
 public:
  // Throws ValidationError when an entry is negative (or not finite) or the
  // entries do not sum to one within kMassTolerance. No renormalization.
  explicit Pmf(std::vector<double> probs);

  static Pmf Uniform(int alphabet_size);
  static Pmf PointMass(int alphabet_size, int symbol);

  int alphabet_size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vec() const { return probs_; }

  // Convex combination w * a + (1 - w) * b.
  static Pmf Mix(double w, const Pmf& a, const Pmf& b);

  friend bool operator==(const Pmf&, const Pmf&) = default;

 private:
  std::vector<double> probs_;
};

// Joint PMF on {0..K-1} x {0..K-1}. Row index is the X (source) letter, column
// index is the Y (observed) letter.
class Coupling {
 public:
  Coupling(int alphabet_size, std::vector<double> joint);

  // Independent coupling p x q.
  static Coupling Product(const Pmf& p, const Pmf& q);
  // Mass p(i) on cell (i, i).
  static Coupling Diagonal(const Pmf& p);

  int alphabet_size() const { return k_; }
  double operator()(int i, int j) const { return joint_[i * k_ + j]; }
  std::span<const double> joint() const { return joint_; }

  Pmf x_marginal() const;
  Pmf y_marginal() const;

 private:
  int k_;
  std::vector<double> joint_;
};

struct MetricCertificate {
  bool symmetric = false;
  bool zero_diagonal = false;
  bool triangle_ok = false;

  bool is_metric() const { return symmetric && zero_diagonal && triangle_ok; }
};

// Per-letter distortion d(x, y) >= 0. The certificate is always computed by an
// exhaustive scan at construction, so it is never merely claimed.
class DistortionMatrix {
 public:
  DistortionMatrix(int alphabet_size, std::vector<double> values);

  int alphabet_size() const { return k_; }
  double operator()(int x, int y) const { return values_[x * k_ + y]; }
  std::span<const double> values() const { return values_; }
  double max_value() const;

  const MetricCertificate& certificate() const { return certificate_; }
  bool is_metric() const { return certificate_.is_metric(); }

  DistortionMatrix Scaled(double alpha) const;

 private:
  int k_;
  std::vector<double> values_;
  MetricCertificate certificate_;
};

struct HammingDistortion {};
// d(x, y) = |x - y|^p on symbol values 0..K-1.
struct LpPowerDistortion {
  double p = 1.0;
};
struct ExplicitDistortion {
  std::vector<std::vector<double>> matrix;
};
using DistortionKind =
    std::variant<HammingDistortion, LpPowerDistortion, ExplicitDistortion>;

DistortionMatrix make_distortion(const DistortionKind& kind, int alphabet_size);

// D(p || q) in nats; +infinity when p puts mass where q has none.
double kl_divergence(const Pmf& p, const Pmf& q);

// Same sum over raw nonnegative vectors (need not be normalized).
double kl_divergence(std::span<const double> p, std::span<const double> q);

double expected_distortion(const Coupling& c, const DistortionMatrix& d);

}  // namespace advhyp

#endif  // ADVHYP_SIMPLEX_H_
