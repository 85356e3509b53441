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

#include "advhyp/simplex.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace advhyp {
namespace {

void CheckMass(std::span<const double> values, const char* what) {
  double total = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(std::string(what) +
                            ": entries must be finite and nonnegative");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw ValidationError(std::string(what) + ": entries sum to " +
                          std::to_string(total) + ", expected 1");
  }
}

}  // namespace

Pmf::Pmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("Pmf: empty alphabet");
  CheckMass(probs_, "Pmf");
}

Pmf Pmf::Uniform(int alphabet_size) {
  if (alphabet_size < 1) throw ValidationError("Pmf: empty alphabet");
  return Pmf(std::vector<double>(alphabet_size, 1.0 / alphabet_size));
}

Pmf Pmf::PointMass(int alphabet_size, int symbol) {
  if (symbol < 0 || symbol >= alphabet_size) {
    throw ValidationError("Pmf: symbol outside alphabet");
  }
  std::vector<double> probs(alphabet_size, 0.0);
  probs[symbol] = 1.0;
  return Pmf(std::move(probs));
}

Pmf Pmf::Mix(double w, const Pmf& a, const Pmf& b) {
  if (a.alphabet_size() != b.alphabet_size()) {
    throw DimensionError("Pmf::Mix: alphabet sizes differ");
  }
  if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("Pmf::Mix: weight");
  std::vector<double> out(a.alphabet_size());
  for (int i = 0; i < a.alphabet_size(); ++i) {
    out[i] = w * a[i] + (1.0 - w) * b[i];
  }
  return Pmf(std::move(out));
}

Coupling::Coupling(int alphabet_size, std::vector<double> joint)
    : k_(alphabet_size), joint_(std::move(joint)) {
  if (k_ < 1 || joint_.size() != static_cast<size_t>(k_) * k_) {
    throw DimensionError("Coupling: expected a K x K matrix");
  }
  CheckMass(joint_, "Coupling");
}

Coupling Coupling::Product(const Pmf& p, const Pmf& q) {
  if (p.alphabet_size() != q.alphabet_size()) {
    throw DimensionError("Coupling::Product: alphabet sizes differ");
  }
  const int k = p.alphabet_size();
  std::vector<double> joint(k * k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) joint[i * k + j] = p[i] * q[j];
  }
  return Coupling(k, std::move(joint));
}

Coupling Coupling::Diagonal(const Pmf& p) {
  const int k = p.alphabet_size();
  std::vector<double> joint(k * k, 0.0);
  for (int i = 0; i < k; ++i) joint[i * k + i] = p[i];
  return Coupling(k, std::move(joint));
}

Pmf Coupling::x_marginal() const {
  std::vector<double> m(k_, 0.0);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) m[i] += joint_[i * k_ + j];
  }
  return Pmf(std::move(m));
}

Pmf Coupling::y_marginal() const {
  std::vector<double> m(k_, 0.0);
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) m[j] += joint_[i * k_ + j];
  }
  return Pmf(std::move(m));
}

DistortionMatrix::DistortionMatrix(int alphabet_size, std::vector<double> values)
    : k_(alphabet_size), values_(std::move(values)) {
  if (k_ < 1 || values_.size() != static_cast<size_t>(k_) * k_) {
    throw DimensionError("DistortionMatrix: expected a K x K matrix");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(
          "DistortionMatrix: entries must be finite and nonnegative");
    }
  }
  const auto at = [&](int i, int j) { return values_[i * k_ + j]; };
  const double scale = std::max(1.0, max_value());
  const double tol = 1e-12 * scale;
  certificate_.symmetric = true;
  certificate_.zero_diagonal = true;
  certificate_.triangle_ok = true;
  for (int i = 0; i < k_; ++i) {
    if (at(i, i) != 0.0) certificate_.zero_diagonal = false;
    for (int j = 0; j < k_; ++j) {
      if (std::abs(at(i, j) - at(j, i)) > tol) certificate_.symmetric = false;
      for (int m = 0; m < k_; ++m) {
        if (at(i, m) > at(i, j) + at(j, m) + tol) {
          certificate_.triangle_ok = false;
        }
      }
    }
  }
}

double DistortionMatrix::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

DistortionMatrix DistortionMatrix::Scaled(double alpha) const {
  if (!(alpha > 0.0)) throw ValidationError("DistortionMatrix: scale <= 0");
  std::vector<double> scaled = values_;
  for (double& v : scaled) v *= alpha;
  return DistortionMatrix(k_, std::move(scaled));
}

DistortionMatrix make_distortion(const DistortionKind& kind, int alphabet_size) {
  const int k = alphabet_size;
  if (k < 2) throw ValidationError("make_distortion: K must be at least 2");
  std::vector<double> values(k * k, 0.0);
  if (std::holds_alternative<HammingDistortion>(kind)) {
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) values[i * k + j] = i == j ? 0.0 : 1.0;
    }
  } else if (const auto* lp = std::get_if<LpPowerDistortion>(&kind)) {
    if (!(lp->p >= 1.0) || !std::isfinite(lp->p)) {
      throw ValidationError("make_distortion: L_p^p needs p >= 1");
    }
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        values[i * k + j] = std::pow(std::abs(i - j), lp->p);
      }
    }
  } else {
    const auto& m = std::get<ExplicitDistortion>(kind).matrix;
    if (m.size() != static_cast<size_t>(k)) {
      throw DimensionError("make_distortion: matrix has wrong row count");
    }
    for (int i = 0; i < k; ++i) {
      if (m[i].size() != static_cast<size_t>(k)) {
        throw DimensionError("make_distortion: matrix row has wrong length");
      }
      for (int j = 0; j < k; ++j) values[i * k + j] = m[i][j];
    }
  }
  return DistortionMatrix(k, std::move(values));
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionError("kl_divergence: alphabet sizes differ");
  }
  double total = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) return std::numeric_limits<double>::infinity();
    total += p[i] * std::log(p[i] / q[i]);
  }
  return total;
}

double kl_divergence(const Pmf& p, const Pmf& q) {
  // Rounding can leave tiny negative sums for p ~ q; the divergence is >= 0.
  return std::max(0.0, kl_divergence(p.probs(), q.probs()));
}

double expected_distortion(const Coupling& c, const DistortionMatrix& d) {
  if (c.alphabet_size() != d.alphabet_size()) {
    throw DimensionError("expected_distortion: alphabet sizes differ");
  }
  double total = 0.0;
  const auto joint = c.joint();
  const auto values = d.values();
  for (size_t i = 0; i < joint.size(); ++i) total += joint[i] * values[i];
  return total;
}

}  // namespace advhyp
