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

#include "advhyp/types.h"

#include <numeric>
#include <string>
#include <utility>

namespace advhyp {
namespace {

void check_symbols(std::span<const int> seq, int k) {
  for (int s : seq) {
    if (s < 0 || s >= k) {
      throw ValidationError("symbol " + std::to_string(s) + " outside alphabet");
    }
  }
}

// Depth-first walk over the K*K cells, row by row; each row is a composition
// of x_type[row] enumerated lexicographically ascending.
class JointWalker {
 public:
  JointWalker(const Composition& x_type, const DistortionBudget& budget,
              const std::function<void(std::span<const int>)>& visit,
              std::int64_t limit)
      : x_(x_type), budget_(budget), visit_(visit), limit_(limit),
        k_(x_type.alphabet_size()), counts_(k_ * k_, 0),
        cost_(budget.unit_costs()) {}

  void Run() { Cell(0, 0, x_[0], 0.0); }

 private:
  void Cell(int row, int col, int remaining, double cost) {
    const int idx = row * k_ + col;
    if (col == k_ - 1) {
      counts_[idx] = remaining;
      const double c = cost + remaining * cost_[idx];
      if (!budget_.AdmitsCost(c, x_.n())) return;
      if (row == k_ - 1) {
        if (++emitted_ > limit_) {
          throw ResourceError("joint composition enumeration exceeds budget of " +
                              std::to_string(limit_));
        }
        visit_(counts_);
      } else {
        Cell(row + 1, 0, x_[row + 1], c);
      }
      counts_[idx] = 0;
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      const double c = cost + v * cost_[idx];
      // Costs are nonnegative, so an over-budget prefix cannot recover.
      if (!budget_.AdmitsCost(c, x_.n())) break;
      counts_[idx] = v;
      Cell(row, col + 1, remaining - v, c);
    }
    counts_[idx] = 0;
  }

  const Composition& x_;
  const DistortionBudget& budget_;
  const std::function<void(std::span<const int>)>& visit_;
  std::int64_t limit_;
  int k_;
  std::vector<int> counts_;
  std::span<const double> cost_;
  std::int64_t emitted_ = 0;
};

}  // namespace

Composition::Composition(std::vector<int> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw ValidationError("Composition: empty alphabet");
  for (int c : counts_) {
    if (c < 0) throw ValidationError("Composition: negative count");
    n_ += c;
  }
}

Composition Composition::Of(std::span<const int> sequence, int alphabet_size) {
  check_symbols(sequence, alphabet_size);
  std::vector<int> counts(alphabet_size, 0);
  for (int s : sequence) ++counts[s];
  return Composition(std::move(counts));
}

Pmf Composition::empirical() const {
  if (n_ == 0) throw ValidationError("Composition: empirical PMF of n = 0");
  std::vector<double> p(counts_.size());
  for (size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(counts_[i]) / n_;
  double total = 0.0;
  for (double v : p) total += v;
  if (std::abs(total - 1.0) > kMassTolerance) {
    for (double& v : p) v /= total;
  }
  return Pmf(std::move(p));
}

JointComposition::JointComposition(int alphabet_size, std::vector<int> counts)
    : k_(alphabet_size), counts_(std::move(counts)) {
  if (k_ < 1 || counts_.size() != static_cast<size_t>(k_) * k_) {
    throw DimensionError("JointComposition: expected K*K counts");
  }
  for (int c : counts_) {
    if (c < 0) throw ValidationError("JointComposition: negative count");
    n_ += c;
  }
}

JointComposition JointComposition::Of(std::span<const int> x, std::span<const int> y,
                                      int alphabet_size) {
  if (x.size() != y.size()) throw DimensionError("JointComposition: lengths differ");
  check_symbols(x, alphabet_size);
  check_symbols(y, alphabet_size);
  std::vector<int> counts(alphabet_size * alphabet_size, 0);
  for (size_t t = 0; t < x.size(); ++t) ++counts[x[t] * alphabet_size + y[t]];
  return JointComposition(alphabet_size, std::move(counts));
}

Composition JointComposition::x_type() const {
  std::vector<int> c(k_, 0);
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) c[i] += counts_[i * k_ + j];
  return Composition(std::move(c));
}

Composition JointComposition::y_type() const {
  std::vector<int> c(k_, 0);
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) c[j] += counts_[i * k_ + j];
  return Composition(std::move(c));
}

double JointComposition::distortion(const DistortionMatrix& d) const {
  if (d.alphabet_size() != k_) throw DimensionError("JointComposition: K mismatch");
  double total = 0.0;
  for (int idx = 0; idx < k_ * k_; ++idx) total += counts_[idx] * d.values()[idx];
  return total;
}

std::vector<Composition> all_compositions(int n, int alphabet_size) {
  if (n < 0 || alphabet_size < 1) throw ValidationError("all_compositions: bad size");
  std::vector<Composition> out;
  std::vector<int> c(alphabet_size, 0);
  std::function<void(int, int)> rec = [&](int pos, int remaining) {
    if (pos == alphabet_size - 1) {
      c[pos] = remaining;
      out.emplace_back(c);
      return;
    }
    for (int v = 0; v <= remaining; ++v) {
      c[pos] = v;
      rec(pos + 1, remaining - v);
    }
  };
  rec(0, n);
  return out;
}

void visit_joint_compositions(const Composition& x_type,
                              const DistortionBudget& budget,
                              const std::function<void(std::span<const int>)>& visit,
                              std::int64_t limit) {
  if (budget.alphabet_size() != x_type.alphabet_size()) {
    throw DimensionError("visit_joint_compositions: K mismatch");
  }
  JointWalker(x_type, budget, visit, limit).Run();
}

std::vector<JointComposition> enumerate_joint_compositions(
    const Composition& x_type, const DistortionMatrix& d, double delta,
    std::int64_t budget) {
  const int k = x_type.alphabet_size();
  DistortionBudget b(d, delta);
  std::vector<JointComposition> out;
  visit_joint_compositions(
      x_type, b,
      [&](std::span<const int> c) {
        out.emplace_back(k, std::vector<int>(c.begin(), c.end()));
      },
      budget);
  return out;
}

std::int64_t count_admissible_conditional_classes(const Composition& x_type,
                                                  const DistortionMatrix& d,
                                                  double delta,
                                                  std::int64_t budget) {
  DistortionBudget b(d, delta);
  std::int64_t count = 0;
  visit_joint_compositions(x_type, b, [&](std::span<const int>) { ++count; }, budget);
  return count;
}

BigInt multinomial(std::span<const int> counts) {
  // Product of binomials C(s_1, c_1) C(s_2, c_2) ... with running sums s_i.
  BigInt result = 1;
  int total = 0;
  for (int c : counts) {
    for (int t = 1; t <= c; ++t) {
      result *= total + t;
      result /= t;
    }
    total += c;
  }
  return result;
}

BigInt type_class_size(const Composition& c) { return multinomial(c.counts()); }

BigInt conditional_class_size(const JointComposition& j) {
  const int k = j.alphabet_size();
  BigInt result = 1;
  for (int i = 0; i < k; ++i) {
    result *= multinomial(std::span<const int>(j.counts()).subspan(i * k, k));
  }
  return result;
}

BigInt reverse_conditional_class_size(const JointComposition& j) {
  const int k = j.alphabet_size();
  BigInt result = 1;
  std::vector<int> col(k);
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < k; ++i) col[i] = j(i, c);
    result *= multinomial(col);
  }
  return result;
}

BigInt joint_class_size(const JointComposition& j) { return multinomial(j.counts()); }

double to_double(const BigInt& v) { return v.convert_to<double>(); }

AttackSampler::AttackSampler(const DistortionMatrix& d, double delta)
    : d_(d), delta_(delta), budget_(d, delta) {}

const std::vector<JointComposition>& AttackSampler::Classes(
    const Composition& x_type) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto& slot = cache_[x_type.counts()];
  if (!slot) {
    auto list = std::make_unique<std::vector<JointComposition>>();
    const int k = x_type.alphabet_size();
    visit_joint_compositions(x_type, budget_, [&](std::span<const int> c) {
      list->emplace_back(k, std::vector<int>(c.begin(), c.end()));
    });
    slot = std::move(list);
  }
  // Entries are never erased, so the reference outlives the lock.
  return *slot;
}

std::vector<int> AttackSampler::Sample(std::span<const int> x, Rng& rng) const {
  const int k = d_.alphabet_size();
  if (x.empty()) throw ValidationError("sample_attack_output: empty input");
  const Composition x_type = Composition::Of(x, k);
  const auto& classes = Classes(x_type);
  const JointComposition& chosen = classes[rng.uniform_index(classes.size())];

  std::vector<int> y(x.size());
  std::vector<int> positions;
  std::vector<int> letters;
  for (int a = 0; a < k; ++a) {
    positions.clear();
    for (size_t t = 0; t < x.size(); ++t) {
      if (x[t] == a) positions.push_back(static_cast<int>(t));
    }
    letters.clear();
    for (int b = 0; b < k; ++b) letters.insert(letters.end(), chosen(a, b), b);
    for (size_t i = letters.size(); i > 1; --i) {
      std::swap(letters[i - 1], letters[rng.uniform_index(i)]);
    }
    for (size_t i = 0; i < positions.size(); ++i) y[positions[i]] = letters[i];
  }
  return y;
}

std::vector<int> sample_attack_output(std::span<const int> x,
                                      const DistortionMatrix& d, double delta,
                                      Rng& rng) {
  return AttackSampler(d, delta).Sample(x, rng);
}

}  // namespace advhyp
