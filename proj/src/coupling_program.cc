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

#include "coupling_program.h"

#include <algorithm>

namespace advhyp::internal {

void ProgramBuilder::ColumnMarginal(const Block& b, const Pmf& target) {
  for (int j = 0; j < k_; ++j) {
    solvers::SparseRow row;
    for (int i = 0; i < k_; ++i) row.terms.emplace_back(b.var(i, j), 1.0);
    row.rhs = target[j];
    program_.equalities.push_back(std::move(row));
  }
}

void ProgramBuilder::RowMarginal(const Block& b, const Pmf& target) {
  for (int i = 0; i < k_; ++i) {
    solvers::SparseRow row;
    for (int j = 0; j < k_; ++j) row.terms.emplace_back(b.var(i, j), 1.0);
    row.rhs = target[i];
    program_.equalities.push_back(std::move(row));
  }
}

void ProgramBuilder::SharedColumns(const Block& a, const Block& b) {
  for (int j = 0; j < k_; ++j) {
    solvers::SparseRow row;
    for (int i = 0; i < k_; ++i) {
      row.terms.emplace_back(a.var(i, j), 1.0);
      row.terms.emplace_back(b.var(i, j), -1.0);
    }
    row.rhs = 0.0;
    program_.equalities.push_back(std::move(row));
  }
}

void ProgramBuilder::TotalMass(const Block& b, double mass) {
  solvers::SparseRow row;
  for (int i = 0; i < k_; ++i)
    for (int j = 0; j < k_; ++j) row.terms.emplace_back(b.var(i, j), 1.0);
  row.rhs = mass;
  program_.equalities.push_back(std::move(row));
}

void ProgramBuilder::DistortionAtMost(const Block& b, const DistortionMatrix& d,
                                      double delta) {
  solvers::SparseRow row;
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j < k_; ++j) {
      if (d(i, j) != 0.0) row.terms.emplace_back(b.var(i, j), d(i, j));
    }
  }
  row.rhs = delta;
  program_.inequalities.push_back(std::move(row));
}

solvers::KlTerm ProgramBuilder::RowKl(const Block& b, const Pmf& ref) {
  solvers::KlTerm term;
  for (int i = 0; i < k_; ++i) {
    std::vector<int> group;
    for (int j = 0; j < k_; ++j) group.push_back(b.var(i, j));
    if (ref[i] > 0.0) {
      term.groups.push_back(std::move(group));
      term.reference.push_back(ref[i]);
    } else {
      program_.fixed_zero.insert(program_.fixed_zero.end(), group.begin(), group.end());
    }
  }
  return term;
}

solvers::KlTerm ProgramBuilder::ColumnKl(const Block& b, const Pmf& ref) {
  solvers::KlTerm term;
  for (int j = 0; j < k_; ++j) {
    std::vector<int> group;
    for (int i = 0; i < k_; ++i) group.push_back(b.var(i, j));
    if (ref[j] > 0.0) {
      term.groups.push_back(std::move(group));
      term.reference.push_back(ref[j]);
    } else {
      program_.fixed_zero.insert(program_.fixed_zero.end(), group.begin(), group.end());
    }
  }
  return term;
}

Coupling extract_coupling(const std::vector<double>& x, const Block& b) {
  std::vector<double> joint(b.k * b.k);
  double total = 0.0;
  for (int i = 0; i < b.k; ++i) {
    for (int j = 0; j < b.k; ++j) {
      joint[i * b.k + j] = std::max(0.0, x[b.var(i, j)]);
      total += joint[i * b.k + j];
    }
  }
  for (double& v : joint) v /= total;
  return Coupling(b.k, std::move(joint));
}

}  // namespace advhyp::internal
