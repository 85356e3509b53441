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

// Helpers for assembling convex programs over one or more K x K coupling
// blocks laid out consecutively in the variable vector.

#ifndef ADVHYP_SRC_COUPLING_PROGRAM_H_
#define ADVHYP_SRC_COUPLING_PROGRAM_H_

#include <vector>

#include "advhyp/simplex.h"
#include "advhyp/solvers/barrier.h"

namespace advhyp::internal {

struct Block {
  int offset = 0;
  int k = 0;
  int var(int i, int j) const { return offset + i * k + j; }
};

class ProgramBuilder {
 public:
  explicit ProgramBuilder(int k) : k_(k) {}

  Block AddBlock() {
    Block b{program_.num_vars, k_};
    program_.num_vars += k_ * k_;
    return b;
  }
  int AddFreeVar() {
    const int v = program_.num_vars++;
    free_.resize(program_.num_vars, false);
    free_[v] = true;
    return v;
  }

  // Column sums of `b` equal `target`.
  void ColumnMarginal(const Block& b, const Pmf& target);
  // Row sums of `b` equal `target`.
  void RowMarginal(const Block& b, const Pmf& target);
  // Column sums of a and b agree; both must carry total mass 1 elsewhere.
  void SharedColumns(const Block& a, const Block& b);
  void TotalMass(const Block& b, double mass);
  // sum b(i,j) d(i,j) <= delta
  void DistortionAtMost(const Block& b, const DistortionMatrix& d, double delta);

  // KL of the row (x) marginal of b against ref; zero-reference rows are
  // pinned at zero. Same for the column (y) marginal.
  solvers::KlTerm RowKl(const Block& b, const Pmf& ref);
  solvers::KlTerm ColumnKl(const Block& b, const Pmf& ref);

  solvers::ConvexProgram& program() { return program_; }
  solvers::ConvexProgram Finish() {
    free_.resize(program_.num_vars, false);
    program_.free = free_;
    return program_;
  }

 private:
  int k_;
  solvers::ConvexProgram program_;
  std::vector<bool> free_;
};

// Row and column marginals and the Coupling of a block in a solution,
// cleaned of tiny negative rounding and renormalized to mass one.
Coupling extract_coupling(const std::vector<double>& x, const Block& b);

}  // namespace advhyp::internal

#endif  // ADVHYP_SRC_COUPLING_PROGRAM_H_
