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

#ifndef ADVHYP_TRANSPORT_H_
#define ADVHYP_TRANSPORT_H_

#include <span>
#include <vector>

#include "advhyp/simplex.h"

namespace advhyp {

struct TransportDiagnostics {
  int iterations = 0;
  // primal cost minus the value of a dual-feasible potential pair.
  double dual_gap = 0.0;
};

struct TransportResult {
  double cost = 0.0;
  Coupling plan;
  TransportDiagnostics diagnostics;
};

// Earth Mover Distance: min sum plan(i,j) d(i,j) over couplings with X
// marginal p (rows) and Y marginal q (columns).
TransportResult emd(const Pmf& p, const Pmf& q, const DistortionMatrix& d);

// Transportation simplex on raw data; supplies and demands need only have
// equal totals. With integer-valued inputs below 2^53 every pivot is exact, so
// the returned cost is the exact integer optimum.
struct RawTransport {
  double cost = 0.0;
  std::vector<double> plan;  // rows x cols, row-major
  std::vector<double> row_potential;
  std::vector<double> col_potential;
  TransportDiagnostics diagnostics;
};

RawTransport solve_transport(std::span<const double> supply,
                             std::span<const double> demand,
                             std::span<const double> cost);

}  // namespace advhyp

#endif  // ADVHYP_TRANSPORT_H_
