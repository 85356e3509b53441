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

#include "advhyp/transport.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace advhyp {
namespace {

struct Cell {
  int row;
  int col;
  double flow;
};

// Nodes 0..rows-1 are supplies, rows..rows+cols-1 are demands.
class BasisTree {
 public:
  BasisTree(int rows, int cols) : rows_(rows), cols_(cols) {}

  // Path of basic-cell indices from demand node `col` to supply node `row`.
  std::vector<int> Path(const std::vector<Cell>& basis, int row, int col) const {
    const int nodes = rows_ + cols_;
    std::vector<std::vector<std::pair<int, int>>> adj(nodes);
    for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
      const int a = basis[e].row;
      const int b = rows_ + basis[e].col;
      adj[a].emplace_back(b, e);
      adj[b].emplace_back(a, e);
    }
    std::vector<int> parent_edge(nodes, -1), parent(nodes, -1);
    std::vector<int> queue{rows_ + col};
    std::vector<bool> seen(nodes, false);
    seen[rows_ + col] = true;
    for (size_t h = 0; h < queue.size(); ++h) {
      const int u = queue[h];
      if (u == row) break;
      for (const auto& [w, e] : adj[u]) {
        if (seen[w]) continue;
        seen[w] = true;
        parent[w] = u;
        parent_edge[w] = e;
        queue.push_back(w);
      }
    }
    if (!seen[row]) throw std::logic_error("transport: basis is not a tree");
    // Walk back from `row` to `col`, then reverse so the path starts at col.
    std::vector<int> path;
    for (int u = row; u != rows_ + col; u = parent[u]) path.push_back(parent_edge[u]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  void Potentials(const std::vector<Cell>& basis, std::span<const double> cost,
                  std::vector<double>& u, std::vector<double>& v) const {
    const int nodes = rows_ + cols_;
    std::vector<std::vector<int>> adj(nodes);
    for (int e = 0; e < static_cast<int>(basis.size()); ++e) {
      adj[basis[e].row].push_back(e);
      adj[rows_ + basis[e].col].push_back(e);
    }
    std::vector<double> pot(nodes, 0.0);
    std::vector<bool> seen(nodes, false);
    std::vector<int> queue{0};
    seen[0] = true;
    for (size_t h = 0; h < queue.size(); ++h) {
      const int node = queue[h];
      for (int e : adj[node]) {
        const int i = basis[e].row;
        const int j = rows_ + basis[e].col;
        const int other = node == i ? j : i;
        if (seen[other]) continue;
        seen[other] = true;
        // u_i + v_j = c_ij
        pot[other] = cost[basis[e].row * cols_ + basis[e].col] - pot[node];
        queue.push_back(other);
      }
    }
    u.assign(pot.begin(), pot.begin() + rows_);
    v.assign(pot.begin() + rows_, pot.end());
  }

 private:
  int rows_;
  int cols_;
};

}  // namespace

RawTransport solve_transport(std::span<const double> supply,
                             std::span<const double> demand,
                             std::span<const double> cost) {
  const int m = static_cast<int>(supply.size());
  const int n = static_cast<int>(demand.size());
  if (m == 0 || n == 0 || cost.size() != static_cast<size_t>(m) * n) {
    throw DimensionError("solve_transport: inconsistent dimensions");
  }
  double cmax = 0.0;
  for (double c : cost) cmax = std::max(cmax, std::abs(c));
  const double tol = 1e-12 * std::max(1.0, cmax);

  // Northwest corner: a staircase of exactly m + n - 1 cells, which is a
  // spanning tree even when some flows are zero.
  std::vector<Cell> basis;
  {
    std::vector<double> s(supply.begin(), supply.end());
    std::vector<double> t(demand.begin(), demand.end());
    int i = 0;
    int j = 0;
    while (true) {
      const double f = std::max(0.0, std::min(s[i], t[j]));
      basis.push_back({i, j, f});
      s[i] -= f;
      t[j] -= f;
      if (i == m - 1 && j == n - 1) break;
      if (i == m - 1) {
        ++j;
      } else if (j == n - 1) {
        ++i;
      } else if (s[i] <= t[j]) {
        ++i;
      } else {
        ++j;
      }
    }
  }

  BasisTree tree(m, n);
  RawTransport out;
  std::vector<double> u, v;
  const int max_iterations = 10000 * (m + n);
  while (true) {
    tree.Potentials(basis, cost, u, v);
    std::vector<bool> is_basic(m * n, false);
    for (const Cell& c : basis) is_basic[c.row * n + c.col] = true;
    int enter = -1;
    for (int idx = 0; idx < m * n; ++idx) {
      if (is_basic[idx]) continue;
      const int i = idx / n;
      const int j = idx % n;
      if (cost[idx] - u[i] - v[j] < -tol) {
        enter = idx;
        break;
      }
    }
    if (enter < 0) break;
    if (++out.diagnostics.iterations > max_iterations) {
      throw std::runtime_error("solve_transport: iteration limit");
    }
    const int ei = enter / n;
    const int ej = enter % n;
    // Entering cell gets +; the tree path from column ej back to row ei
    // alternates -, +, -, ... and ends on a - edge.
    const std::vector<int> path = tree.Path(basis, ei, ej);
    double theta = std::numeric_limits<double>::infinity();
    int leave = -1;
    for (size_t k = 0; k < path.size(); k += 2) {
      const Cell& c = basis[path[k]];
      const int cidx = c.row * n + c.col;
      if (c.flow < theta ||
          (c.flow == theta && cidx < basis[leave].row * n + basis[leave].col)) {
        theta = c.flow;
        leave = path[k];
      }
    }
    for (size_t k = 0; k < path.size(); ++k) {
      basis[path[k]].flow += (k % 2 == 0 ? -theta : theta);
    }
    basis[leave] = {ei, ej, theta};
  }

  out.plan.assign(m * n, 0.0);
  for (const Cell& c : basis) out.plan[c.row * n + c.col] = std::max(0.0, c.flow);
  out.cost = 0.0;
  for (int idx = 0; idx < m * n; ++idx) out.cost += out.plan[idx] * cost[idx];

  // Tighten the column potentials so the dual pair is exactly feasible; the
  // gap against it certifies optimality.
  for (int j = 0; j < n; ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) best = std::min(best, cost[i * n + j] - u[i]);
    v[j] = best;
  }
  double dual = 0.0;
  for (int i = 0; i < m; ++i) dual += supply[i] * u[i];
  for (int j = 0; j < n; ++j) dual += demand[j] * v[j];
  out.diagnostics.dual_gap = out.cost - dual;
  out.row_potential = std::move(u);
  out.col_potential = std::move(v);
  return out;
}

TransportResult emd(const Pmf& p, const Pmf& q, const DistortionMatrix& d) {
  const int k = p.alphabet_size();
  if (q.alphabet_size() != k || d.alphabet_size() != k) {
    throw DimensionError("emd: alphabet sizes differ");
  }
  RawTransport raw = solve_transport(p.probs(), q.probs(), d.values());
  // Renormalize away accumulated rounding so the plan is a valid Coupling.
  double total = 0.0;
  for (double f : raw.plan) total += f;
  for (double& f : raw.plan) f /= total;
  return TransportResult{raw.cost, Coupling(k, std::move(raw.plan)),
                         raw.diagnostics};
}

}  // namespace advhyp
