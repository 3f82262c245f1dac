// Copyright 2026 The Mazi Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Graphs and reference computations shared by the unit tests.

#ifndef MAZI_TESTS_FIXTURES_H_
#define MAZI_TESTS_FIXTURES_H_

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "mazi/graph.h"
#include "mazi/modularity.h"

namespace mazi::testing {

inline Graph make_graph(NodeId n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
  GraphBuilder b(n);
  for (auto [u, v] : edges) b.add_edge(u, v);
  return std::move(b).build();
}

inline Graph triangle() { return make_graph(3, {{0, 1}, {1, 2}, {0, 2}}); }

// Triangles {0,1,2} and {3,4,5} joined by the bridge 2-3.
inline Graph two_triangles() {
  return make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}, {2, 3}});
}

inline CommunityAssignment assignment(std::vector<CommunityId> m) {
  CommunityId k = 0;
  for (CommunityId c : m) k = std::max(k, c + 1);
  return {std::move(m), k};
}

// Erdos-Renyi style graph with random positive weights and optional loops.
inline Graph random_graph(std::mt19937_64& rng, NodeId n, double p, bool weighted,
                          bool loops) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GraphBuilder b(n);
  for (NodeId i = 0; i < n; ++i) {
    if (loops && u(rng) < 0.1) b.add_edge(i, i, weighted ? 0.1 + u(rng) : 1.0);
    for (NodeId j = i + 1; j < n; ++j) {
      if (u(rng) < p) b.add_edge(i, j, weighted ? 0.1 + 2.0 * u(rng) : 1.0);
    }
  }
  // A spanning path keeps every node attached.
  for (NodeId i = 0; i + 1 < n; ++i) {
    if (u(rng) < 0.5) b.add_edge(i, i + 1, weighted ? 0.1 + u(rng) : 1.0);
  }
  return std::move(b).build();
}

inline CommunityAssignment random_assignment(std::mt19937_64& rng, NodeId n, CommunityId k) {
  std::vector<CommunityId> m(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) m[v] = v < k ? v : static_cast<CommunityId>(rng() % k);
  std::shuffle(m.begin(), m.end(), rng);
  return {std::move(m), k};
}

// Modularity from the dense adjacency matrix:
// Q = 1/(2m) sum_ij [A_ij - k_i k_j / (2m)] delta(c_i, c_j), with A_ii = 2 * loop.
inline double oracle_modularity(const Graph& g, const std::vector<CommunityId>& h) {
  const NodeId n = g.num_nodes();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (NodeId u = 0; u < n; ++u) {
    a[u * n + u] = 2.0 * g.self_loop_weight(u);
    for (const Neighbor& nb : g.neighbors(u)) a[u * n + nb.id] = nb.weight;
  }
  std::vector<double> k(n, 0.0);
  double two_m = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) k[u] += a[u * n + v];
    two_m += k[u];
  }
  double q = 0.0;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = 0; v < n; ++v) {
      if (h[u] == h[v]) q += a[u * n + v] - k[u] * k[v] / two_m;
    }
  }
  return q / two_m;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("mazi_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace mazi::testing

#endif  // MAZI_TESTS_FIXTURES_H_
