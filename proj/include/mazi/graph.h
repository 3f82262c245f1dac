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

#ifndef MAZI_GRAPH_H_
#define MAZI_GRAPH_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mazi {

using NodeId = std::int32_t;

struct Neighbor {
  NodeId id;
  double weight;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Undirected weighted graph in compressed adjacency form. Self-loops are kept
// out of the adjacency lists and stored per node; they count twice towards the
// node degree. Immutable once built.
class Graph {
 public:
  Graph() = default;

  NodeId num_nodes() const { return static_cast<NodeId>(self_loop_.size()); }
  // Number of stored undirected non-loop edges.
  std::size_t num_edges() const { return neighbors_.size() / 2; }
  // Sum of all edge weights, each undirected edge once, self-loops included.
  double total_weight() const { return total_weight_; }

  std::span<const Neighbor> neighbors(NodeId v) const {
    return {neighbors_.data() + offsets_[v], neighbors_.data() + offsets_[v + 1]};
  }
  double self_loop_weight(NodeId v) const { return self_loop_[v]; }
  // Weighted degree with the self-loop counted twice; throws on a bad id.
  double degree(NodeId v) const;
  // Weighted degree without the range check.
  double degree_unchecked(NodeId v) const { return degree_[v]; }
  // Weight of edge (u, v), zero when absent. u == v returns the self-loop.
  double edge_weight(NodeId u, NodeId v) const;
  bool has_edge(NodeId u, NodeId v) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  friend class GraphBuilder;

  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> neighbors_;
  std::vector<double> self_loop_;
  std::vector<double> degree_;
  double total_weight_ = 0.0;
};

// Accumulates undirected edges; duplicates are summed.
class GraphBuilder {
 public:
  explicit GraphBuilder(NodeId num_nodes);

  // Throws std::invalid_argument on out-of-range ids or a negative weight.
  // Zero-weight edges are dropped.
  void add_edge(NodeId u, NodeId v, double weight = 1.0);
  Graph build() &&;

 private:
  struct Entry {
    NodeId u;
    NodeId v;
    double weight;
  };
  NodeId num_nodes_;
  std::vector<Entry> entries_;
};

// A graph whose node ids were remapped; original_ids[new_id] = old id.
struct RemappedGraph {
  Graph graph;
  std::vector<std::int64_t> original_ids;
};

// Reads "u v [w]" lines; '#' and '%' start comment lines. Node ids are
// compacted to [0, n) in increasing order of original id.
RemappedGraph load_edgelist(const std::filesystem::path& path, bool weighted);
void save_edgelist(const Graph& g, const std::filesystem::path& path);

// Largest connected component; equal sizes resolve to the component that
// contains the smallest node id. original_ids maps into g's ids.
RemappedGraph largest_connected_component(const Graph& g);

// Subgraph induced by `keep` (must be sorted, unique). Ids are renumbered in
// the order given.
Graph induced_subgraph(const Graph& g, std::span<const NodeId> keep);

// Connected component id per node (ids in order of first appearance).
std::vector<NodeId> connected_components(const Graph& g, NodeId* count = nullptr);

// Writes "original_id new_id" per line.
void save_id_map(std::span<const std::int64_t> original_ids,
                 const std::filesystem::path& path);
std::vector<std::int64_t> load_id_map(const std::filesystem::path& path);

struct NodeLabels {
  std::vector<std::vector<std::int32_t>> labels;  // per node, sorted
  std::int32_t num_labels = 0;
  friend bool operator==(const NodeLabels&, const NodeLabels&) = default;
};

// "node_id label[,label...]" per line. Nodes absent from the file get no
// labels. `original_ids` (optional) translates file ids into graph ids; rows
// for nodes outside the graph are ignored. num_labels = max label + 1.
NodeLabels load_labels(const std::filesystem::path& path, std::int32_t num_nodes,
                       std::span<const std::int64_t> original_ids = {});
void save_labels(const NodeLabels& labels, const std::filesystem::path& path);

}  // namespace mazi

#endif  // MAZI_GRAPH_H_
