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


// Synthetic graphs with a planted tree of communities. Leaves are the graph
// nodes, numbered so that every tree community is a contiguous id block.
// Each edge stub of a node picks the level of the lowest common ancestor it
// shares with its partner from a geometric progression, so larger common
// ratios keep more edges inside the finest communities.

#ifndef MAZI_SYNTHGEN_H_
#define MAZI_SYNTHGEN_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mazi/graph.h"
#include "mazi/modularity.h"

namespace mazi {

struct TreeSpec {
  // Children per tree node, root first; the product is the leaf count.
  std::vector<int> branching{5, 5, 5, 75};
  double common_ratio = 1.2;
  double power_law_exponent = 4.5;
  // Largest stub count; fractional caps round up.
  double max_degree = 187.0;
  // P(k) is proportional to (k + degree_shift)^-exponent on k = 1..cap.
  double degree_shift = 45.0;
  std::uint64_t seed = 1;

  // Tree levels including the root and the leaves.
  int levels() const { return static_cast<int>(branching.size()) + 1; }
  std::int64_t num_leaves() const;
  // Leaves under a community whose lowest common ancestor sits j levels
  // above the leaves; block_size(0) == 1.
  std::int64_t block_size(int j) const;
  // Throws std::invalid_argument naming the offending field or level.
  void validate() const;
};

// "paper-synth" (9375 leaves) or "figure1" (3750 leaves, ratio 3).
TreeSpec tree_preset(const std::string& name);

// p(j) for meeting levels j = 1..levels-1, proportional to ratio^-(j-1).
std::vector<double> meeting_level_distribution(const TreeSpec& spec);

struct GroundTruth {
  // Leaf index of every graph node.
  std::vector<std::int64_t> leaf_ids;
  // Per node, the community at each level above the leaves, finest first.
  std::vector<std::vector<CommunityId>> paths;

  // Compacted membership of the graph nodes at path level j (0 = finest).
  CommunityAssignment level_assignment(int j) const;
  // Chain of assignments leaves -> finest communities -> ... -> root.
  std::vector<CommunityAssignment> prior_hierarchy() const;
};

struct SyntheticGraph {
  Graph graph;
  GroundTruth truth;
  // Mean of the sampled stub counts, before merging duplicates.
  double mean_stub_degree = 0.0;
};

// Restricted to the largest connected component.
SyntheticGraph generate_graph(const TreeSpec& spec);

// One label per node drawn from its neighbours' finest communities, weighted
// by neighbour counts. repeats > 1 draws several times and keeps the union.
NodeLabels generate_labels(const Graph& g, const GroundTruth& truth, std::uint64_t seed,
                           int repeats = 1);

struct SweepRow {
  double ratio = 0.0;
  double mean_modularity = 0.0;
  double mean_degree = 0.0;
};
// Mean modularity of the finest planted partition for each ratio.
std::vector<SweepRow> modularity_sweep(const std::vector<double>& ratios,
                                       const std::vector<std::uint64_t>& seeds,
                                       const TreeSpec& base);

// Per node: "node_id c_finest,...,c_root".
void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
// Reads paths only (leaf_ids stay empty). With `original_ids`, file ids are
// translated to graph ids and rows outside the graph are dropped; every
// graph node needs a row.
GroundTruth load_ground_truth(const std::filesystem::path& path, NodeId num_nodes,
                              std::span<const std::int64_t> original_ids = {});

}  // namespace mazi

#endif  // MAZI_SYNTHGEN_H_
