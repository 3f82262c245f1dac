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


#ifndef MAZI_HIERARCHY_H_
#define MAZI_HIERARCHY_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mazi/embedding.h"
#include "mazi/embedding_matrix.h"
#include "mazi/graph.h"
#include "mazi/modularity.h"

namespace mazi {

// Hyperparameters of a hierarchical run. Per-level lists are indexed from
// the finest level; a list shorter than the number of levels repeats its
// last value.
struct MaziConfig {
  std::size_t dim = 128;
  // Total level count including the finest graph; 0 derives it from the
  // community schedule.
  int levels = 0;
  // Community count of each coarser level; empty means the square-root rule.
  std::vector<CommunityId> community_counts;

  std::vector<double> lr{0.02};
  std::vector<int> epochs{1};
  std::vector<double> alpha{1.0};
  std::vector<double> beta{1.0};
  std::vector<double> gamma{1.0};

  int window = 5;
  int walk_length = 20;
  int walks_per_node = 10;
  int negatives = 5;
  int iterations = 1;
  int h_sweeps = 10;
  bool rebuild_coarse = true;
  // Size cap factor for the initial partitioner; 0 leaves merges uncapped.
  double partition_balance = 1.1;
  Optimizer optimizer = Optimizer::kSgd;
  bool parallel = false;
  int threads = 0;

  // Flat skip-gram used to initialize the finest level.
  int flat_epochs = 5;
  double flat_lr = 0.05;
  double p = 1.0;
  double q = 1.0;

  std::uint64_t seed = 1;

  // Level values for 0-based level index `l`.
  double lr_at(int l) const;
  int epochs_at(int l) const;
  double alpha_at(int l) const;
  double beta_at(int l) const;
  double gamma_at(int l) const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct LevelState {
  Graph graph;
  // Maps this level's nodes to the next level's; empty at the top level.
  CommunityAssignment assignment;
  EmbeddingMatrix embeddings;
};

struct Hierarchy {
  std::vector<LevelState> levels;
  MaziConfig config;

  int num_levels() const { return static_cast<int>(levels.size()); }
  // Throws std::logic_error when the levels are inconsistent.
  void check() const;
};

// Collapses each community to one node. Cross-community weight becomes an
// edge, intra-community weight becomes the node's self-loop.
Graph coarsen(const Graph& g, const CommunityAssignment& h);

// Row c is the mean of the rows assigned to community c.
EmbeddingMatrix average_up(const EmbeddingMatrix& x_fine, const CommunityAssignment& h);

// Repeated floor(sqrt(n)); once a count would drop below 10 a single
// all-encompassing community closes the schedule.
std::vector<CommunityId> community_schedule(NodeId n);

// Community counts used for a graph of n nodes under `config`.
std::vector<CommunityId> resolve_schedule(NodeId n, const MaziConfig& config);

// Builds levels 1..L: each assignment comes from `prior` when given for that
// level, otherwise from initial_partition. Coarse embeddings are averages.
Hierarchy init_gxh(const Graph& g1, EmbeddingMatrix x1, const MaziConfig& config,
                   const std::vector<CommunityAssignment>& prior = {});

// Writes level<l>.emb, level<l>.part and hierarchy.txt into `dir`.
void save_hierarchy(const Hierarchy& h, const std::filesystem::path& dir);

}  // namespace mazi

#endif  // MAZI_HIERARCHY_H_
