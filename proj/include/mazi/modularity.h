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

// Modularity bookkeeping and move-based community refinement.
//
// Internal degree of a community is the sum over its members of their
// intra-community degree, so every internal edge contributes twice and a
// self-loop of weight w contributes 2w. With that convention
//
//   Q = 1/(2m) * sum_c ( ID[c] - (ID[c] + ED[c])^2 / (2m) )
//
// is 0 for the single all-encompassing community and -1/2 for a bipartite
// split of a single edge.

#ifndef MAZI_MODULARITY_H_
#define MAZI_MODULARITY_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mazi/embedding_matrix.h"
#include "mazi/graph.h"

namespace mazi {

using CommunityId = std::int32_t;

struct CommunityAssignment {
  std::vector<CommunityId> membership;
  CommunityId num_communities = 0;

  std::size_t size() const { return membership.size(); }
  CommunityId operator[](NodeId v) const { return membership[v]; }

  friend bool operator==(const CommunityAssignment&, const CommunityAssignment&) = default;
};

// Renumbers arbitrary nonnegative ids to [0, k) preserving their order.
CommunityAssignment compact_assignment(std::span<const std::int64_t> raw);
// Throws std::invalid_argument unless `h` has `num_nodes` entries, all in
// [0, k), and every community is nonempty.
void validate_assignment(const CommunityAssignment& h, NodeId num_nodes);
std::vector<NodeId> community_sizes(const CommunityAssignment& h);

class ModularityState {
 public:
  ModularityState() = default;

  std::span<const double> internal_degree() const { return internal_; }
  std::span<const double> external_degree() const { return external_; }
  double total_weight() const { return total_weight_; }
  CommunityId num_communities() const { return static_cast<CommunityId>(internal_.size()); }

  // Modularity recomputed from the ID/ED arrays.
  double modularity() const;
  // Modularity tracked incrementally through apply_move; agrees with
  // modularity() up to rounding.
  double tracked_modularity() const { return tracked_sum_ / (2.0 * total_weight_); }

  // Change in Q when node v (weighted degree `degree`, self-loop weight
  // `self_loop`) moves from `from` to `to`, where `weight_from` / `weight_to`
  // are the weights of v's non-loop edges into each community (v excluded).
  double move_delta(CommunityId from, CommunityId to, double degree, double self_loop,
                    double weight_from, double weight_to) const;
  void apply_move(CommunityId from, CommunityId to, double degree, double self_loop,
                  double weight_from, double weight_to);

  friend ModularityState build_state(const Graph& g, const CommunityAssignment& h);

 private:
  double contribution(double internal, double external) const {
    const double total = internal + external;
    return internal - total * total / (2.0 * total_weight_);
  }

  std::vector<double> internal_;
  std::vector<double> external_;
  double total_weight_ = 0.0;
  double tracked_sum_ = 0.0;
};

// One pass over the edges. Throws on a membership length mismatch.
ModularityState build_state(const Graph& g, const CommunityAssignment& h);
// Throws std::domain_error when the graph has no edge weight.
double modularity(const ModularityState& state);
double modularity(const Graph& g, const CommunityAssignment& h);

// Optional embedding term of the move score: beta * log sigmoid(x_level[v] .
// x_parent[c]). Inactive when beta == 0 or either matrix is missing.
struct ProximityTerm {
  const EmbeddingMatrix* level = nullptr;
  const EmbeddingMatrix* parent = nullptr;
  double beta = 0.0;

  bool active() const { return beta != 0.0 && level != nullptr && parent != nullptr; }
  double operator()(NodeId v, CommunityId c) const {
    return beta * log_sigmoid(dot(level->row(static_cast<std::size_t>(v)),
                                  parent->row(static_cast<std::size_t>(c))));
  }
};

// gamma * Q(after moving v to target) + proximity(v, target). Pure: the state
// is not touched. Targeting v's own community scores the current assignment.
double move_score(const Graph& g, const CommunityAssignment& h, const ModularityState& state,
                  const ProximityTerm& proximity, double gamma, NodeId v, CommunityId target);

struct RefineOptions {
  double gamma = 1.0;
  int max_sweeps = 10;
  // When set, receives the tracked Q after every applied move.
  std::vector<double>* q_trace = nullptr;
};

struct RefineResult {
  CommunityAssignment assignment;
  ModularityState state;
  std::int64_t moves = 0;
  int sweeps = 0;
};

// Sweeps nodes in id order; each node moves to the best-scoring community
// among its current one and those adjacent to it, if that strictly beats
// staying. Ties go to the smallest community id; a move that would empty a
// community is skipped. Stops after max_sweeps or a sweep without moves.
RefineResult update_h(const Graph& g, CommunityAssignment h, ModularityState state,
                      const ProximityTerm& proximity, const RefineOptions& options);

// Greedy modularity agglomeration from singletons down to exactly k
// communities, followed by one refinement sweep (gamma = 1, no embedding
// term). Deterministic: the largest gain merges first, ties by the smallest
// (id, id) pair. If no connected pair is left, the two communities with the
// smallest total degree merge.
//
// A positive `balance` caps every community at ceil(balance * n / k) nodes:
// merges beyond the cap are skipped, and when no admissible connected pair
// remains the two communities with the fewest nodes merge. 0 disables it.
CommunityAssignment initial_partition(const Graph& g, CommunityId k, double balance = 0.0);

// One community id per line, line i for node i; ids compacted on load.
CommunityAssignment load_partition(const std::filesystem::path& path, NodeId num_nodes);
void save_partition(const CommunityAssignment& h, const std::filesystem::path& path);

}  // namespace mazi

#endif  // MAZI_MODULARITY_H_
