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


// Random-walk corpora and skip-gram training with negative sampling, plus
// the proximity terms tying a level's embeddings to its neighbours in the
// hierarchy.

#ifndef MAZI_EMBEDDING_H_
#define MAZI_EMBEDDING_H_

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mazi/embedding_matrix.h"
#include "mazi/graph.h"
#include "mazi/modularity.h"
#include "mazi/random.h"

namespace mazi {

// Vose alias table: O(1) draws from a fixed discrete distribution.
class AliasTable {
 public:
  AliasTable() = default;
  // Weights must be nonnegative with a positive sum.
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  double probability(std::size_t i) const { return normalized_[i]; }
  std::uint32_t sample(Rng& rng) const {
    const auto column = static_cast<std::uint32_t>(uniform_index(rng, prob_.size()));
    return uniform01(rng) < prob_[column] ? column : alias_[column];
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::vector<double> normalized_;
};

// Negative distribution over nodes, proportional to degree^0.75.
AliasTable negative_table(const Graph& g);

struct WalkOptions {
  int walks_per_node = 10;
  int walk_length = 20;
  // Second-order return (p) and in-out (q) parameters; 1, 1 is first order.
  double p = 1.0;
  double q = 1.0;
};

// Walks stored back to back. Walk i occupies [offsets[i], offsets[i+1]).
struct WalkCorpus {
  std::vector<NodeId> nodes;
  std::vector<std::size_t> offsets{0};

  std::size_t num_walks() const { return offsets.size() - 1; }
  std::span<const NodeId> walk(std::size_t i) const {
    return {nodes.data() + offsets[i], nodes.data() + offsets[i + 1]};
  }
  friend bool operator==(const WalkCorpus&, const WalkCorpus&) = default;
};

// walks_per_node walks from every node, node-major (walk v * r + j starts at
// v). Steps follow edge weights and never take a self-loop; a walk stops
// early at a node without other neighbours. Node v's walks come from their
// own random stream keyed by (seed, call, v).
WalkCorpus random_walks(const Graph& g, const WalkOptions& options, std::uint64_t seed,
                        std::uint64_t call = 0);

// Calls fn(center, context) for every ordered pair of walk positions at
// distance 1..window. Pairs of equal node ids are skipped.
template <typename Fn>
void for_each_context_pair(std::span<const NodeId> walk, int window, Fn&& fn) {
  const auto len = static_cast<std::ptrdiff_t>(walk.size());
  for (std::ptrdiff_t i = 0; i < len; ++i) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - window);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(len - 1, i + window);
    for (std::ptrdiff_t j = lo; j <= hi; ++j) {
      if (j != i && walk[j] != walk[i]) fn(walk[i], walk[j]);
    }
  }
}

std::vector<std::pair<NodeId, NodeId>> contexts_from_walks(const WalkCorpus& corpus, int window);

struct WalkContext {
  NodeId center = 0;
  std::vector<NodeId> positives;
  std::vector<NodeId> negatives;
};

// Skip-gram objective of one context (to be maximized):
//   mean_j log s(x_c . x_j) + alpha * mean_n log s(-x_c . x_n)
// with gradients for the center and for each positive / negative slot.
struct SkipGramGradients {
  double loss = 0.0;
  std::vector<double> center;
  std::vector<std::vector<double>> positives;
  std::vector<std::vector<double>> negatives;
};
SkipGramGradients sg_loss_and_grads(const EmbeddingMatrix& x, const WalkContext& ctx,
                                    double alpha);

// beta * log s(x_level[v] . x_parent[parent]) and its gradient on x_level[v].
struct ProximityGradient {
  double loss = 0.0;
  std::vector<double> gradient;
};
ProximityGradient comm_loss_and_grad(const EmbeddingMatrix& x_level,
                                     const EmbeddingMatrix& x_parent, NodeId v,
                                     CommunityId parent, double beta);

// The fixed neighbours of a level during its X-step. The parent side pulls
// each node towards its community's row one level up (weight parent_beta);
// the child side pulls each node towards the rows of its members one level
// down (weight child_beta). Both matrices are read only.
struct HierarchyLinks {
  const CommunityAssignment* parent_of = nullptr;
  const EmbeddingMatrix* parent_x = nullptr;
  double parent_beta = 0.0;
  const CommunityAssignment* child_assignment = nullptr;
  const EmbeddingMatrix* child_x = nullptr;
  double child_beta = 0.0;
};

enum class Optimizer { kSgd, kAdam };

struct SkipGramOptions {
  int epochs = 1;
  double lr = 0.025;
  double alpha = 1.0;
  int window = 5;
  int negatives = 5;
  WalkOptions walks;
  Optimizer optimizer = Optimizer::kSgd;
  // Lock-free asynchronous updates over `threads` workers; results then
  // depend on scheduling.
  bool parallel = false;
  int threads = 0;
};

// Per-epoch objective averages over all processed centers.
struct EpochStats {
  double sg_loss = 0.0;
  double comm_loss = 0.0;
};

// Generates one walk corpus and runs `epochs` passes of stochastic gradient
// ascent over its contexts in a seeded order. Each center draws `negatives`
// samples. Throws std::runtime_error if the objective becomes non-finite.
std::vector<EpochStats> update_x(const Graph& g, EmbeddingMatrix& x, const HierarchyLinks& links,
                                 const SkipGramOptions& options, std::uint64_t seed,
                                 std::uint64_t call = 0);

// Skip-gram only, from a uniform [-0.5/d, 0.5/d] start.
EmbeddingMatrix train_flat_baseline(const Graph& g, std::size_t dim,
                                    const SkipGramOptions& options, std::uint64_t seed,
                                    std::vector<EpochStats>* stats = nullptr);

// Row-wise cosine similarity helper used by diagnostics and tests.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace mazi

#endif  // MAZI_EMBEDDING_H_
