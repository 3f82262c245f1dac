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


#include "mazi/hierarchy.h"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "mazi/text_io.h"

namespace mazi {

namespace {

template <typename T>
T at_level(const std::vector<T>& values, int l, const char* name) {
  if (values.empty()) throw std::invalid_argument(std::string("empty per-level list ") + name);
  return values[std::min<std::size_t>(static_cast<std::size_t>(l), values.size() - 1)];
}

template <typename T>
void require_nonnegative(const std::vector<T>& values, const char* name) {
  if (values.empty()) throw std::invalid_argument(std::string(name) + " is empty");
  for (T v : values) {
    if (!(v >= T{0})) throw std::invalid_argument(std::string(name) + " must be nonnegative");
  }
}

}  // namespace

double MaziConfig::lr_at(int l) const { return at_level(lr, l, "lr"); }
int MaziConfig::epochs_at(int l) const { return at_level(epochs, l, "epochs"); }
double MaziConfig::alpha_at(int l) const { return at_level(alpha, l, "alpha"); }
double MaziConfig::beta_at(int l) const { return at_level(beta, l, "beta"); }
double MaziConfig::gamma_at(int l) const { return at_level(gamma, l, "gamma"); }

void MaziConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("dim must be at least 1");
  if (levels == 1 || levels < 0) throw std::invalid_argument("levels must be 0 (auto) or >= 2");
  if (walk_length < 2) throw std::invalid_argument("walk_length must be at least 2");
  if (window < 1) throw std::invalid_argument("window must be at least 1");
  if (walks_per_node < 1) throw std::invalid_argument("walks_per_node must be at least 1");
  if (negatives < 0) throw std::invalid_argument("negatives must be nonnegative");
  if (iterations < 0) throw std::invalid_argument("iterations must be nonnegative");
  if (h_sweeps < 0) throw std::invalid_argument("h_sweeps must be nonnegative");
  if (partition_balance != 0.0 && !(partition_balance >= 1.0)) {
    throw std::invalid_argument("partition_balance must be 0 or at least 1");
  }
  if (flat_epochs < 0) throw std::invalid_argument("flat_epochs must be nonnegative");
  if (!(p > 0.0) || !(q > 0.0)) throw std::invalid_argument("p and q must be positive");
  require_nonnegative(lr, "lr");
  require_nonnegative(epochs, "epochs");
  require_nonnegative(alpha, "alpha");
  require_nonnegative(beta, "beta");
  require_nonnegative(gamma, "gamma");
  for (std::size_t i = 0; i < community_counts.size(); ++i) {
    if (community_counts[i] < 1) throw std::invalid_argument("community_counts must be >= 1");
    if (i > 0 && community_counts[i] >= community_counts[i - 1]) {
      throw std::invalid_argument("community_counts must be strictly decreasing");
    }
  }
  if (levels > 0 && !community_counts.empty() &&
      community_counts.size() + 1 != static_cast<std::size_t>(levels)) {
    throw std::invalid_argument("levels disagrees with the length of community_counts");
  }
}

void Hierarchy::check() const {
  if (levels.empty()) throw std::logic_error("hierarchy without levels");
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& s = levels[l];
    if (s.embeddings.rows() != static_cast<std::size_t>(s.graph.num_nodes())) {
      throw std::logic_error("level " + std::to_string(l + 1) + ": embedding rows mismatch");
    }
    if (l + 1 < levels.size()) {
      validate_assignment(s.assignment, s.graph.num_nodes());
      if (s.assignment.num_communities != levels[l + 1].graph.num_nodes()) {
        throw std::logic_error("level " + std::to_string(l + 1) +
                               ": community count differs from next level size");
      }
    }
  }
}

Graph coarsen(const Graph& g, const CommunityAssignment& h) {
  validate_assignment(h, g.num_nodes());
  GraphBuilder b(h.num_communities);
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const double loop = g.self_loop_weight(u);
    if (loop > 0.0) b.add_edge(h[u], h[u], loop);
    for (const Neighbor& nb : g.neighbors(u)) {
      if (nb.id > u) b.add_edge(h[u], h[nb.id], nb.weight);
    }
  }
  return std::move(b).build();
}

EmbeddingMatrix average_up(const EmbeddingMatrix& x_fine, const CommunityAssignment& h) {
  if (x_fine.rows() != h.size()) {
    throw std::invalid_argument("embedding rows do not match the assignment");
  }
  const std::size_t d = x_fine.dim();
  EmbeddingMatrix out(static_cast<std::size_t>(h.num_communities), d);
  std::vector<double> count(static_cast<std::size_t>(h.num_communities), 0.0);
  for (std::size_t v = 0; v < h.size(); ++v) {
    auto dst = out.row(static_cast<std::size_t>(h.membership[v]));
    auto src = x_fine.row(v);
    for (std::size_t t = 0; t < d; ++t) dst[t] += src[t];
    count[h.membership[v]] += 1.0;
  }
  for (std::size_t c = 0; c < out.rows(); ++c) {
    if (count[c] == 0.0) continue;
    for (double& v : out.row(c)) v /= count[c];
  }
  return out;
}

std::vector<CommunityId> community_schedule(NodeId n) {
  std::vector<CommunityId> counts;
  auto current = static_cast<std::int64_t>(n);
  for (;;) {
    const auto next = static_cast<std::int64_t>(std::sqrt(static_cast<double>(current)));
    if (next < 10) {
      counts.push_back(1);
      break;
    }
    counts.push_back(static_cast<CommunityId>(next));
    current = next;
  }
  return counts;
}

std::vector<CommunityId> resolve_schedule(NodeId n, const MaziConfig& config) {
  std::vector<CommunityId> counts = config.community_counts;
  if (counts.empty()) {
    if (config.levels > 0) {
      // Fixed depth: square-root steps, closed by a single community.
      auto current = static_cast<std::int64_t>(n);
      for (int l = 0; l + 2 < config.levels; ++l) {
        current = std::max<std::int64_t>(2, static_cast<std::int64_t>(std::sqrt(static_cast<double>(current))));
        counts.push_back(static_cast<CommunityId>(current));
      }
      counts.push_back(1);
    } else {
      counts = community_schedule(n);
    }
  }
  NodeId previous = n;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 1 || counts[i] >= previous) {
      throw std::invalid_argument("infeasible community schedule: level " + std::to_string(i + 2) +
                                  " asks for " + std::to_string(counts[i]) +
                                  " communities from " + std::to_string(previous) + " nodes");
    }
    previous = counts[i];
  }
  return counts;
}

Hierarchy init_gxh(const Graph& g1, EmbeddingMatrix x1, const MaziConfig& config,
                   const std::vector<CommunityAssignment>& prior) {
  config.validate();
  if (x1.rows() != static_cast<std::size_t>(g1.num_nodes())) {
    throw std::invalid_argument("initial embeddings have " + std::to_string(x1.rows()) +
                                " rows for " + std::to_string(g1.num_nodes()) + " nodes");
  }
  MaziConfig resolved = config;
  if (resolved.community_counts.empty() && !prior.empty()) {
    // Prior levels fix the first counts; the square-root rule continues.
    for (const auto& h : prior) resolved.community_counts.push_back(h.num_communities);
    if (resolved.community_counts.back() > 1) {
      auto tail = community_schedule(resolved.community_counts.back());
      resolved.community_counts.insert(resolved.community_counts.end(), tail.begin(), tail.end());
    }
    if (resolved.levels > 0) {
      resolved.community_counts.resize(static_cast<std::size_t>(resolved.levels - 1));
    }
  }
  resolved.community_counts = resolve_schedule(g1.num_nodes(), resolved);
  resolved.levels = static_cast<int>(resolved.community_counts.size()) + 1;

  Hierarchy hier;
  hier.config = resolved;
  hier.levels.push_back({g1, {}, std::move(x1)});
  for (std::size_t l = 0; l < resolved.community_counts.size(); ++l) {
    LevelState& cur = hier.levels.back();
    const CommunityId k = resolved.community_counts[l];
    CommunityAssignment h;
    if (l < prior.size()) {
      h = prior[l];
      validate_assignment(h, cur.graph.num_nodes());
      if (h.num_communities != k) {
        throw std::invalid_argument("prior partition for level " + std::to_string(l + 1) +
                                    " has " + std::to_string(h.num_communities) +
                                    " communities, schedule expects " + std::to_string(k));
      }
    } else {
      h = initial_partition(cur.graph, k, config.partition_balance);
    }
    LevelState next{coarsen(cur.graph, h), {}, average_up(cur.embeddings, h)};
    cur.assignment = std::move(h);
    hier.levels.push_back(std::move(next));
  }
  hier.check();
  return hier;
}

void save_hierarchy(const Hierarchy& h, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "hierarchy.txt");
  if (!out) throw std::runtime_error("cannot write " + (dir / "hierarchy.txt").string());
  out << "levels " << h.num_levels() << '\n';
  for (int l = 0; l < h.num_levels(); ++l) {
    const auto& s = h.levels[static_cast<std::size_t>(l)];
    const std::string emb = "level" + std::to_string(l + 1) + ".emb";
    save_embeddings(s.embeddings, dir / emb);
    out << "level " << l + 1 << " nodes " << s.graph.num_nodes() << " total_weight "
        << format_double(s.graph.total_weight()) << " embeddings " << emb;
    if (l + 1 < h.num_levels()) {
      const std::string part = "level" + std::to_string(l + 1) + ".part";
      save_partition(s.assignment, dir / part);
      out << " communities " << s.assignment.num_communities << " partition " << part << '\n';
      out << "membership";
      for (CommunityId c : s.assignment.membership) out << ' ' << c;
    }
    out << '\n';
  }
}

}  // namespace mazi
