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

#include "mazi/modularity.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "mazi/text_io.h"

namespace mazi {

CommunityAssignment compact_assignment(std::span<const std::int64_t> raw) {
  std::vector<std::int64_t> ids(raw.begin(), raw.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  CommunityAssignment h;
  h.num_communities = static_cast<CommunityId>(ids.size());
  h.membership.reserve(raw.size());
  for (std::int64_t r : raw) {
    if (r < 0) throw std::invalid_argument("negative community id");
    h.membership.push_back(
        static_cast<CommunityId>(std::lower_bound(ids.begin(), ids.end(), r) - ids.begin()));
  }
  return h;
}

void validate_assignment(const CommunityAssignment& h, NodeId num_nodes) {
  if (h.membership.size() != static_cast<std::size_t>(num_nodes)) {
    throw std::invalid_argument("membership has " + std::to_string(h.membership.size()) +
                                " entries for a graph with " + std::to_string(num_nodes) +
                                " nodes");
  }
  std::vector<char> used(static_cast<std::size_t>(std::max<CommunityId>(h.num_communities, 0)), 0);
  for (CommunityId c : h.membership) {
    if (c < 0 || c >= h.num_communities) throw std::invalid_argument("community id out of range");
    used[c] = 1;
  }
  if (std::find(used.begin(), used.end(), 0) != used.end()) {
    throw std::invalid_argument("assignment has an empty community");
  }
}

std::vector<NodeId> community_sizes(const CommunityAssignment& h) {
  std::vector<NodeId> sizes(static_cast<std::size_t>(h.num_communities), 0);
  for (CommunityId c : h.membership) ++sizes[c];
  return sizes;
}

ModularityState build_state(const Graph& g, const CommunityAssignment& h) {
  if (h.membership.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw std::invalid_argument("membership length does not match the graph");
  }
  ModularityState s;
  s.internal_.assign(static_cast<std::size_t>(h.num_communities), 0.0);
  s.external_.assign(static_cast<std::size_t>(h.num_communities), 0.0);
  s.total_weight_ = g.total_weight();
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    const CommunityId cu = h[u];
    s.internal_[cu] += 2.0 * g.self_loop_weight(u);
    for (const Neighbor& nb : g.neighbors(u)) {
      if (h[nb.id] == cu) {
        s.internal_[cu] += nb.weight;
      } else {
        s.external_[cu] += nb.weight;
      }
    }
  }
  s.tracked_sum_ = 0.0;
  if (s.total_weight_ > 0.0) {
    for (std::size_t c = 0; c < s.internal_.size(); ++c) {
      s.tracked_sum_ += s.contribution(s.internal_[c], s.external_[c]);
    }
  }
  return s;
}

double ModularityState::modularity() const {
  if (!(total_weight_ > 0.0)) throw std::domain_error("modularity of a graph without edges");
  double sum = 0.0;
  for (std::size_t c = 0; c < internal_.size(); ++c) sum += contribution(internal_[c], external_[c]);
  return sum / (2.0 * total_weight_);
}

double modularity(const ModularityState& state) { return state.modularity(); }

double modularity(const Graph& g, const CommunityAssignment& h) {
  return build_state(g, h).modularity();
}

double ModularityState::move_delta(CommunityId from, CommunityId to, double degree,
                                   double self_loop, double weight_from,
                                   double weight_to) const {
  if (from == to) return 0.0;
  const double loop2 = 2.0 * self_loop;
  const double outside = degree - loop2;  // non-loop degree of v
  const double id_from = internal_[from] - 2.0 * weight_from - loop2;
  const double ed_from = external_[from] - (outside - weight_from) + weight_from;
  const double id_to = internal_[to] + 2.0 * weight_to + loop2;
  const double ed_to = external_[to] - weight_to + (outside - weight_to);
  const double change = contribution(id_from, ed_from) + contribution(id_to, ed_to) -
                        contribution(internal_[from], external_[from]) -
                        contribution(internal_[to], external_[to]);
  return change / (2.0 * total_weight_);
}

void ModularityState::apply_move(CommunityId from, CommunityId to, double degree,
                                 double self_loop, double weight_from, double weight_to) {
  if (from == to) return;
  const double loop2 = 2.0 * self_loop;
  const double outside = degree - loop2;
  const double before = contribution(internal_[from], external_[from]) +
                        contribution(internal_[to], external_[to]);
  internal_[from] -= 2.0 * weight_from + loop2;
  external_[from] += 2.0 * weight_from - outside;
  internal_[to] += 2.0 * weight_to + loop2;
  external_[to] += outside - 2.0 * weight_to;
  tracked_sum_ += contribution(internal_[from], external_[from]) +
                  contribution(internal_[to], external_[to]) - before;
}

namespace {

// Dense scratch holding one node's edge weight to each adjacent community.
class CommunityLinks {
 public:
  explicit CommunityLinks(CommunityId k) : weight_(static_cast<std::size_t>(k), 0.0),
                                           seen_(static_cast<std::size_t>(k), 0) {}

  void scan(const Graph& g, const CommunityAssignment& h, NodeId v) {
    clear();
    for (const Neighbor& nb : g.neighbors(v)) {
      const CommunityId c = h[nb.id];
      if (!seen_[c]) {
        seen_[c] = 1;
        touched_.push_back(c);
      }
      weight_[c] += nb.weight;
    }
  }
  void clear() {
    for (CommunityId c : touched_) {
      weight_[c] = 0.0;
      seen_[c] = 0;
    }
    touched_.clear();
  }
  double weight(CommunityId c) const { return weight_[c]; }
  const std::vector<CommunityId>& touched() const { return touched_; }

 private:
  std::vector<double> weight_;
  std::vector<char> seen_;
  std::vector<CommunityId> touched_;
};

}  // namespace

double move_score(const Graph& g, const CommunityAssignment& h, const ModularityState& state,
                  const ProximityTerm& proximity, double gamma, NodeId v, CommunityId target) {
  if (v < 0 || v >= g.num_nodes()) throw std::out_of_range("node id out of range");
  if (target < 0 || target >= state.num_communities()) {
    throw std::out_of_range("community id out of range");
  }
  CommunityLinks links(state.num_communities());
  links.scan(g, h, v);
  const double q = state.modularity() +
                   state.move_delta(h[v], target, g.degree_unchecked(v), g.self_loop_weight(v),
                                    links.weight(h[v]), links.weight(target));
  double score = gamma * q;
  if (proximity.active()) score += proximity(v, target);
  return score;
}

RefineResult update_h(const Graph& g, CommunityAssignment h, ModularityState state,
                      const ProximityTerm& proximity, const RefineOptions& options) {
  validate_assignment(h, g.num_nodes());
  if (state.num_communities() != h.num_communities) {
    throw std::invalid_argument("modularity state does not match the assignment");
  }
  RefineResult result;
  if (options.max_sweeps <= 0 || h.num_communities <= 1 || !(g.total_weight() > 0.0)) {
    result.assignment = std::move(h);
    result.state = std::move(state);
    return result;
  }
  auto sizes = community_sizes(h);
  CommunityLinks links(h.num_communities);
  const bool use_proximity = proximity.active();

  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    std::int64_t moved = 0;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
      const CommunityId current = h[v];
      if (sizes[current] == 1) continue;
      links.scan(g, h, v);
      const double degree = g.degree_unchecked(v);
      const double loop = g.self_loop_weight(v);
      const double stay_proximity = use_proximity ? proximity(v, current) : 0.0;
      // Scores are compared as gains over staying put.
      double best_gain = 0.0;
      CommunityId best = current;
      for (CommunityId c : links.touched()) {
        if (c == current) continue;
        double gain = options.gamma * state.move_delta(current, c, degree, loop,
                                                       links.weight(current), links.weight(c));
        if (use_proximity) gain += proximity(v, c) - stay_proximity;
        if (gain > best_gain || (gain == best_gain && best != current && c < best)) {
          best_gain = gain;
          best = c;
        }
      }
      if (best != current) {
        state.apply_move(current, best, degree, loop, links.weight(current), links.weight(best));
        h.membership[v] = best;
        --sizes[current];
        ++sizes[best];
        ++moved;
        if (options.q_trace != nullptr) options.q_trace->push_back(state.tracked_modularity());
      }
    }
    links.clear();
    result.moves += moved;
    result.sweeps = sweep + 1;
    if (moved == 0) break;
  }
  result.assignment = std::move(h);
  result.state = std::move(state);
  return result;
}

namespace {

struct MergeCandidate {
  double gain;
  CommunityId a;  // a < b
  CommunityId b;
};

struct CandidateOrder {
  // Max-heap on gain; equal gains prefer the lexicographically smaller pair.
  bool operator()(const MergeCandidate& x, const MergeCandidate& y) const {
    if (x.gain != y.gain) return x.gain < y.gain;
    if (x.a != y.a) return x.a > y.a;
    return x.b > y.b;
  }
};

}  // namespace

CommunityAssignment initial_partition(const Graph& g, CommunityId k, double balance) {
  const NodeId n = g.num_nodes();
  if (k < 1) throw std::invalid_argument("community count must be at least 1");
  if (k > n) {
    throw std::invalid_argument("community count " + std::to_string(k) + " exceeds node count " +
                                std::to_string(n));
  }
  if (balance != 0.0 && !(balance >= 1.0)) {
    throw std::invalid_argument("partition balance must be 0 (off) or at least 1");
  }
  const double cap = balance > 0.0 ? std::ceil(balance * static_cast<double>(n) / k)
                                   : std::numeric_limits<double>::infinity();
  std::vector<NodeId> size(static_cast<std::size_t>(n), 1);
  const double two_m = 2.0 * g.total_weight();
  std::vector<double> total(static_cast<std::size_t>(n));
  std::vector<std::unordered_map<CommunityId, double>> links(static_cast<std::size_t>(n));
  std::vector<CommunityId> parent(static_cast<std::size_t>(n));
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  for (NodeId v = 0; v < n; ++v) {
    total[v] = g.degree_unchecked(v);
    parent[v] = v;
    for (const Neighbor& nb : g.neighbors(v)) links[v][nb.id] += nb.weight;
  }
  // Q gain of merging a and b joined by total weight w.
  auto gain = [&](double w, CommunityId a, CommunityId b) {
    return 2.0 * (w / two_m - total[a] * total[b] / (two_m * two_m));
  };

  std::priority_queue<MergeCandidate, std::vector<MergeCandidate>, CandidateOrder> heap;
  for (NodeId u = 0; u < n; ++u) {
    for (const Neighbor& nb : g.neighbors(u)) {
      if (nb.id > u) heap.push({gain(nb.weight, u, nb.id), u, nb.id});
    }
  }

  // Gains of a pair only drop when a neighbour grows, unless the pair's
  // connecting weight grew too; such pairs are pushed afresh. Popped entries
  // are re-evaluated and re-queued when stale, which yields the same merge
  // order as an eager greedy.
  NodeId remaining = n;
  while (remaining > k) {
    CommunityId a = -1, b = -1;
    while (!heap.empty()) {
      MergeCandidate top = heap.top();
      heap.pop();
      if (!alive[top.a] || !alive[top.b]) continue;
      // Sizes only grow, so an oversized pair never becomes admissible.
      if (size[top.a] + size[top.b] > cap) continue;
      auto it = links[top.a].find(top.b);
      if (it == links[top.a].end()) continue;
      const double current = gain(it->second, top.a, top.b);
      if (current == top.gain) {
        a = top.a;
        b = top.b;
        break;
      }
      heap.push({current, top.a, top.b});
    }
    if (a < 0) {
      // No admissible connected pair: merge the two smallest communities,
      // by node count under a balance cap, by total degree otherwise.
      auto lighter = [&](NodeId u, NodeId v) {
        if (balance > 0.0 && size[u] != size[v]) return size[u] < size[v];
        return total[u] < total[v];
      };
      for (NodeId v = 0; v < n; ++v) {
        if (!alive[v]) continue;
        if (a < 0 || lighter(v, a)) {
          b = a;
          a = v;
        } else if (b < 0 || lighter(v, b)) {
          b = v;
        }
      }
      if (a > b) std::swap(a, b);
    }
    // The community with more links survives so that fewer entries move.
    CommunityId keep = a, drop = b;
    if (links[b].size() > links[a].size()) std::swap(keep, drop);
    links[keep].erase(drop);
    links[drop].erase(keep);
    total[keep] += total[drop];
    size[keep] += size[drop];
    for (const auto& [c, w] : links[drop]) {
      links[keep][c] += w;
      auto& lc = links[c];
      lc.erase(drop);
      lc[keep] += w;
    }
    for (const auto& [c, w] : links[drop]) {
      const double joined = links[keep][c];
      heap.push({gain(joined, std::min(keep, c), std::max(keep, c)), std::min(keep, c),
                 std::max(keep, c)});
    }
    std::unordered_map<CommunityId, double>().swap(links[drop]);
    alive[drop] = 0;
    parent[drop] = keep;
    --remaining;
  }

  // Resolve each node's surviving representative and number them in order.
  std::vector<std::int64_t> raw(static_cast<std::size_t>(n));
  for (NodeId v = 0; v < n; ++v) {
    CommunityId r = v;
    while (parent[r] != r) r = parent[r];
    CommunityId x = v;
    while (parent[x] != r) {
      CommunityId next = parent[x];
      parent[x] = r;
      x = next;
    }
    raw[v] = r;
  }
  CommunityAssignment h = compact_assignment(raw);
  if (two_m > 0.0 && k > 1) {
    RefineOptions options;
    options.gamma = 1.0;
    options.max_sweeps = 1;
    auto state = build_state(g, h);
    h = update_h(g, std::move(h), std::move(state), ProximityTerm{}, options).assignment;
  }
  return h;
}

CommunityAssignment load_partition(const std::filesystem::path& path, NodeId num_nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open partition file " + path.string());
  std::vector<std::int64_t> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::int64_t c = 0;
    if (fields.size() != 1 || !parse_number(fields[0], c) || c < 0) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected a nonnegative integer community id");
    }
    raw.push_back(c);
  }
  if (raw.size() != static_cast<std::size_t>(num_nodes)) {
    throw std::runtime_error("partition file " + path.string() + " has " +
                             std::to_string(raw.size()) + " entries, graph has " +
                             std::to_string(num_nodes) + " nodes");
  }
  return compact_assignment(raw);
}

void save_partition(const CommunityAssignment& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (CommunityId c : h.membership) out << c << '\n';
}

}  // namespace mazi
