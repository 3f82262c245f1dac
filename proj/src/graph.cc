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

#include "mazi/graph.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mazi/text_io.h"

namespace mazi {

double Graph::degree(NodeId v) const {
  if (v < 0 || v >= num_nodes()) {
    throw std::out_of_range("node id " + std::to_string(v) + " out of range");
  }
  return degree_[v];
}

double Graph::edge_weight(NodeId u, NodeId v) const {
  if (u == v) return self_loop_[u];
  auto adj = neighbors(u);
  auto it = std::lower_bound(adj.begin(), adj.end(), v,
                             [](const Neighbor& n, NodeId id) { return n.id < id; });
  return (it != adj.end() && it->id == v) ? it->weight : 0.0;
}

bool Graph::has_edge(NodeId u, NodeId v) const { return edge_weight(u, v) > 0.0; }

GraphBuilder::GraphBuilder(NodeId num_nodes) : num_nodes_(num_nodes) {
  if (num_nodes < 0) throw std::invalid_argument("negative node count");
}

void GraphBuilder::add_edge(NodeId u, NodeId v, double weight) {
  if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_) {
    throw std::invalid_argument("edge endpoint out of range");
  }
  if (!(weight >= 0.0)) throw std::invalid_argument("negative edge weight");
  if (weight == 0.0) return;
  if (u > v) std::swap(u, v);
  entries_.push_back({u, v, weight});
}

Graph GraphBuilder::build() && {
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  });
  // Merge duplicates.
  std::vector<Entry> merged;
  merged.reserve(entries_.size());
  for (const Entry& e : entries_) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  entries_.clear();
  entries_.shrink_to_fit();

  Graph g;
  const auto n = static_cast<std::size_t>(num_nodes_);
  g.self_loop_.assign(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (const Entry& e : merged) {
    if (e.u == e.v) {
      g.self_loop_[e.u] += e.weight;
    } else {
      ++count[e.u];
      ++count[e.v];
    }
    g.total_weight_ += e.weight;
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + count[i];
  g.neighbors_.resize(g.offsets_[n]);
  std::vector<std::size_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
  // Entries are sorted by (u, v), so filling u's list with v and v's list
  // with u in this order keeps every adjacency list sorted.
  for (const Entry& e : merged) {
    if (e.u == e.v) continue;
    g.neighbors_[cursor[e.u]++] = {e.v, e.weight};
  }
  for (const Entry& e : merged) {
    if (e.u == e.v) continue;
    g.neighbors_[cursor[e.v]++] = {e.u, e.weight};
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto first = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]);
    auto last = g.neighbors_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]);
    std::sort(first, last, [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }
  g.degree_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double d = 2.0 * g.self_loop_[i];
    for (const Neighbor& nb : g.neighbors(static_cast<NodeId>(i))) d += nb.weight;
    g.degree_[i] = d;
  }
  return g;
}

RemappedGraph load_edgelist(const std::filesystem::path& path, bool weighted) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edgelist " + path.string());
  struct RawEdge {
    std::int64_t u, v;
    double w;
  };
  std::vector<RawEdge> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#' || fields[0][0] == '%') continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() < 2 || fields.size() > 3) fail("expected 'u v [w]'");
    RawEdge e{};
    if (!parse_number(fields[0], e.u) || !parse_number(fields[1], e.v) || e.u < 0 || e.v < 0) {
      fail("node ids must be nonnegative integers");
    }
    e.w = 1.0;
    if (fields.size() == 3) {
      double w = 0.0;
      if (!parse_number(fields[2], w)) fail("malformed weight");
      if (w < 0.0) fail("negative weight");
      if (weighted) e.w = w;
    }
    raw.push_back(e);
  }
  if (raw.empty()) throw std::runtime_error("edgelist " + path.string() + " has no edges");

  std::vector<std::int64_t> ids;
  ids.reserve(raw.size() * 2);
  for (const RawEdge& e : raw) {
    ids.push_back(e.u);
    ids.push_back(e.v);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  auto compact = [&](std::int64_t id) {
    return static_cast<NodeId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };
  GraphBuilder builder(static_cast<NodeId>(ids.size()));
  for (const RawEdge& e : raw) builder.add_edge(compact(e.u), compact(e.v), e.w);
  return {std::move(builder).build(), std::move(ids)};
}

void save_edgelist(const Graph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  std::string buf;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.self_loop_weight(u) > 0.0) {
      buf.clear();
      buf += std::to_string(u) + ' ' + std::to_string(u) + ' ';
      append_double(buf, g.self_loop_weight(u));
      out << buf << '\n';
    }
    for (const Neighbor& nb : g.neighbors(u)) {
      if (nb.id < u) continue;
      buf.clear();
      buf += std::to_string(u) + ' ' + std::to_string(nb.id) + ' ';
      append_double(buf, nb.weight);
      out << buf << '\n';
    }
  }
}

std::vector<NodeId> connected_components(const Graph& g, NodeId* count) {
  std::vector<NodeId> comp(static_cast<std::size_t>(g.num_nodes()), -1);
  NodeId next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.num_nodes(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId v = stack.back();
      stack.pop_back();
      for (const Neighbor& nb : g.neighbors(v)) {
        if (comp[nb.id] < 0) {
          comp[nb.id] = next;
          stack.push_back(nb.id);
        }
      }
    }
    ++next;
  }
  if (count != nullptr) *count = next;
  return comp;
}

Graph induced_subgraph(const Graph& g, std::span<const NodeId> keep) {
  std::vector<NodeId> new_id(static_cast<std::size_t>(g.num_nodes()), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) new_id[keep[i]] = static_cast<NodeId>(i);
  GraphBuilder builder(static_cast<NodeId>(keep.size()));
  for (NodeId u : keep) {
    if (g.self_loop_weight(u) > 0.0) builder.add_edge(new_id[u], new_id[u], g.self_loop_weight(u));
    for (const Neighbor& nb : g.neighbors(u)) {
      if (nb.id > u && new_id[nb.id] >= 0) builder.add_edge(new_id[u], new_id[nb.id], nb.weight);
    }
  }
  return std::move(builder).build();
}

RemappedGraph largest_connected_component(const Graph& g) {
  if (g.num_nodes() == 0) throw std::invalid_argument("empty graph has no components");
  NodeId count = 0;
  auto comp = connected_components(g, &count);
  std::vector<NodeId> size(static_cast<std::size_t>(count), 0);
  for (NodeId c : comp) ++size[c];
  // Components are numbered by their smallest node, so the first maximum wins
  // ties on the smallest contained id.
  NodeId best = static_cast<NodeId>(std::max_element(size.begin(), size.end()) - size.begin());
  std::vector<NodeId> keep;
  keep.reserve(static_cast<std::size_t>(size[best]));
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (comp[v] == best) keep.push_back(v);
  }
  RemappedGraph result{induced_subgraph(g, keep), {}};
  result.original_ids.assign(keep.begin(), keep.end());
  return result;
}

void save_id_map(std::span<const std::int64_t> original_ids, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < original_ids.size(); ++i) out << original_ids[i] << ' ' << i << '\n';
}

std::vector<std::int64_t> load_id_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open id map " + path.string());
  std::map<std::int64_t, std::int64_t> by_new;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty()) continue;
    std::int64_t orig = 0, fresh = 0;
    if (fields.size() != 2 || !parse_number(fields[0], orig) || !parse_number(fields[1], fresh) ||
        fresh < 0) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": malformed id map line");
    }
    by_new[fresh] = orig;
  }
  std::vector<std::int64_t> ids;
  ids.reserve(by_new.size());
  for (const auto& [fresh, orig] : by_new) {
    if (fresh != static_cast<std::int64_t>(ids.size())) {
      throw std::runtime_error("id map " + path.string() + " is not dense");
    }
    ids.push_back(orig);
  }
  return ids;
}

NodeLabels load_labels(const std::filesystem::path& path, std::int32_t num_nodes,
                       std::span<const std::int64_t> original_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file " + path.string());
  std::map<std::int64_t, NodeId> lookup;
  for (std::size_t i = 0; i < original_ids.size(); ++i) {
    lookup[original_ids[i]] = static_cast<NodeId>(i);
  }
  NodeLabels result;
  result.labels.assign(static_cast<std::size_t>(num_nodes), {});
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = split_fields(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    auto fail = [&](const std::string& why) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + why);
    };
    if (fields.size() != 2) fail("expected 'node label[,label...]'");
    std::int64_t node = 0;
    if (!parse_number(fields[0], node)) fail("malformed node id");
    NodeId v = -1;
    if (original_ids.empty()) {
      if (node < 0 || node >= num_nodes) fail("node id out of range");
      v = static_cast<NodeId>(node);
    } else {
      auto it = lookup.find(node);
      if (it == lookup.end()) continue;
      v = it->second;
    }
    std::string_view rest = fields[1];
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view tok = rest.substr(0, comma);
      std::int32_t label = 0;
      if (!parse_number(tok, label) || label < 0) fail("malformed label");
      result.labels[v].push_back(label);
      result.num_labels = std::max(result.num_labels, label + 1);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    auto& ls = result.labels[v];
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  }
  return result;
}

void save_labels(const NodeLabels& labels, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t v = 0; v < labels.labels.size(); ++v) {
    if (labels.labels[v].empty()) continue;
    out << v << ' ';
    for (std::size_t i = 0; i < labels.labels[v].size(); ++i) {
      if (i > 0) out << ',';
      out << labels.labels[v][i];
    }
    out << '\n';
  }
}

}  // namespace mazi
