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


#include "mazi/synthgen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "mazi/embedding.h"
#include "mazi/random.h"
#include "mazi/text_io.h"

namespace mazi {

std::int64_t TreeSpec::num_leaves() const { return block_size(static_cast<int>(branching.size())); }

std::int64_t TreeSpec::block_size(int j) const {
  std::int64_t size = 1;
  for (int i = 0; i < j; ++i) size *= branching[branching.size() - 1 - static_cast<std::size_t>(i)];
  return size;
}

void TreeSpec::validate() const {
  if (branching.empty()) throw std::invalid_argument("branching must list at least one factor");
  std::int64_t leaves = 1;
  for (int b : branching) {
    if (b < 1) throw std::invalid_argument("branching factors must be positive");
    leaves *= b;
    if (leaves > (std::int64_t{1} << 30)) throw std::invalid_argument("branching: too many leaves");
  }
  if (!(common_ratio > 1.0)) throw std::invalid_argument("common_ratio must be greater than 1");
  if (!(power_law_exponent > 0.0)) throw std::invalid_argument("power_law_exponent must be positive");
  if (!(max_degree >= 1.0)) throw std::invalid_argument("max_degree must be at least 1");
  if (!(degree_shift > -1.0)) throw std::invalid_argument("degree_shift must exceed -1");
  for (int j = 1; j <= static_cast<int>(branching.size()); ++j) {
    if (block_size(j) - block_size(j - 1) < 1) {
      throw std::invalid_argument("infeasible spec: meeting level " + std::to_string(j) +
                                  " has no leaves outside the finer block (branching factor 1)");
    }
  }
}

TreeSpec tree_preset(const std::string& name) {
  TreeSpec spec;
  if (name == "paper-synth") return spec;
  if (name == "figure1") {
    spec.branching = {5, 5, 5, 30};
    spec.common_ratio = 3.0;
    spec.max_degree = 7.5;
    spec.degree_shift = 40.0;
    return spec;
  }
  throw std::invalid_argument("unknown preset '" + name + "' (expected paper-synth or figure1)");
}

std::vector<double> meeting_level_distribution(const TreeSpec& spec) {
  spec.validate();
  const int t = static_cast<int>(spec.branching.size());
  std::vector<double> p(static_cast<std::size_t>(t));
  double sum = 0.0;
  for (int j = 0; j < t; ++j) {
    p[j] = std::pow(spec.common_ratio, -static_cast<double>(j));
    sum += p[j];
  }
  for (double& v : p) v /= sum;
  return p;
}

CommunityAssignment GroundTruth::level_assignment(int j) const {
  std::vector<std::int64_t> raw(paths.size());
  for (std::size_t v = 0; v < paths.size(); ++v) raw[v] = paths[v].at(static_cast<std::size_t>(j));
  return compact_assignment(raw);
}

std::vector<CommunityAssignment> GroundTruth::prior_hierarchy() const {
  std::vector<CommunityAssignment> chain;
  if (paths.empty()) return chain;
  const int depth = static_cast<int>(paths.front().size());
  CommunityAssignment previous = level_assignment(0);
  chain.push_back(previous);
  for (int j = 1; j < depth; ++j) {
    CommunityAssignment next = level_assignment(j);
    // Community c of level j-1 maps to the level-j community of any member.
    std::vector<std::int64_t> up(static_cast<std::size_t>(previous.num_communities), 0);
    for (std::size_t v = 0; v < paths.size(); ++v) up[previous[static_cast<NodeId>(v)]] = next[static_cast<NodeId>(v)];
    chain.push_back(compact_assignment(up));
    previous = std::move(next);
  }
  return chain;
}

SyntheticGraph generate_graph(const TreeSpec& spec) {
  spec.validate();
  const std::int64_t n = spec.num_leaves();
  const int t = static_cast<int>(spec.branching.size());
  const auto cap = static_cast<int>(std::ceil(spec.max_degree));

  std::vector<double> degree_weights(static_cast<std::size_t>(cap));
  for (int k = 1; k <= cap; ++k) {
    degree_weights[k - 1] = std::pow(static_cast<double>(k) + spec.degree_shift, -spec.power_law_exponent);
  }
  const AliasTable degree_table(degree_weights);
  const auto meet = meeting_level_distribution(spec);
  const AliasTable level_table(meet);
  std::vector<std::int64_t> block(static_cast<std::size_t>(t) + 1);
  for (int j = 0; j <= t; ++j) block[j] = spec.block_size(j);

  Rng rng = make_rng(spec.seed, Stream::kGenerate);
  std::vector<std::pair<NodeId, NodeId>> edges;
  double stub_total = 0.0;
  for (std::int64_t v = 0; v < n; ++v) {
    const int stubs = static_cast<int>(degree_table.sample(rng)) + 1;
    stub_total += stubs;
    for (int s = 0; s < stubs; ++s) {
      const int j = static_cast<int>(level_table.sample(rng)) + 1;
      const std::int64_t big = block[j], small = block[j - 1];
      const std::int64_t base = (v / big) * big;
      const std::int64_t own = (v / small) * small - base;
      auto offset = static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(big - small)));
      if (offset >= own) offset += small;
      const std::int64_t u = base + offset;
      edges.emplace_back(static_cast<NodeId>(std::min(u, v)), static_cast<NodeId>(std::max(u, v)));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  GraphBuilder builder(static_cast<NodeId>(n));
  for (auto [a, b] : edges) builder.add_edge(a, b);
  RemappedGraph lcc = largest_connected_component(std::move(builder).build());

  SyntheticGraph out;
  out.graph = std::move(lcc.graph);
  out.mean_stub_degree = stub_total / static_cast<double>(n);
  out.truth.leaf_ids = std::move(lcc.original_ids);
  out.truth.paths.reserve(out.truth.leaf_ids.size());
  for (std::int64_t leaf : out.truth.leaf_ids) {
    std::vector<CommunityId> path(static_cast<std::size_t>(t));
    for (int j = 1; j <= t; ++j) path[j - 1] = static_cast<CommunityId>(leaf / block[j]);
    out.truth.paths.push_back(std::move(path));
  }
  return out;
}

NodeLabels generate_labels(const Graph& g, const GroundTruth& truth, std::uint64_t seed,
                           int repeats) {
  if (truth.paths.size() != static_cast<std::size_t>(g.num_nodes())) {
    throw std::invalid_argument("ground truth does not match the graph");
  }
  if (repeats < 1) throw std::invalid_argument("label repeats must be at least 1");
  const CommunityAssignment finest = truth.level_assignment(0);
  NodeLabels labels;
  labels.num_labels = finest.num_communities;
  labels.labels.resize(static_cast<std::size_t>(g.num_nodes()));
  std::vector<double> weights;
  std::vector<CommunityId> ids;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    auto nbrs = g.neighbors(v);
    if (nbrs.empty()) {
      throw std::invalid_argument("node " + std::to_string(v) + " is isolated; cannot draw a label");
    }
    ids.clear();
    for (const Neighbor& nb : nbrs) ids.push_back(finest[nb.id]);
    std::sort(ids.begin(), ids.end());
    weights.clear();
    std::vector<CommunityId> unique_ids;
    for (std::size_t i = 0; i < ids.size();) {
      std::size_t j = i;
      while (j < ids.size() && ids[j] == ids[i]) ++j;
      unique_ids.push_back(ids[i]);
      weights.push_back(static_cast<double>(j - i));
      i = j;
    }
    const AliasTable table(weights);
    Rng rng = make_rng(seed, Stream::kLabels, {static_cast<std::uint64_t>(v)});
    auto& out = labels.labels[v];
    for (int r = 0; r < repeats; ++r) out.push_back(unique_ids[table.sample(rng)]);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
  }
  return labels;
}

std::vector<SweepRow> modularity_sweep(const std::vector<double>& ratios,
                                       const std::vector<std::uint64_t>& seeds,
                                       const TreeSpec& base) {
  if (seeds.empty()) throw std::invalid_argument("modularity sweep needs at least one seed");
  std::vector<SweepRow> rows;
  for (double ratio : ratios) {
    SweepRow row;
    row.ratio = ratio;
    for (std::uint64_t seed : seeds) {
      TreeSpec spec = base;
      spec.common_ratio = ratio;
      spec.seed = seed;
      auto s = generate_graph(spec);
      row.mean_modularity += modularity(s.graph, s.truth.level_assignment(0));
      row.mean_degree += 2.0 * s.graph.total_weight() / s.graph.num_nodes();
    }
    row.mean_modularity /= static_cast<double>(seeds.size());
    row.mean_degree /= static_cast<double>(seeds.size());
    rows.push_back(row);
  }
  return rows;
}

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t v = 0; v < truth.paths.size(); ++v) {
    out << v;
    for (std::size_t j = 0; j < truth.paths[v].size(); ++j) {
      out << (j == 0 ? ' ' : ',') << truth.paths[v][j];
    }
    out << '\n';
  }
}

GroundTruth load_ground_truth(const std::filesystem::path& path, NodeId num_nodes,
                              std::span<const std::int64_t> original_ids) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::unordered_map<std::int64_t, NodeId> to_graph;
  for (std::size_t i = 0; i < original_ids.size(); ++i) {
    to_graph.emplace(original_ids[i], static_cast<NodeId>(i));
  }
  GroundTruth truth;
  truth.paths.resize(static_cast<std::size_t>(num_nodes));
  std::vector<bool> seen(static_cast<std::size_t>(num_nodes), false);
  std::size_t depth = 0;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    auto fail = [&](const std::string& what) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + what);
    };
    const auto fields = split_fields(line);
    if (fields.empty() || fields[0].front() == '#') continue;
    if (fields.size() != 2) fail("expected \"node_id c1,c2,...\"");
    std::int64_t id = 0;
    if (!parse_number(fields[0], id)) fail("bad node id");
    NodeId v = 0;
    if (original_ids.empty()) {
      if (id < 0 || id >= num_nodes) fail("node id out of range");
      v = static_cast<NodeId>(id);
    } else {
      auto it = to_graph.find(id);
      if (it == to_graph.end()) continue;
      v = it->second;
    }
    if (seen[v]) fail("duplicate node id");
    seen[v] = true;
    std::vector<CommunityId> path_ids;
    std::string_view rest = fields[1];
    while (true) {
      const auto comma = rest.find(',');
      CommunityId c = 0;
      if (!parse_number(rest.substr(0, comma), c) || c < 0) fail("bad community id");
      path_ids.push_back(c);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (depth == 0) depth = path_ids.size();
    if (path_ids.size() != depth) fail("inconsistent path length");
    truth.paths[v] = std::move(path_ids);
  }
  for (NodeId v = 0; v < num_nodes; ++v) {
    if (!seen[v]) {
      throw std::runtime_error(path.string() + ": no ground truth for node " + std::to_string(v));
    }
  }
  return truth;
}

}  // namespace mazi
