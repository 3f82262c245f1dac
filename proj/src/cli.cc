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


#include "mazi/cli.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <type_traits>

#include "mazi/embedding.h"
#include "mazi/mazi.h"
#include "mazi/modularity.h"
#include "mazi/text_io.h"

namespace mazi {
namespace {

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    if constexpr (std::is_floating_point_v<T>) {
      append_double(out, values[i]);
    } else {
      out += std::to_string(values[i]);
    }
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view text) {
  std::vector<std::string> items;
  text = trim(text);
  if (text.empty()) return items;
  while (true) {
    const auto comma = text.find(',');
    items.emplace_back(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return items;
}

std::string join_choices(const std::vector<std::string>& choices) {
  std::string out;
  for (std::size_t i = 0; i < choices.size(); ++i) out += (i > 0 ? ", " : "") + choices[i];
  return out;
}

std::optional<bool> parse_bool(std::string_view s) {
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::vector<KeySpec> build_keys() {
  const MaziConfig m;
  const TreeSpec t;
  const ClassifierOptions c;
  const DecoderOptions d;
  using K = KeyType;
  return {
      {"out", K::kString, "out", "output directory", {}},
      {"seed", K::kInt, "1", "run seed; eval seed i uses seed + i", {}},
      {"seeds", K::kInt, "1", "number of evaluation seeds", {}},
      {"timing", K::kBool, "false", "write wall-clock seconds into the training report", {}},
      {"dataset", K::kString, "", "dataset name in metric rows; empty uses the graph file stem",
       {}},

      {"graph", K::kString, "", "edge list \"u v [w]\"", {}},
      {"weighted", K::kBool, "false", "read a third weight column", {}},
      {"labels", K::kString, "", "label file \"node label[,label...]\"", {}},
      {"ground_truth", K::kString, "",
       "ground-truth community paths; when set, Mazi starts from that hierarchy", {}},
      {"init_partition", K::kString, "", "finest-level partition file in LCC ids", {}},
      {"embeddings", K::kString, "", "evaluate this embedding file instead of training", {}},

      {"preset", K::kChoice, "paper-synth", "generator preset", {"paper-synth", "figure1", "none"}},
      {"branching", K::kIntList, "", "children per tree node, root first; empty uses the preset",
       {}},
      {"common_ratio", K::kString, "", "meeting-level ratio (> 1); empty uses the preset", {}},
      {"power_law_exponent", K::kString, "", "degree exponent; empty uses the preset", {}},
      {"max_degree", K::kString, "", "degree cap; empty uses the preset", {}},
      {"degree_shift", K::kString, "", "degree law shift; empty uses the preset", {}},
      {"label_repeats", K::kInt, "1", "label draws per node (union kept)", {}},

      {"k", K::kInt, "0", "partition command community count; 0 uses floor(sqrt(n))", {}},
      {"partition_balance", K::kDouble, format_double(m.partition_balance),
       "community size cap factor for the initial partition; 0 disables", {}},

      {"mode", K::kChoice, "mazi", "train command model", {"mazi", "baseline"}},
      {"ablation", K::kChoice, "full", "train command ablation", {"full", "no_beta", "no_gamma"}},
      {"dim", K::kInt, std::to_string(m.dim), "embedding dimension", {}},
      {"levels", K::kInt, std::to_string(m.levels), "level count; 0 follows the schedule", {}},
      {"community_counts", K::kIntList, "", "coarse level sizes; empty uses the sqrt rule", {}},
      {"lr", K::kDoubleList, join(m.lr), "per-level learning rate", {}},
      {"epochs", K::kIntList, join(m.epochs), "per-level epochs", {}},
      {"alpha", K::kDoubleList, join(m.alpha), "per-level skip-gram weight", {}},
      {"beta", K::kDoubleList, join(m.beta), "per-level parent proximity weight", {}},
      {"gamma", K::kDoubleList, join(m.gamma), "per-level modularity weight", {}},
      {"window", K::kInt, std::to_string(m.window), "context window", {}},
      {"walk_length", K::kInt, std::to_string(m.walk_length), "walk length", {}},
      {"walks_per_node", K::kInt, std::to_string(m.walks_per_node), "walks per node", {}},
      {"negatives", K::kInt, std::to_string(m.negatives), "negative samples per center", {}},
      {"iterations", K::kInt, std::to_string(m.iterations), "forward/backward rounds", {}},
      {"h_sweeps", K::kInt, std::to_string(m.h_sweeps), "community update sweeps per step", {}},
      {"rebuild_coarse", K::kBool, "true", "rebuild the parent graph after moves", {}},
      {"optimizer", K::kChoice, "sgd", "embedding optimizer", {"sgd", "adam"}},
      {"parallel", K::kBool, "false", "lock-free parallel training (not deterministic)", {}},
      {"threads", K::kInt, std::to_string(m.threads), "worker threads; 0 uses hardware", {}},
      {"flat_epochs", K::kInt, std::to_string(m.flat_epochs), "flat baseline epochs", {}},
      {"flat_lr", K::kDouble, format_double(m.flat_lr), "flat baseline learning rate", {}},
      {"p", K::kDouble, format_double(m.p), "flat baseline return parameter", {}},
      {"q", K::kDouble, format_double(m.q), "flat baseline in-out parameter", {}},

      {"methods", K::kChoiceList, "flat,mazi", "methods trained by eval commands",
       {"flat", "mazi"}},
      {"val_frac", K::kDouble, "0.05", "link prediction validation edge fraction", {}},
      {"test_frac", K::kDouble, "0.1", "link prediction test edge fraction", {}},
      {"lp_negatives", K::kInt, "99", "negatives per held-out edge", {}},
      {"save_split", K::kBool, "false", "write the link prediction training graph", {}},
      {"decoder", K::kChoice, "none", "learned decoder for eval-lp",
       {"none", "dot", "distmult", "mlp2"}},
      {"decoder_hidden", K::kInt, std::to_string(d.hidden), "mlp2 width; 0 uses dim", {}},
      {"decoder_epochs", K::kInt, std::to_string(d.epochs), "decoder epochs", {}},
      {"decoder_lr", K::kDouble, format_double(d.lr), "decoder Adam learning rate", {}},
      {"decoder_eval_every", K::kInt, std::to_string(d.eval_every), "validation interval", {}},
      {"decoder_negatives", K::kInt, "20", "negatives per decoder edge", {}},
      {"decoder_train_frac", K::kDouble, "0.02", "decoder training edge fraction", {}},
      {"decoder_val_frac", K::kDouble, "0.01", "decoder validation edge fraction", {}},
      {"decoder_test_frac", K::kDouble, "0.01", "decoder test edge fraction", {}},
      {"per_class", K::kInt, std::to_string(c.per_class), "training nodes per class", {}},
      {"c_grid", K::kDoubleList, join(c.c_grid), "inverse regularization candidates", {}},
      {"imbalance", K::kBool, "false", "cap per-class training at 75% of the class", {}},
      {"multilabel", K::kBool, "false", "threshold predictions instead of top-1", {}},
      {"nc_max_iter", K::kInt, std::to_string(c.max_iter), "classifier iteration cap", {}},
      {"nc_tol", K::kDouble, format_double(c.tol), "classifier gradient tolerance", {}},

      {"ablation_task", K::kChoice, "nc", "downstream task of ablate", {"nc", "lp"}},
      {"ablation_modes", K::kChoiceList, "full,no_beta,no_gamma", "modes run by ablate",
       {"full", "no_beta", "no_gamma"}},
  };
}

const KeySpec* find_key(std::string_view name) {
  for (const auto& k : config_keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

void check_value(const KeySpec& key, std::string_view value) {
  auto fail = [&](const std::string& expected) {
    throw std::invalid_argument("config key '" + key.name + "': expected " + expected + ", got '" +
                                std::string(value) + "'");
  };
  auto in_choices = [&](std::string_view v) {
    return std::find(key.choices.begin(), key.choices.end(), v) != key.choices.end();
  };
  std::int64_t i = 0;
  double d = 0.0;
  switch (key.type) {
    case KeyType::kString: return;
    case KeyType::kInt:
      if (!parse_number(value, i)) fail("an integer");
      return;
    case KeyType::kDouble:
      if (!parse_number(value, d) || !std::isfinite(d)) fail("a number");
      return;
    case KeyType::kBool:
      if (!parse_bool(value)) fail("true or false");
      return;
    case KeyType::kIntList:
      for (const auto& item : split_list(value)) {
        if (!parse_number(std::string_view(item), i)) fail("a comma-separated integer list");
      }
      return;
    case KeyType::kDoubleList:
      for (const auto& item : split_list(value)) {
        if (!parse_number(std::string_view(item), d) || !std::isfinite(d)) {
          fail("a comma-separated number list");
        }
      }
      return;
    case KeyType::kChoice:
      if (!in_choices(value)) fail("one of " + join_choices(key.choices));
      return;
    case KeyType::kChoiceList:
      for (const auto& item : split_list(value)) {
        if (!in_choices(item)) fail("a list drawn from " + join_choices(key.choices));
      }
      return;
  }
}

}  // namespace

const std::vector<KeySpec>& config_keys() {
  static const std::vector<KeySpec> keys = build_keys();
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : config_keys()) values_[k.name] = k.default_value;
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const KeySpec* spec = find_key(key);
  if (spec == nullptr) throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  value = trim(value);
  check_value(*spec, value);
  values_[spec->name] = std::string(value);
}

void RunConfig::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw std::invalid_argument("override '" + std::string(assignment) + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::vector<std::string> seen;
  std::string line;
  for (int line_no = 1; std::getline(in, line); ++line_no) {
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument(where + "expected key = value");
    const std::string key(trim(text.substr(0, eq)));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw std::invalid_argument(where + "key '" + key + "' repeated");
    }
    seen.push_back(key);
    try {
      set(key, text.substr(eq + 1));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(where + e.what());
    }
  }
}

const std::string& RunConfig::get(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw std::invalid_argument("unknown config key '" + std::string(key) + "'");
  return it->second;
}

std::int64_t RunConfig::get_int(std::string_view key) const {
  std::int64_t v = 0;
  if (!parse_number(std::string_view(get(key)), v)) {
    throw std::invalid_argument("config key '" + std::string(key) + "' is not an integer");
  }
  return v;
}

double RunConfig::get_double(std::string_view key) const {
  double v = 0.0;
  if (!parse_number(std::string_view(get(key)), v)) {
    throw std::invalid_argument("config key '" + std::string(key) + "' is not a number");
  }
  return v;
}

bool RunConfig::get_bool(std::string_view key) const {
  auto b = parse_bool(get(key));
  if (!b) throw std::invalid_argument("config key '" + std::string(key) + "' is not a boolean");
  return *b;
}

std::vector<std::int64_t> RunConfig::get_ints(std::string_view key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(get(key))) {
    std::int64_t v = 0;
    if (!parse_number(std::string_view(item), v)) {
      throw std::invalid_argument("config key '" + std::string(key) + "' has a bad entry");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> RunConfig::get_doubles(std::string_view key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) {
    double v = 0.0;
    if (!parse_number(std::string_view(item), v)) {
      throw std::invalid_argument("config key '" + std::string(key) + "' has a bad entry");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> RunConfig::get_list(std::string_view key) const {
  return split_list(get(key));
}

std::uint64_t RunConfig::seed() const {
  const std::int64_t s = get_int("seed");
  if (s < 0) throw std::invalid_argument("seed must be nonnegative");
  return static_cast<std::uint64_t>(s);
}

std::string RunConfig::to_text() const {
  std::string out;
  for (const auto& k : config_keys()) out += k.name + " = " + get(k.name) + '\n';
  return out;
}

void RunConfig::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << to_text();
}

MaziConfig RunConfig::mazi_config() const {
  MaziConfig m;
  auto nonneg_int = [&](std::string_view key) {
    const std::int64_t v = get_int(key);
    if (v < 0 || v > std::numeric_limits<int>::max()) {
      throw std::invalid_argument("config key '" + std::string(key) + "' out of range");
    }
    return static_cast<int>(v);
  };
  m.dim = static_cast<std::size_t>(nonneg_int("dim"));
  m.levels = nonneg_int("levels");
  for (std::int64_t c : get_ints("community_counts")) {
    if (c < 1 || c > std::numeric_limits<CommunityId>::max()) {
      throw std::invalid_argument("community_counts entries must be positive");
    }
    m.community_counts.push_back(static_cast<CommunityId>(c));
  }
  m.lr = get_doubles("lr");
  m.epochs.clear();
  for (std::int64_t e : get_ints("epochs")) {
    if (e < 0) throw std::invalid_argument("epochs must be nonnegative");
    m.epochs.push_back(static_cast<int>(e));
  }
  m.alpha = get_doubles("alpha");
  m.beta = get_doubles("beta");
  m.gamma = get_doubles("gamma");
  for (const char* key : {"lr", "epochs", "alpha", "beta", "gamma"}) {
    if (get_list(key).empty()) throw std::invalid_argument(std::string(key) + " must not be empty");
  }
  m.window = nonneg_int("window");
  m.walk_length = nonneg_int("walk_length");
  m.walks_per_node = nonneg_int("walks_per_node");
  m.negatives = nonneg_int("negatives");
  m.iterations = nonneg_int("iterations");
  m.h_sweeps = nonneg_int("h_sweeps");
  m.rebuild_coarse = get_bool("rebuild_coarse");
  m.partition_balance = get_double("partition_balance");
  m.optimizer = get("optimizer") == "adam" ? Optimizer::kAdam : Optimizer::kSgd;
  m.parallel = get_bool("parallel");
  m.threads = nonneg_int("threads");
  m.flat_epochs = nonneg_int("flat_epochs");
  m.flat_lr = get_double("flat_lr");
  m.p = get_double("p");
  m.q = get_double("q");
  m.seed = seed();
  m.validate();
  return m;
}

TreeSpec RunConfig::tree_spec() const {
  const std::string& preset = get("preset");
  TreeSpec t;
  if (preset == "none") {
    for (const char* key : {"branching", "common_ratio"}) {
      if (get(key).empty()) {
        throw std::invalid_argument("config key '" + std::string(key) +
                                    "' is required when preset = none");
      }
    }
  } else {
    t = tree_preset(preset);
  }
  if (!get("branching").empty()) {
    t.branching.clear();
    for (std::int64_t b : get_ints("branching")) {
      if (b < 1 || b > std::numeric_limits<int>::max()) {
        throw std::invalid_argument("branching entries must be positive");
      }
      t.branching.push_back(static_cast<int>(b));
    }
  }
  auto number = [&](const char* key, double& field) {
    if (get(key).empty()) return;
    if (!parse_number(std::string_view(get(key)), field) || !std::isfinite(field)) {
      throw std::invalid_argument("config key '" + std::string(key) + "' is not a number");
    }
  };
  number("common_ratio", t.common_ratio);
  number("power_law_exponent", t.power_law_exponent);
  number("max_degree", t.max_degree);
  number("degree_shift", t.degree_shift);
  t.seed = seed();
  t.validate();
  return t;
}

ClassifierOptions RunConfig::classifier_options() const {
  ClassifierOptions c;
  c.per_class = static_cast<int>(get_int("per_class"));
  c.c_grid = get_doubles("c_grid");
  c.imbalance = get_bool("imbalance");
  c.multilabel = get_bool("multilabel");
  c.max_iter = static_cast<int>(get_int("nc_max_iter"));
  c.tol = get_double("nc_tol");
  c.seed = seed();
  if (c.per_class < 1) throw std::invalid_argument("per_class must be at least 1");
  if (c.c_grid.empty()) throw std::invalid_argument("c_grid must not be empty");
  for (double v : c.c_grid) {
    if (!(v > 0.0)) throw std::invalid_argument("c_grid entries must be positive");
  }
  return c;
}

DecoderOptions RunConfig::decoder_options() const {
  DecoderOptions d;
  const std::string& kind = get("decoder");
  d.kind = parse_decoder_kind(kind == "none" ? "distmult" : kind);
  const std::int64_t hidden = get_int("decoder_hidden");
  if (hidden < 0) throw std::invalid_argument("decoder_hidden must be nonnegative");
  d.hidden = static_cast<std::size_t>(hidden);
  d.epochs = static_cast<int>(get_int("decoder_epochs"));
  d.lr = get_double("decoder_lr");
  d.eval_every = static_cast<int>(get_int("decoder_eval_every"));
  d.seed = seed();
  return d;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"generate", "partition", "train",
                                              "eval-lp",  "eval-nc",   "ablate"};
  return names;
}

void write_metrics(const std::vector<MetricRow>& rows, const std::filesystem::path& dir) {
  std::ofstream csv(dir / "metrics.csv");
  std::ofstream txt(dir / "metrics.txt");
  if (!csv || !txt) throw std::runtime_error("cannot write metrics in " + dir.string());
  csv << "method,dataset,seed,metric,value\n";
  for (const auto& r : rows) {
    csv << r.method << ',' << r.dataset << ',' << r.seed << ',' << r.metric << ','
        << format_double(r.value) << '\n';
  }
  // Groups in order of first appearance.
  std::vector<std::pair<std::string, std::string>> groups;
  for (const auto& r : rows) {
    std::pair<std::string, std::string> g{r.method, r.metric};
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
  for (const auto& [method, metric] : groups) {
    std::vector<double> v;
    std::string dataset;
    for (const auto& r : rows) {
      if (r.method == method && r.metric == metric) {
        v.push_back(r.value);
        dataset = r.dataset;
      }
    }
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
    csv << method << ',' << dataset << ",mean," << metric << ',' << format_double(mean) << '\n';
    csv << method << ',' << dataset << ",stddev," << metric << ',' << format_double(sd) << '\n';
    txt << method << '.' << metric << ".mean = " << format_double(mean) << '\n';
    txt << method << '.' << metric << ".stddev = " << format_double(sd) << '\n';
    txt << method << '.' << metric << ".n = " << v.size() << '\n';
  }
}

namespace {

namespace fs = std::filesystem;

struct Input {
  Graph graph;
  std::vector<std::int64_t> original_ids;
  std::string dataset;
};

const std::string& require(const RunConfig& c, std::string_view key) {
  const std::string& v = c.get(key);
  if (v.empty()) throw std::invalid_argument("config key '" + std::string(key) + "' is required");
  return v;
}

Input load_input(const RunConfig& c, const fs::path& out) {
  const fs::path path = require(c, "graph");
  RemappedGraph loaded = load_edgelist(path, c.get_bool("weighted"));
  RemappedGraph lcc = largest_connected_component(loaded.graph);
  Input in;
  in.graph = std::move(lcc.graph);
  in.original_ids.resize(lcc.original_ids.size());
  for (std::size_t i = 0; i < lcc.original_ids.size(); ++i) {
    in.original_ids[i] = loaded.original_ids[static_cast<std::size_t>(lcc.original_ids[i])];
  }
  const NodeId dropped = loaded.graph.num_nodes() - in.graph.num_nodes();
  if (dropped > 0) {
    spdlog::warn("kept the largest connected component: {} of {} nodes ({} dropped)",
                 in.graph.num_nodes(), loaded.graph.num_nodes(), dropped);
  }
  save_id_map(in.original_ids, out / "id_map.txt");
  in.dataset = c.get("dataset").empty() ? path.stem().string() : c.get("dataset");
  spdlog::info("graph {}: {} nodes, {} edges", path.string(), in.graph.num_nodes(),
               in.graph.num_edges());
  return in;
}

std::vector<CommunityAssignment> load_prior(const RunConfig& c, const Input& in) {
  const std::string& truth = c.get("ground_truth");
  const std::string& part = c.get("init_partition");
  if (!truth.empty() && !part.empty()) {
    throw std::invalid_argument("set at most one of ground_truth and init_partition");
  }
  if (!truth.empty()) {
    return load_ground_truth(truth, in.graph.num_nodes(), in.original_ids).prior_hierarchy();
  }
  if (!part.empty()) return {load_partition(part, in.graph.num_nodes())};
  return {};
}

std::vector<std::uint64_t> eval_seeds(const RunConfig& c) {
  const std::int64_t n = c.get_int("seeds");
  if (n < 1) throw std::invalid_argument("seeds must be at least 1");
  std::vector<std::uint64_t> seeds;
  for (std::int64_t i = 0; i < n; ++i) seeds.push_back(c.seed() + static_cast<std::uint64_t>(i));
  return seeds;
}

MaziConfig seeded(const RunConfig& c, std::uint64_t seed) {
  MaziConfig m = c.mazi_config();
  m.seed = seed;
  return m;
}

EmbeddingMatrix given_embeddings(const RunConfig& c, NodeId num_nodes) {
  EmbeddingMatrix x = load_embeddings(c.get("embeddings"));
  if (x.rows() != static_cast<std::size_t>(num_nodes)) {
    throw std::invalid_argument("embedding file has " + std::to_string(x.rows()) +
                                " rows but the graph has " + std::to_string(num_nodes) + " nodes");
  }
  return x;
}

bool wants(const RunConfig& c, const std::string& method) {
  const auto methods = c.get_list("methods");
  return std::find(methods.begin(), methods.end(), method) != methods.end();
}

// Embeddings of each requested method trained on g, flat first.
std::vector<std::pair<std::string, EmbeddingMatrix>> train_methods(
    const RunConfig& c, const Graph& g, const std::vector<CommunityAssignment>& prior,
    std::uint64_t seed) {
  std::vector<std::pair<std::string, EmbeddingMatrix>> out;
  if (!c.get("embeddings").empty()) {
    out.emplace_back("given", given_embeddings(c, g.num_nodes()));
    return out;
  }
  const MaziConfig m = seeded(c, seed);
  EmbeddingMatrix flat = train_flat_baseline(g, m.dim, flat_options(m), seed);
  if (wants(c, "flat")) out.emplace_back("flat", flat);
  if (wants(c, "mazi")) {
    MaziResult r = run_mazi(g, m, std::move(flat), prior);
    out.emplace_back("mazi", std::move(r.hierarchy.levels.front().embeddings));
  }
  if (out.empty()) throw std::invalid_argument("methods must name at least one method");
  return out;
}

void write_report(const fs::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

void cmd_generate(const RunConfig& c, const fs::path& out) {
  const TreeSpec spec = c.tree_spec();
  const SyntheticGraph s = generate_graph(spec);
  const std::int64_t repeats = c.get_int("label_repeats");
  if (repeats < 1) throw std::invalid_argument("label_repeats must be at least 1");
  const NodeLabels labels = generate_labels(s.graph, s.truth, c.seed(), static_cast<int>(repeats));
  save_edgelist(s.graph, out / "graph.edgelist");
  save_labels(labels, out / "labels.txt");
  save_ground_truth(s.truth, out / "ground_truth.txt");

  const NodeId n = s.graph.num_nodes();
  double degree_sum = 0.0, max_degree = 0.0;
  for (NodeId v = 0; v < n; ++v) {
    degree_sum += s.graph.degree(v);
    max_degree = std::max(max_degree, s.graph.degree(v));
  }
  std::vector<std::pair<std::string, std::string>> kv{
      {"nodes", std::to_string(n)},
      {"edges", std::to_string(s.graph.num_edges())},
      {"leaves", std::to_string(spec.num_leaves())},
      {"mean_degree", format_double(degree_sum / n)},
      {"max_degree", format_double(max_degree)},
      {"mean_stub_degree", format_double(s.mean_stub_degree)},
      {"branching", join(spec.branching)},
      {"common_ratio", format_double(spec.common_ratio)},
      {"power_law_exponent", format_double(spec.power_law_exponent)},
      {"degree_cap", format_double(spec.max_degree)},
      {"degree_shift", format_double(spec.degree_shift)},
      {"seed", std::to_string(spec.seed)},
  };
  const int depth = s.truth.paths.empty() ? 0 : static_cast<int>(s.truth.paths.front().size());
  for (int j = 0; j + 1 < depth; ++j) {
    kv.emplace_back("prior_modularity_level" + std::to_string(j + 1),
                    format_double(modularity(s.graph, s.truth.level_assignment(j))));
  }
  write_report(out / "generation_report.txt", kv);
  spdlog::info("generated {} nodes, {} edges, mean degree {:.2f}", n, s.graph.num_edges(),
               degree_sum / n);
}

void cmd_partition(const RunConfig& c, const fs::path& out) {
  const Input in = load_input(c, out);
  const NodeId n = in.graph.num_nodes();
  std::int64_t k = c.get_int("k");
  if (k == 0) {
    const auto schedule = community_schedule(n);
    k = schedule.empty() ? 1 : schedule.front();
  }
  if (k < 1 || k > n) throw std::invalid_argument("k must be in [1, " + std::to_string(n) + "]");
  const CommunityAssignment h =
      initial_partition(in.graph, static_cast<CommunityId>(k), c.get_double("partition_balance"));
  save_partition(h, out / "partition.txt");
  auto sizes = community_sizes(h);
  std::sort(sizes.begin(), sizes.end());
  const double q = modularity(in.graph, h);
  write_report(out / "partition_report.txt",
               {{"nodes", std::to_string(n)},
                {"communities", std::to_string(h.num_communities)},
                {"modularity", format_double(q)},
                {"size_min", std::to_string(sizes.front())},
                {"size_median", std::to_string(sizes[sizes.size() / 2])},
                {"size_max", std::to_string(sizes.back())}});
  spdlog::info("partition into {} communities, Q = {:.4f}", h.num_communities, q);
}

void cmd_train(const RunConfig& c, const fs::path& out) {
  const Input in = load_input(c, out);
  const MaziConfig m = c.mazi_config();
  if (c.get("mode") == "baseline") {
    const EmbeddingMatrix x = train_flat_baseline(in.graph, m.dim, flat_options(m), m.seed);
    save_embeddings(x, out / "level1.emb");
    spdlog::info("flat baseline written to {}", (out / "level1.emb").string());
    return;
  }
  const auto prior = load_prior(c, in);
  const AblationMode mode = parse_ablation_mode(c.get("ablation"));
  const MaziResult r = run_mazi(in.graph, ablation_config(m, mode), std::nullopt, prior);
  save_hierarchy(r.hierarchy, out);
  r.report.save_csv(out / "train_report.csv", c.get_bool("timing"));
  std::string sizes;
  for (const auto& level : r.hierarchy.levels) {
    sizes += (sizes.empty() ? "" : ", ") + std::to_string(level.graph.num_nodes());
  }
  spdlog::info("trained {} levels (sizes {}), {} community moves", r.hierarchy.num_levels(), sizes,
               r.report.total_moves());
}

void cmd_eval_lp(const RunConfig& c, const fs::path& out) {
  const Input in = load_input(c, out);
  const auto prior = load_prior(c, in);
  const std::int64_t negatives = c.get_int("lp_negatives");
  if (negatives < 1) throw std::invalid_argument("lp_negatives must be at least 1");
  const bool use_decoder = c.get("decoder") != "none";
  std::vector<MetricRow> rows;
  for (std::uint64_t seed : eval_seeds(c)) {
    const LinkSplit split = make_link_split(in.graph, c.get_double("val_frac"),
                                           c.get_double("test_frac"), static_cast<int>(negatives),
                                           seed);
    if (c.get_bool("save_split")) {
      save_edgelist(split.train, out / ("lp_train_seed" + std::to_string(seed) + ".edgelist"));
    }
    const DecoderModel dot_model;
    for (const auto& [method, x] : train_methods(c, split.train, prior, seed)) {
      const std::string s = std::to_string(seed);
      rows.push_back({method, in.dataset, s, "map_val", map_score(x, split.val, dot_model)});
      rows.push_back({method, in.dataset, s, "map_test", map_score(x, split.test, dot_model)});
      spdlog::info("seed {} {}: MAP test {:.4f}", seed, method, rows.back().value);
    }
    if (!use_decoder) continue;
    const std::int64_t dneg = c.get_int("decoder_negatives");
    if (dneg < 1) throw std::invalid_argument("decoder_negatives must be at least 1");
    const EdgeSplit dsplit = make_edge_split(
        in.graph,
        {c.get_double("decoder_train_frac"), c.get_double("decoder_val_frac"),
         c.get_double("decoder_test_frac")},
        static_cast<int>(dneg), seed);
    DecoderOptions dopt = c.decoder_options();
    dopt.seed = seed;
    for (const auto& [method, x] : train_methods(c, dsplit.train, prior, seed)) {
      const DecoderFit fit = fit_decoder(x, dsplit, dopt);
      const std::string s = std::to_string(seed);
      const std::string name = std::string("decoder_") + to_string(dopt.kind);
      rows.push_back({method, in.dataset, s, name + "_val_ap", fit.val_ap});
      rows.push_back({method, in.dataset, s, name + "_test_ap", fit.test_ap});
    }
  }
  write_metrics(rows, out);
}

NodeLabels load_input_labels(const RunConfig& c, const Input& in) {
  NodeLabels labels = load_labels(require(c, "labels"), in.graph.num_nodes(), in.original_ids);
  if (labels.num_labels == 0) throw std::invalid_argument("label file has no labels");
  return labels;
}

void cmd_eval_nc(const RunConfig& c, const fs::path& out) {
  const Input in = load_input(c, out);
  const NodeLabels labels = load_input_labels(c, in);
  const auto prior = load_prior(c, in);
  std::vector<MetricRow> rows;
  for (std::uint64_t seed : eval_seeds(c)) {
    ClassifierOptions opt = c.classifier_options();
    opt.seed = seed;
    for (const auto& [method, x] : train_methods(c, in.graph, prior, seed)) {
      const ClassificationResult r = fit_classifier(x, labels, opt);
      const std::string s = std::to_string(seed);
      rows.push_back({method, in.dataset, s, "micro_f1", r.test.micro});
      rows.push_back({method, in.dataset, s, "macro_f1", r.test.macro});
      rows.push_back({method, in.dataset, s, "c", r.model.c});
      spdlog::info("seed {} {}: micro F1 {:.4f}, macro F1 {:.4f} (C = {})", seed, method,
                   r.test.micro, r.test.macro, r.model.c);
    }
  }
  write_metrics(rows, out);
}

void cmd_ablate(const RunConfig& c, const fs::path& out) {
  const Input in = load_input(c, out);
  const auto prior = load_prior(c, in);
  const bool lp = c.get("ablation_task") == "lp";
  NodeLabels labels;
  if (!lp) labels = load_input_labels(c, in);
  const auto modes = c.get_list("ablation_modes");
  if (modes.empty()) throw std::invalid_argument("ablation_modes must not be empty");
  std::vector<MetricRow> rows;
  for (std::uint64_t seed : eval_seeds(c)) {
    const MaziConfig m = seeded(c, seed);
    std::optional<LinkSplit> split;
    if (lp) {
      split = make_link_split(in.graph, c.get_double("val_frac"), c.get_double("test_frac"),
                              static_cast<int>(c.get_int("lp_negatives")), seed);
    }
    const Graph& g = lp ? split->train : in.graph;
    AblationEval eval;
    eval.classifier = c.classifier_options();
    eval.classifier.seed = seed;
    if (lp) {
      eval.link_split = &*split;
    } else {
      eval.labels = &labels;
    }
    const EmbeddingMatrix flat = train_flat_baseline(g, m.dim, flat_options(m), seed);
    for (const auto& name : modes) {
      const AblationMode mode = parse_ablation_mode(name);
      const AblationResult r = ablation_run(g, m, mode, eval, flat, prior);
      const std::string s = std::to_string(seed);
      r.run.report.save_csv(out / ("report_" + name + "_seed" + s + ".csv"), c.get_bool("timing"));
      for (const auto& [metric, value] : r.metrics) {
        rows.push_back({name, in.dataset, s, metric, value});
      }
      rows.push_back({name, in.dataset, s, "total_moves",
                      static_cast<double>(r.run.report.total_moves())});
      spdlog::info("seed {} {}: {} = {:.4f}, {} moves", seed, name, r.metrics[1].first,
                   r.metrics[1].second, r.run.report.total_moves());
    }
  }
  write_metrics(rows, out);
}

}  // namespace

void run_command(std::string_view command, const RunConfig& config) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw std::invalid_argument("unknown command '" + std::string(command) + "'");
  }
  const fs::path out = require(config, "out");
  fs::create_directories(out);
  config.save(out / "config.txt");
  if (command == "generate") {
    cmd_generate(config, out);
  } else if (command == "partition") {
    cmd_partition(config, out);
  } else if (command == "train") {
    cmd_train(config, out);
  } else if (command == "eval-lp") {
    cmd_eval_lp(config, out);
  } else if (command == "eval-nc") {
    cmd_eval_nc(config, out);
  } else {
    cmd_ablate(config, out);
  }
}

}  // namespace mazi
