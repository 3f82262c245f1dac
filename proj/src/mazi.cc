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


#include "mazi/mazi.h"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include "mazi/text_io.h"

namespace mazi {

const char* to_string(Direction d) { return d == Direction::kForward ? "fwd" : "bwd"; }

std::int64_t TrainReport::total_moves() const {
  std::int64_t total = 0;
  for (const auto& r : records) total += r.moves;
  return total;
}

void TrainReport::save_csv(const std::filesystem::path& path, bool timing) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "iter,direction,level,sg_loss,comm_loss,Q,moves,seconds\n";
  for (const auto& r : records) {
    std::string line = std::to_string(r.iteration) + ',' + to_string(r.direction) + ',' +
                       std::to_string(r.level) + ',';
    append_double(line, r.sg_loss);
    line.push_back(',');
    append_double(line, r.comm_loss);
    line.push_back(',');
    append_double(line, r.modularity);
    line += ',' + std::to_string(r.moves) + ',';
    append_double(line, timing ? r.seconds : 0.0);
    out << line << '\n';
  }
}

SkipGramOptions level_options(const MaziConfig& config, int l) {
  SkipGramOptions o;
  o.epochs = config.epochs_at(l);
  o.lr = config.lr_at(l);
  o.alpha = config.alpha_at(l);
  o.window = config.window;
  o.negatives = config.negatives;
  o.walks.walks_per_node = config.walks_per_node;
  o.walks.walk_length = config.walk_length;
  o.optimizer = config.optimizer;
  o.parallel = config.parallel;
  o.threads = config.threads;
  return o;
}

SkipGramOptions flat_options(const MaziConfig& config) {
  SkipGramOptions o = level_options(config, 0);
  o.epochs = config.flat_epochs;
  o.lr = config.flat_lr;
  o.walks.p = config.p;
  o.walks.q = config.q;
  return o;
}

namespace {

double safe_modularity(const ModularityState& s) {
  return s.total_weight() > 0.0 ? s.modularity() : 0.0;
}

class Driver {
 public:
  Driver(Hierarchy& hier, TrainReport& report) : hier_(hier), report_(report) {}

  void update_xh(int iteration, Direction direction, int l) {
    const auto start = std::chrono::steady_clock::now();
    const MaziConfig& cfg = hier_.config;
    auto& levels = hier_.levels;
    LevelState& cur = levels[static_cast<std::size_t>(l)];
    LevelState& parent = levels[static_cast<std::size_t>(l) + 1];

    HierarchyLinks links;
    links.parent_of = &cur.assignment;
    links.parent_x = &parent.embeddings;
    links.parent_beta = cfg.beta_at(l);
    if (l > 0) {
      LevelState& child = levels[static_cast<std::size_t>(l) - 1];
      links.child_assignment = &child.assignment;
      links.child_x = &child.embeddings;
      links.child_beta = cfg.beta_at(l - 1);
    }
    const std::uint64_t call =
        (static_cast<std::uint64_t>(iteration) * 2 + (direction == Direction::kBackward ? 1 : 0)) *
            1024 +
        static_cast<std::uint64_t>(l) + 1;
    auto stats = update_x(cur.graph, cur.embeddings, links, level_options(cfg, l), cfg.seed, call);

    TrainRecord rec;
    rec.iteration = iteration;
    rec.direction = direction;
    rec.level = l + 1;
    if (!stats.empty()) {
      rec.sg_loss = stats.back().sg_loss;
      rec.comm_loss = stats.back().comm_loss;
    }
    ModularityState state = build_state(cur.graph, cur.assignment);
    const double gamma = cfg.gamma_at(l);
    if (gamma != 0.0 && cfg.h_sweeps > 0) {
      RefineOptions opt;
      opt.gamma = gamma;
      opt.max_sweeps = cfg.h_sweeps;
      ProximityTerm prox{&cur.embeddings, &parent.embeddings, cfg.beta_at(l)};
      auto refined = update_h(cur.graph, std::move(cur.assignment), std::move(state), prox, opt);
      cur.assignment = std::move(refined.assignment);
      state = std::move(refined.state);
      rec.moves = refined.moves;
      if (refined.moves > 0 && cfg.rebuild_coarse) {
        parent.graph = coarsen(cur.graph, cur.assignment);
      }
    }
    rec.modularity = safe_modularity(state);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report_.records.push_back(rec);
  }

 private:
  Hierarchy& hier_;
  TrainReport& report_;
};

}  // namespace

MaziResult run_mazi(const Graph& g1, const MaziConfig& config,
                    std::optional<EmbeddingMatrix> init_x,
                    const std::vector<CommunityAssignment>& init_h) {
  config.validate();
  EmbeddingMatrix x1 = init_x ? std::move(*init_x)
                              : train_flat_baseline(g1, config.dim, flat_options(config),
                                                    config.seed);
  if (x1.dim() != config.dim) {
    throw std::invalid_argument("initial embeddings have dimension " + std::to_string(x1.dim()) +
                                ", config asks for " + std::to_string(config.dim));
  }
  MaziResult result;
  result.hierarchy = init_gxh(g1, std::move(x1), config, init_h);
  Hierarchy& hier = result.hierarchy;
  Driver driver(hier, result.report);
  const int top = hier.num_levels() - 1;
  for (int w = 1; w <= hier.config.iterations; ++w) {
    for (int l = 0; l < top; ++l) driver.update_xh(w, Direction::kForward, l);
    for (int l = top - 1; l >= 0; --l) driver.update_xh(w, Direction::kBackward, l);
    // The top level tracks the mean of the level below it.
    auto& below = hier.levels[static_cast<std::size_t>(top) - 1];
    hier.levels[static_cast<std::size_t>(top)].embeddings =
        average_up(below.embeddings, below.assignment);
  }
  hier.check();
  return result;
}

const char* to_string(AblationMode mode) {
  switch (mode) {
    case AblationMode::kFull: return "full";
    case AblationMode::kNoBeta: return "no_beta";
    case AblationMode::kNoGamma: return "no_gamma";
  }
  return "full";
}

AblationMode parse_ablation_mode(const std::string& name) {
  if (name == "full") return AblationMode::kFull;
  if (name == "no_beta") return AblationMode::kNoBeta;
  if (name == "no_gamma") return AblationMode::kNoGamma;
  throw std::invalid_argument("unknown ablation mode '" + name +
                              "' (expected full, no_beta or no_gamma)");
}

MaziConfig ablation_config(const MaziConfig& config, AblationMode mode) {
  MaziConfig c = config;
  if (mode == AblationMode::kNoBeta) c.beta = {0.0};
  if (mode == AblationMode::kNoGamma) c.gamma = {0.0};
  return c;
}

AblationResult ablation_run(const Graph& g1, const MaziConfig& config, AblationMode mode,
                            const AblationEval& eval, std::optional<EmbeddingMatrix> init_x,
                            const std::vector<CommunityAssignment>& init_h) {
  AblationResult out;
  out.mode = mode;
  out.run = run_mazi(g1, ablation_config(config, mode), std::move(init_x), init_h);
  const EmbeddingMatrix& x = out.run.hierarchy.levels.front().embeddings;
  if (eval.labels != nullptr) {
    const ClassificationResult nc = fit_classifier(x, *eval.labels, eval.classifier);
    out.metrics.emplace_back("nc_micro_f1", nc.test.micro);
    out.metrics.emplace_back("nc_macro_f1", nc.test.macro);
    out.metrics.emplace_back("nc_c", nc.model.c);
  }
  if (eval.link_split != nullptr) {
    const DecoderModel dot_model;
    out.metrics.emplace_back("lp_map_val", map_score(x, eval.link_split->val, dot_model));
    out.metrics.emplace_back("lp_map_test", map_score(x, eval.link_split->test, dot_model));
  }
  return out;
}

}  // namespace mazi
