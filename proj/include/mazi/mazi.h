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


// Alternating optimization over the levels of a hierarchy: a forward pass
// from the finest level up, then a backward pass down, each step updating a
// level's embeddings and then its community assignment.

#ifndef MAZI_MAZI_H_
#define MAZI_MAZI_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mazi/eval.h"
#include "mazi/hierarchy.h"

namespace mazi {

enum class Direction { kForward, kBackward };
const char* to_string(Direction d);

struct TrainRecord {
  int iteration = 0;  // 1-based
  Direction direction = Direction::kForward;
  int level = 0;  // 1-based
  double sg_loss = 0.0;
  double comm_loss = 0.0;
  double modularity = 0.0;
  std::int64_t moves = 0;
  double seconds = 0.0;
};

struct TrainReport {
  std::vector<TrainRecord> records;

  std::int64_t total_moves() const;
  // Header "iter,direction,level,sg_loss,comm_loss,Q,moves,seconds".
  // Without timing the seconds column is written as 0.
  void save_csv(const std::filesystem::path& path, bool timing = true) const;
};

struct MaziResult {
  Hierarchy hierarchy;
  TrainReport report;
};

// Skip-gram options for level l (0-based) derived from the config.
SkipGramOptions level_options(const MaziConfig& config, int l);
// Options of the flat initializer / baseline.
SkipGramOptions flat_options(const MaziConfig& config);

// Runs the initialization and `iterations` forward/backward rounds. Without
// init_x the finest level starts from the flat baseline; init_h supplies
// assignments for the first levels (the rest come from initial_partition).
MaziResult run_mazi(const Graph& g1, const MaziConfig& config,
                    std::optional<EmbeddingMatrix> init_x = std::nullopt,
                    const std::vector<CommunityAssignment>& init_h = {});

enum class AblationMode { kFull, kNoBeta, kNoGamma };
const char* to_string(AblationMode mode);
AblationMode parse_ablation_mode(const std::string& name);
// The config with the switched-off weight zeroed at every level.
MaziConfig ablation_config(const MaziConfig& config, AblationMode mode);

// Downstream tasks scored after an ablation run. Link prediction assumes
// the run's graph is link_split->train.
struct AblationEval {
  const NodeLabels* labels = nullptr;
  ClassifierOptions classifier;
  const LinkSplit* link_split = nullptr;
};

struct AblationResult {
  AblationMode mode = AblationMode::kFull;
  MaziResult run;
  // Named metrics in a fixed order: nc_micro_f1, nc_macro_f1, nc_c when
  // labels are given, lp_map_val, lp_map_test with a link split.
  std::vector<std::pair<std::string, double>> metrics;
};

AblationResult ablation_run(const Graph& g1, const MaziConfig& config, AblationMode mode,
                            const AblationEval& eval,
                            std::optional<EmbeddingMatrix> init_x = std::nullopt,
                            const std::vector<CommunityAssignment>& init_h = {});

}  // namespace mazi

#endif  // MAZI_MAZI_H_
