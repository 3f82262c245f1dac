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


#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.h"
#include "mazi/mazi.h"
#include "mazi/synthgen.h"

using namespace mazi;
using mazi::testing::assignment;

namespace {

MaziConfig small_config() {
  MaziConfig c;
  c.dim = 8;
  c.walks_per_node = 4;
  c.walk_length = 8;
  c.window = 2;
  c.negatives = 2;
  c.flat_epochs = 2;
  c.lr = {0.05};
  return c;
}

// Two 40-node blocks sparsely joined, plus a ring to keep them connected.
Graph two_blocks(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GraphBuilder b(80);
  for (NodeId i = 0; i < 80; ++i) {
    b.add_edge(i, (i + 1) % 80);
    for (NodeId j = i + 1; j < 80; ++j) {
      if (u(rng) < ((i < 40) == (j < 40) ? 0.15 : 0.01)) b.add_edge(i, j);
    }
  }
  return std::move(b).build();
}

}  // namespace

TEST_CASE("zero iterations return the initialization") {
  auto g = two_blocks(1);
  auto c = small_config();
  c.iterations = 0;
  auto x = train_flat_baseline(g, c.dim, flat_options(c), c.seed);
  auto r = run_mazi(g, c);
  CHECK(r.report.records.empty());
  auto h = init_gxh(g, x, c);
  REQUIRE(r.hierarchy.num_levels() == h.num_levels());
  for (int l = 0; l < h.num_levels(); ++l) {
    CHECK(r.hierarchy.levels[l].embeddings == h.levels[l].embeddings);
    CHECK(r.hierarchy.levels[l].assignment == h.levels[l].assignment);
    CHECK(r.hierarchy.levels[l].graph == h.levels[l].graph);
  }
}

TEST_CASE("level order contract") {
  auto g = two_blocks(2);
  auto c = small_config();
  c.community_counts = {8, 3, 1};
  c.iterations = 2;
  auto r = run_mazi(g, c);
  REQUIRE(r.hierarchy.num_levels() == 4);
  std::vector<std::pair<Direction, int>> expected;
  for (int w = 0; w < 2; ++w) {
    for (int l = 1; l <= 3; ++l) expected.emplace_back(Direction::kForward, l);
    for (int l = 3; l >= 1; --l) expected.emplace_back(Direction::kBackward, l);
  }
  REQUIRE(r.report.records.size() == expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    CHECK(r.report.records[i].direction == expected[i].first);
    CHECK(r.report.records[i].level == expected[i].second);
    CHECK(r.report.records[i].iteration == static_cast<int>(i / 6) + 1);
  }
  // The top level is the mean of the level below after the run.
  const auto& levels = r.hierarchy.levels;
  CHECK(levels[3].embeddings == average_up(levels[2].embeddings, levels[2].assignment));
}

TEST_CASE("gamma zero freezes the community structure") {
  auto g = two_blocks(3);
  auto c = small_config();
  c.gamma = {0.0};
  c.iterations = 2;
  auto x = train_flat_baseline(g, c.dim, flat_options(c), c.seed);
  auto before = init_gxh(g, x, c);
  auto r = run_mazi(g, c, x);
  CHECK(r.report.total_moves() == 0);
  for (int l = 0; l < before.num_levels(); ++l) {
    CHECK(r.hierarchy.levels[l].assignment == before.levels[l].assignment);
    CHECK(r.hierarchy.levels[l].graph == before.levels[l].graph);
  }
}

TEST_CASE("a misassigned bridge node is moved home") {
  auto g = testing::two_triangles();
  auto c = small_config();
  c.levels = 2;
  c.beta = {0.0};
  c.gamma = {1.0};
  auto r = run_mazi(g, c, std::nullopt, {assignment({0, 0, 1, 1, 1, 1})});
  REQUIRE(r.hierarchy.num_levels() == 2);
  CHECK(r.hierarchy.levels[0].assignment == assignment({0, 0, 0, 1, 1, 1}));
  CHECK(r.report.total_moves() >= 1);
  // The parent graph follows the new communities.
  CHECK(r.hierarchy.levels[1].graph == coarsen(g, assignment({0, 0, 0, 1, 1, 1})));
}

TEST_CASE("property: with beta zero each level's modularity never drops") {
  for (std::uint64_t seed : {4, 5, 6}) {
    auto g = two_blocks(seed);
    for (bool rebuild : {false, true}) {
      auto c = small_config();
      c.beta = {0.0};
      c.community_counts = {12, 3, 1};
      c.iterations = 3;
      c.rebuild_coarse = rebuild;
      c.seed = seed;
      c.partition_balance = 0.0;
      std::mt19937_64 rng(seed);
      std::vector<CommunityAssignment> init{testing::random_assignment(rng, 80, 12)};
      auto r = run_mazi(g, c, std::nullopt, init);
      std::map<int, double> last;
      for (const auto& rec : r.report.records) {
        if (last.count(rec.level)) CHECK(rec.modularity >= last[rec.level] - 1e-12);
        last[rec.level] = rec.modularity;
      }
      CHECK(r.report.total_moves() > 0);
    }
  }
}

TEST_CASE("sequential runs are bit-identical") {
  auto g = two_blocks(7);
  auto c = small_config();
  c.iterations = 2;
  auto a = run_mazi(g, c);
  auto b = run_mazi(g, c);
  REQUIRE(a.hierarchy.num_levels() == b.hierarchy.num_levels());
  for (int l = 0; l < a.hierarchy.num_levels(); ++l) {
    CHECK(a.hierarchy.levels[l].embeddings == b.hierarchy.levels[l].embeddings);
    CHECK(a.hierarchy.levels[l].assignment == b.hierarchy.levels[l].assignment);
    CHECK(a.hierarchy.levels[l].graph == b.hierarchy.levels[l].graph);
  }
  c.seed = 2;
  auto d = run_mazi(g, c);
  CHECK_FALSE(d.hierarchy.levels[0].embeddings == a.hierarchy.levels[0].embeddings);
}

TEST_CASE("ablation modes") {
  CHECK(parse_ablation_mode("no_beta") == AblationMode::kNoBeta);
  CHECK(std::string(to_string(AblationMode::kNoGamma)) == "no_gamma");
  CHECK_THROWS_AS(parse_ablation_mode("none"), std::invalid_argument);

  auto g = two_blocks(8);
  auto c = small_config();
  c.iterations = 2;
  NodeLabels labels;
  labels.num_labels = 2;
  for (NodeId v = 0; v < 80; ++v) labels.labels.push_back({v < 40 ? 0 : 1});
  AblationEval eval;
  eval.labels = &labels;
  eval.classifier.per_class = 5;

  auto nb = ablation_run(g, c, AblationMode::kNoBeta, eval);
  for (const auto& rec : nb.run.report.records) CHECK(rec.comm_loss == 0.0);
  auto ng = ablation_run(g, c, AblationMode::kNoGamma, eval);
  CHECK(ng.run.report.total_moves() == 0);
  auto full = ablation_run(g, c, AblationMode::kFull, eval);
  REQUIRE(full.metrics.size() == 3);
  CHECK(full.metrics[0].first == "nc_micro_f1");
  CHECK(full.metrics[1].first == "nc_macro_f1");
  for (const auto& [name, value] : full.metrics) CHECK(std::isfinite(value));

  auto split = make_link_split(g, 0.05, 0.1, 20, 1);
  AblationEval lp;
  lp.link_split = &split;
  auto r = ablation_run(split.train, c, AblationMode::kFull, lp);
  REQUIRE(r.metrics.size() == 2);
  CHECK(r.metrics[1].first == "lp_map_test");
  CHECK(r.metrics[1].second > 0.0);
  CHECK(r.metrics[1].second <= 1.0);
}

TEST_CASE("training report csv") {
  TrainReport rep;
  rep.records.push_back({1, Direction::kForward, 1, -1.5, -0.25, 0.5, 3, 2.5});
  rep.records.push_back({1, Direction::kBackward, 1, -1.0, 0.0, 0.25, 0, 1.0});
  auto dir = testing::scratch_dir("report");
  rep.save_csv(dir / "a.csv");
  rep.save_csv(dir / "b.csv", false);
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  };
  CHECK(slurp(dir / "a.csv") ==
        "iter,direction,level,sg_loss,comm_loss,Q,moves,seconds\n"
        "1,fwd,1,-1.5,-0.25,0.5,3,2.5\n"
        "1,bwd,1,-1,0,0.25,0,1\n");
  CHECK(slurp(dir / "b.csv") ==
        "iter,direction,level,sg_loss,comm_loss,Q,moves,seconds\n"
        "1,fwd,1,-1.5,-0.25,0.5,3,0\n"
        "1,bwd,1,-1,0,0.25,0,0\n");
  CHECK(rep.total_moves() == 3);
}

TEST_CASE("run_mazi rejects mismatched inputs") {
  auto g = testing::two_triangles();
  auto c = small_config();
  CHECK_THROWS_AS(run_mazi(g, c, EmbeddingMatrix(6, 3)), std::invalid_argument);
  CHECK_THROWS_AS(run_mazi(g, c, EmbeddingMatrix(5, 8)), std::invalid_argument);
}
