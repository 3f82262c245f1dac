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


#include <random>

#include "doctest.h"
#include "fixtures.h"
#include "mazi/modularity.h"
#include "mazi/synthgen.h"

namespace mazi {
namespace {

using testing::assignment;
using testing::oracle_modularity;
using testing::two_triangles;

TEST_CASE("build_state on small fixtures") {
  auto tri = testing::triangle();
  auto s = build_state(tri, assignment({0, 0, 0}));
  CHECK(s.internal_degree()[0] == 6.0);
  CHECK(s.external_degree()[0] == 0.0);

  auto edge = testing::make_graph(2, {{0, 1}});
  auto e = build_state(edge, assignment({0, 1}));
  CHECK(e.internal_degree()[0] == 0.0);
  CHECK(e.internal_degree()[1] == 0.0);
  CHECK(e.external_degree()[0] == 1.0);
  CHECK(e.external_degree()[1] == 1.0);

  auto tt = build_state(two_triangles(), assignment({0, 0, 0, 1, 1, 1}));
  CHECK(tt.internal_degree()[0] == 6.0);
  CHECK(tt.internal_degree()[1] == 6.0);
  CHECK(tt.external_degree()[0] == 1.0);
  CHECK(tt.external_degree()[1] == 1.0);

  CHECK_THROWS_AS(build_state(tri, assignment({0, 0})), std::invalid_argument);
}

TEST_CASE("modularity reference values") {
  auto g = two_triangles();
  CHECK(modularity(g, assignment({0, 0, 0, 0, 0, 0})) == 0.0);
  CHECK(modularity(testing::make_graph(2, {{0, 1}}), assignment({0, 1})) == -0.5);
  const std::vector<CommunityId> tri{0, 0, 0, 1, 1, 1};
  CHECK(modularity(g, assignment(tri)) == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
  CHECK(oracle_modularity(g, tri) == doctest::Approx(5.0 / 14.0).epsilon(1e-12));

  GraphBuilder empty(3);
  CHECK_THROWS_AS(modularity(std::move(empty).build(), assignment({0, 1, 2})),
                  std::domain_error);
}

TEST_CASE("move_score") {
  auto g = two_triangles();
  SUBCASE("beta 0, gamma 1 gives the modularity after the move") {
    auto h = assignment({0, 0, 0, 1, 1, 1});
    auto state = build_state(g, h);
    for (NodeId v = 0; v < 6; ++v) {
      for (CommunityId c = 0; c < 2; ++c) {
        auto moved = h.membership;
        moved[v] = c;
        CHECK(move_score(g, h, state, {}, 1.0, v, c) ==
              doctest::Approx(oracle_modularity(g, moved)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("gamma 0, beta 1 with zero vectors gives log 0.5") {
    EmbeddingMatrix level(6, 4), parent(2, 4);
    auto h = assignment({0, 0, 0, 1, 1, 1});
    auto state = build_state(g, h);
    ProximityTerm prox{&level, &parent, 1.0};
    CHECK(move_score(g, h, state, prox, 0.0, 2, 1) == doctest::Approx(std::log(0.5)));
  }
  SUBCASE("misassigned bridge endpoint prefers its home triangle") {
    const std::vector<CommunityId> wrong{0, 0, 1, 1, 1, 1};
    auto h = assignment(wrong);
    auto state = build_state(g, h);
    const double stay = move_score(g, h, state, {}, 1.0, 2, 1);
    const double home = move_score(g, h, state, {}, 1.0, 2, 0);
    CHECK(stay == doctest::Approx(oracle_modularity(g, wrong)).epsilon(1e-12));
    CHECK(stay == doctest::Approx(24.0 / 196.0).epsilon(1e-12));
    CHECK(home == doctest::Approx(5.0 / 14.0).epsilon(1e-12));
    CHECK(home > stay);
  }
  CHECK_THROWS(move_score(g, assignment({0, 0, 0, 1, 1, 1}),
                          build_state(g, assignment({0, 0, 0, 1, 1, 1})), {}, 1.0, 0, 2));
}

TEST_CASE("update_h") {
  auto g = two_triangles();
  RefineOptions opt;
  SUBCASE("optimal partition makes no moves") {
    auto h = assignment({0, 0, 0, 1, 1, 1});
    auto r = update_h(g, h, build_state(g, h), {}, opt);
    CHECK(r.moves == 0);
    CHECK(r.assignment == h);
    CHECK(r.state.modularity() == doctest::Approx(5.0 / 14.0));
  }
  SUBCASE("misassigned bridge endpoint moves home in one step") {
    auto h = assignment({0, 0, 1, 1, 1, 1});
    std::vector<double> trace;
    opt.q_trace = &trace;
    auto r = update_h(g, h, build_state(g, h), {}, opt);
    CHECK(r.moves == 1);
    CHECK(r.assignment == assignment({0, 0, 0, 1, 1, 1}));
    REQUIRE(trace.size() == 1);
    CHECK(trace[0] == doctest::Approx(5.0 / 14.0));
  }
  SUBCASE("zero sweeps returns the input") {
    auto h = assignment({0, 0, 1, 1, 1, 1});
    opt.max_sweeps = 0;
    auto r = update_h(g, h, build_state(g, h), {}, opt);
    CHECK(r.moves == 0);
    CHECK(r.assignment == h);
  }
  SUBCASE("a singleton community is never emptied") {
    auto h = assignment({0, 0, 0, 1, 1, 2});
    auto r = update_h(g, h, build_state(g, h), {}, opt);
    CHECK(r.assignment.num_communities == 3);
    CHECK_NOTHROW(validate_assignment(r.assignment, 6));
  }
}

TEST_CASE("initial_partition") {
  auto g = two_triangles();
  CHECK(initial_partition(g, 6) == assignment({0, 1, 2, 3, 4, 5}));
  auto one = initial_partition(g, 1);
  CHECK(one == assignment({0, 0, 0, 0, 0, 0}));
  CHECK(modularity(g, one) == 0.0);
  CHECK(initial_partition(g, 2) == assignment({0, 0, 0, 1, 1, 1}));
  CHECK_THROWS_AS(initial_partition(g, 0), std::invalid_argument);
  CHECK_THROWS_AS(initial_partition(g, 7), std::invalid_argument);

  SUBCASE("disconnected pieces are merged by smallest degree") {
    auto d = testing::make_graph(5, {{0, 1}, {2, 3}, {3, 4}});
    auto h = initial_partition(d, 1);
    CHECK(h.num_communities == 1);
    auto h2 = initial_partition(d, 2);
    CHECK(h2 == assignment({0, 0, 1, 1, 1}));
  }
}

TEST_CASE("initial_partition matches the brute-force best two-way split on small graphs") {
  std::mt19937_64 rng(21);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 40; ++trial) {
    auto g = testing::random_graph(rng, 8, 0.35, false, false);
    if (g.total_weight() == 0.0) continue;
    auto h = initial_partition(g, 2);
    CHECK(h.num_communities == 2);
    CHECK_NOTHROW(validate_assignment(h, g.num_nodes()));
    double best = -1.0;
    for (unsigned mask = 1; mask + 1 < (1u << 8); ++mask) {
      std::vector<CommunityId> m(8);
      for (int v = 0; v < 8; ++v) m[v] = (mask >> v) & 1u;
      best = std::max(best, oracle_modularity(g, m));
    }
    const double q = modularity(g, h);
    CHECK(q <= best + 1e-12);
    ++total;
    if (q >= best - 1e-12) ++agree;
  }
  // Greedy agglomeration is a heuristic; it should be optimal most of the time.
  CHECK(agree * 2 > total);
}

TEST_CASE("initial_partition balance cap") {
  auto g = two_triangles();
  CHECK(initial_partition(g, 2, 1.0) == assignment({0, 0, 0, 1, 1, 1}));
  CHECK_THROWS_AS(initial_partition(g, 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(initial_partition(g, 2, -1.0), std::invalid_argument);

  // Planted communities of 30 nodes: the uncapped greedy result collapses
  // into a few blocks plus singletons, the capped one tracks the plants.
  for (std::uint64_t seed : {1, 2, 3}) {
    TreeSpec spec;
    spec.branching = {5, 5, 30};
    spec.common_ratio = 1.4;
    spec.max_degree = 40;
    spec.degree_shift = 10;
    spec.seed = seed;
    const auto s = generate_graph(spec);
    const auto truth = s.truth.level_assignment(0);
    const CommunityId k = truth.num_communities;
    auto purity = [&](const CommunityAssignment& h) {
      std::vector<std::vector<int>> counts(k, std::vector<int>(k, 0));
      for (NodeId v = 0; v < s.graph.num_nodes(); ++v) ++counts[h[v]][truth[v]];
      long best = 0;
      for (const auto& row : counts) best += *std::max_element(row.begin(), row.end());
      return static_cast<double>(best) / s.graph.num_nodes();
    };
    auto median_size = [](const CommunityAssignment& h) {
      auto sizes = community_sizes(h);
      std::sort(sizes.begin(), sizes.end());
      return sizes[sizes.size() / 2];
    };
    const auto loose = initial_partition(s.graph, k, 0.0);
    const auto capped = initial_partition(s.graph, k, 1.1);
    CHECK(capped.num_communities == k);
    CHECK(median_size(loose) <= 2);
    CHECK(median_size(capped) >= s.graph.num_nodes() / (2 * k));
    CHECK(purity(capped) > purity(loose) + 0.1);
  }
}

TEST_CASE("partition files") {
  auto dir = testing::scratch_dir("partition_io");
  testing::write_file(dir / "p.txt", "0\n0\n1\n1\n");
  CHECK(load_partition(dir / "p.txt", 4) == assignment({0, 0, 1, 1}));
  testing::write_file(dir / "gap.txt", "7\n3\n7\n");
  CHECK(load_partition(dir / "gap.txt", 3) == assignment({1, 0, 1}));
  auto h = assignment({2, 0, 1, 1, 0});
  save_partition(h, dir / "out.txt");
  CHECK(load_partition(dir / "out.txt", 5) == h);
  testing::write_file(dir / "short.txt", "0\n0\n1\n");
  CHECK_THROWS_WITH(load_partition(dir / "short.txt", 4), doctest::Contains("3 entries"));
  testing::write_file(dir / "junk.txt", "0\nx\n");
  CHECK_THROWS(load_partition(dir / "junk.txt", 2));
}

TEST_CASE("property: modularity agrees with the dense oracle and stays in range") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const NodeId n = 2 + static_cast<NodeId>(rng() % 49);
    auto g = testing::random_graph(rng, n, 0.2, trial % 3 == 0, trial % 4 == 0);
    if (g.total_weight() == 0.0) continue;
    const CommunityId k = 1 + static_cast<CommunityId>(rng() % n);
    auto h = testing::random_assignment(rng, n, k);
    const double q = modularity(g, h);
    CHECK(std::abs(q - oracle_modularity(g, h.membership)) <= 1e-9);
    CHECK(q >= -0.5);
    CHECK(q < 1.0);
  }
}

TEST_CASE("property: incremental moves match a rebuild") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const NodeId n = 2 + static_cast<NodeId>(rng() % 199);
    auto g = testing::random_graph(rng, n, 4.0 / n, trial % 2 == 0, true);
    if (g.total_weight() == 0.0) continue;
    const CommunityId k = 1 + static_cast<CommunityId>(rng() % std::min<NodeId>(n, 20));
    auto h = testing::random_assignment(rng, n, k);
    auto state = build_state(g, h);
    for (int step = 0; step < 500; ++step) {
      const NodeId v = static_cast<NodeId>(rng() % n);
      const CommunityId to = static_cast<CommunityId>(rng() % k);
      const CommunityId from = h.membership[v];
      double wf = 0.0, wt = 0.0;
      for (const Neighbor& nb : g.neighbors(v)) {
        if (h.membership[nb.id] == from) wf += nb.weight;
        if (h.membership[nb.id] == to) wt += nb.weight;
      }
      const double predicted =
          state.modularity() +
          state.move_delta(from, to, g.degree(v), g.self_loop_weight(v), wf, wt);
      state.apply_move(from, to, g.degree(v), g.self_loop_weight(v), wf, wt);
      h.membership[v] = to;
      CHECK(state.modularity() == doctest::Approx(predicted).epsilon(1e-9));
    }
    auto fresh = build_state(g, h);
    for (CommunityId c = 0; c < k; ++c) {
      CHECK(std::abs(state.internal_degree()[c] - fresh.internal_degree()[c]) <= 1e-9);
      CHECK(std::abs(state.external_degree()[c] - fresh.external_degree()[c]) <= 1e-9);
    }
    CHECK(std::abs(state.tracked_modularity() - fresh.modularity()) <= 1e-9);
  }
}

TEST_CASE("property: refinement is monotone and ends at a single-move local optimum") {
  std::mt19937_64 rng(24);
  for (int trial = 0; trial < 60; ++trial) {
    const NodeId n = 3 + static_cast<NodeId>(rng() % 8);
    auto g = testing::random_graph(rng, n, 0.4, trial % 2 == 0, false);
    if (g.total_weight() == 0.0) continue;
    auto h = testing::random_assignment(rng, n, 2);
    std::vector<double> trace;
    RefineOptions opt;
    opt.max_sweeps = 100;
    opt.q_trace = &trace;
    const double q0 = modularity(g, h);
    auto r = update_h(g, h, build_state(g, h), {}, opt);
    double prev = q0;
    for (double q : trace) {
      CHECK(q > prev - 1e-12);
      prev = q;
    }
    auto fresh = build_state(g, r.assignment);
    CHECK(r.state.modularity() == doctest::Approx(fresh.modularity()).epsilon(1e-12));
    // No single admissible reassignment to an adjacent community improves Q.
    const double q = oracle_modularity(g, r.assignment.membership);
    auto sizes = community_sizes(r.assignment);
    for (NodeId v = 0; v < n; ++v) {
      if (sizes[r.assignment[v]] == 1) continue;
      for (const Neighbor& nb : g.neighbors(v)) {
        auto m = r.assignment.membership;
        m[v] = r.assignment[nb.id];
        CHECK(oracle_modularity(g, m) <= q + 1e-12);
      }
    }
  }
}

TEST_CASE("compact_assignment and validation") {
  std::vector<std::int64_t> raw{5, 2, 5, 9};
  auto h = compact_assignment(raw);
  CHECK(h == assignment({1, 0, 1, 2}));
  CHECK_THROWS(validate_assignment(CommunityAssignment{{0, 2}, 3}, 2));
  CHECK_THROWS(validate_assignment(CommunityAssignment{{0, 1}, 2}, 3));
  CHECK(community_sizes(h) == std::vector<NodeId>{1, 2, 1});
}

}  // namespace
}  // namespace mazi
