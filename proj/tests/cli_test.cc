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


#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mazi/cli.h"
#include "mazi/text_io.h"

using namespace mazi;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mazi_test_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> read_report(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// A 1000-leaf planted graph written once and shared by the command tests.
const fs::path& small_dataset() {
  static const fs::path dir = [] {
    const fs::path d = scratch("data");
    RunConfig c;
    c.set("out", d.string());
    c.set("preset", "none");
    c.set("branching", "2,5,100");
    c.set("common_ratio", "1.5");
    c.set("max_degree", "20");
    c.set("degree_shift", "5");
    run_command("generate", c);
    return d;
  }();
  return dir;
}

RunConfig fast_config(const fs::path& out) {
  RunConfig c;
  c.set("out", out.string());
  c.set("graph", (small_dataset() / "graph.edgelist").string());
  c.set("labels", (small_dataset() / "labels.txt").string());
  c.set("dim", "8");
  c.set("walks_per_node", "2");
  c.set("walk_length", "10");
  c.set("flat_epochs", "1");
  return c;
}

std::map<std::string, std::string> directory_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    out[e.path().filename().string()] = slurp(e.path());
  }
  return out;
}

}  // namespace

TEST_CASE("config keys are checked on assignment") {
  RunConfig c;
  CHECK_THROWS_AS(c.set("dimension", "8"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("dim", "eight"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("seed", "1.5"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("weighted", "maybe"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("preset", "lfr"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("lr", "0.1,x"), std::invalid_argument);
  CHECK_THROWS_AS(c.set("methods", "flat,deepwalk"), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_override("dim"), std::invalid_argument);

  c.apply_override("lr=0.1,0.2");
  CHECK(c.get_doubles("lr") == std::vector<double>{0.1, 0.2});
  c.set("weighted", "true");
  CHECK(c.get_bool("weighted"));
  CHECK(c.get_int("dim") == 128);
  CHECK(c.mazi_config().lr == std::vector<double>{0.1, 0.2});

  c.set("imbalance", "true");
  c.set("per_class", "7");
  CHECK(c.classifier_options().imbalance);
  CHECK(c.classifier_options().per_class == 7);

  c.set("preset", "none");
  c.set("common_ratio", "2");
  try {
    (void)c.tree_spec();
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("branching") != std::string::npos);
  }
  CHECK_THROWS_AS(run_command("fit", c), std::invalid_argument);
}

TEST_CASE("config files") {
  const fs::path dir = scratch("files");
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "a.conf");
    f << "# comment line\n\ndim = 16   # trailing\nbeta = 0.5\n";
  }
  RunConfig c;
  c.load_file(dir / "a.conf");
  CHECK(c.get_int("dim") == 16);
  CHECK(c.get_doubles("beta") == std::vector<double>{0.5});
  {
    std::ofstream f(dir / "dup.conf");
    f << "dim = 16\ndim = 32\n";
  }
  CHECK_THROWS_AS(RunConfig().load_file(dir / "dup.conf"), std::invalid_argument);
  {
    std::ofstream f(dir / "bad.conf");
    f << "dims = 16\n";
  }
  CHECK_THROWS_AS(RunConfig().load_file(dir / "bad.conf"), std::invalid_argument);

  // The echoed text loads back into the same configuration.
  c.save(dir / "echo.conf");
  RunConfig back;
  back.load_file(dir / "echo.conf");
  CHECK(back.to_text() == c.to_text());
  CHECK(lines(dir / "echo.conf").size() == config_keys().size());
}

TEST_CASE("generate writes a labelled planted graph") {
  const auto report = read_report(small_dataset() / "generation_report.txt");
  CHECK(report.at("leaves") == "1000");
  CHECK(std::stoi(report.at("nodes")) <= 1000);
  CHECK(std::stoi(report.at("nodes")) > 900);
  CHECK(report.at("branching") == "2,5,100");
  CHECK(report.count("prior_modularity_level1") == 1);
  CHECK(report.count("prior_modularity_level2") == 1);
  CHECK(fs::exists(small_dataset() / "ground_truth.txt"));
  CHECK(lines(small_dataset() / "labels.txt").size() == std::stoul(report.at("nodes")));

  const fs::path again = scratch("data_again");
  RunConfig c;
  c.load_file(small_dataset() / "config.txt");
  c.set("out", again.string());
  run_command("generate", c);
  for (const char* f : {"graph.edgelist", "labels.txt", "ground_truth.txt",
                        "generation_report.txt"}) {
    CHECK(slurp(again / f) == slurp(small_dataset() / f));
  }
}

TEST_CASE("the figure preset has 3750 leaves") {
  const fs::path out = scratch("figure");
  RunConfig c;
  c.set("out", out.string());
  c.set("preset", "figure1");
  run_command("generate", c);
  const auto report = read_report(out / "generation_report.txt");
  CHECK(report.at("leaves") == "3750");
  CHECK(report.at("common_ratio") == "3");
}

TEST_CASE("train reruns from its echoed config bit for bit") {
  const fs::path first = scratch("train1");
  RunConfig c = fast_config(first);
  run_command("train", c);
  for (const char* f : {"config.txt", "id_map.txt", "hierarchy.txt", "train_report.csv",
                        "level1.emb", "level1.part", "level2.emb"}) {
    CHECK_MESSAGE(fs::exists(first / f), f);
  }
  const auto header = lines(first / "train_report.csv").front();
  CHECK(header == "iter,direction,level,sg_loss,comm_loss,Q,moves,seconds");

  const fs::path second = scratch("train2");
  RunConfig echo;
  echo.load_file(first / "config.txt");
  echo.set("out", second.string());
  run_command("train", echo);
  auto a = directory_bytes(first);
  auto b = directory_bytes(second);
  a.erase("config.txt");
  b.erase("config.txt");
  CHECK(a == b);
}

TEST_CASE("baseline mode and zero iterations") {
  const fs::path base = scratch("baseline");
  RunConfig c = fast_config(base);
  c.set("mode", "baseline");
  run_command("train", c);
  std::set<std::string> names;
  for (const auto& e : fs::directory_iterator(base)) names.insert(e.path().filename().string());
  CHECK(names == std::set<std::string>{"config.txt", "id_map.txt", "level1.emb"});

  const fs::path zero = scratch("zero");
  RunConfig z = fast_config(zero);
  z.set("iterations", "0");
  run_command("train", z);
  CHECK(lines(zero / "train_report.csv").size() == 1);
  CHECK(slurp(zero / "level1.emb") == slurp(base / "level1.emb"));
}

TEST_CASE("eval-lp with identical embeddings ties every candidate") {
  const fs::path out = scratch("lp_tie");
  const auto n = static_cast<std::size_t>(
      std::stoul(read_report(small_dataset() / "generation_report.txt").at("nodes")));
  EmbeddingMatrix x(n, 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 4; ++j) x.at(i, j) = 0.5;
  }
  fs::create_directories(out);
  save_embeddings(x, out / "same.emb");
  RunConfig c = fast_config(out);
  c.set("embeddings", (out / "same.emb").string());
  c.set("lp_negatives", "24");
  run_command("eval-lp", c);
  const auto m = read_report(out / "metrics.txt");
  CHECK(std::stod(m.at("given.map_test.mean")) == doctest::Approx(1.0 / 25));
  CHECK(std::stod(m.at("given.map_val.mean")) == doctest::Approx(1.0 / 25));

  EmbeddingMatrix short_x(n - 1, 4);
  save_embeddings(short_x, out / "short.emb");
  c.set("embeddings", (out / "short.emb").string());
  CHECK_THROWS_AS(run_command("eval-lp", c), std::invalid_argument);
}

TEST_CASE("several seeds produce rows and aggregates") {
  const fs::path out = scratch("seeds");
  RunConfig c = fast_config(out);
  c.set("seeds", "3");
  c.set("seed", "4");
  c.set("methods", "flat");
  c.set("nc_max_iter", "50");
  run_command("eval-nc", c);
  const auto rows = lines(out / "metrics.csv");
  int per_seed = 0, mean = 0, sd = 0;
  for (const auto& r : rows) {
    if (r.rfind("flat,graph,", 0) != 0) continue;
    if (r.find(",macro_f1,") == std::string::npos) continue;
    if (r.find(",mean,") != std::string::npos) {
      ++mean;
    } else if (r.find(",stddev,") != std::string::npos) {
      ++sd;
    } else {
      ++per_seed;
    }
  }
  CHECK(per_seed == 3);
  CHECK(mean == 1);
  CHECK(sd == 1);
  CHECK(rows.front() == "method,dataset,seed,metric,value");
  for (const char* s : {",4,", ",5,", ",6,"}) {
    bool found = false;
    for (const auto& r : rows) found = found || r.find(s) != std::string::npos;
    CHECK_MESSAGE(found, s);
  }
  CHECK(read_report(out / "metrics.txt").at("flat.macro_f1.n") == "3");
}

TEST_CASE("metric aggregation uses the sample deviation") {
  const fs::path out = scratch("agg");
  fs::create_directories(out);
  write_metrics({{"m", "d", "1", "x", 1.0}, {"m", "d", "2", "x", 2.0}, {"m", "d", "3", "x", 3.0},
                 {"k", "d", "1", "x", 5.0}},
                out);
  const auto m = read_report(out / "metrics.txt");
  CHECK(std::stod(m.at("m.x.mean")) == 2.0);
  CHECK(std::stod(m.at("m.x.stddev")) == 1.0);
  CHECK(std::stod(m.at("k.x.stddev")) == 0.0);
  CHECK(m.at("k.x.n") == "1");
  const auto rows = lines(out / "metrics.csv");
  CHECK(rows.size() == 1 + 4 + 4);
  CHECK(rows[5] == "m,d,mean,x,2");
}

TEST_CASE("partition command") {
  const fs::path out = scratch("partition");
  RunConfig c = fast_config(out);
  c.set("k", "10");
  run_command("partition", c);
  const auto report = read_report(out / "partition_report.txt");
  CHECK(report.at("communities") == "10");
  CHECK(std::stoi(report.at("size_min")) >= 1);
  CHECK(std::stod(report.at("modularity")) > 0.3);
  c.set("k", "100000");
  CHECK_THROWS_AS(run_command("partition", c), std::invalid_argument);
}
