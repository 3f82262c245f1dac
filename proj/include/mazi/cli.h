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


// Run configuration and the command implementations behind the mazi tool.

#ifndef MAZI_CLI_H_
#define MAZI_CLI_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mazi/eval.h"
#include "mazi/hierarchy.h"
#include "mazi/synthgen.h"

namespace mazi {

enum class KeyType { kString, kInt, kDouble, kBool, kIntList, kDoubleList, kChoice, kChoiceList };

struct KeySpec {
  std::string name;
  KeyType type = KeyType::kString;
  std::string default_value;
  std::string help;
  std::vector<std::string> choices;
};

// Every recognised key with its default, in the order used for echoing.
const std::vector<KeySpec>& config_keys();

// Flat key = value configuration. Values are validated against the key's
// type on assignment; unknown keys throw std::invalid_argument.
class RunConfig {
 public:
  RunConfig();

  void set(std::string_view key, std::string_view value);
  // Parses "key = value" lines ('#' starts a comment). A key may appear once
  // per file.
  void load_file(const std::filesystem::path& path);
  // Applies "key=value".
  void apply_override(std::string_view assignment);

  const std::string& get(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  double get_double(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<std::int64_t> get_ints(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;
  std::vector<std::string> get_list(std::string_view key) const;
  std::uint64_t seed() const;

  // Resolved config in key order, one "key = value" per line.
  std::string to_text() const;
  void save(const std::filesystem::path& path) const;

  MaziConfig mazi_config() const;
  TreeSpec tree_spec() const;
  ClassifierOptions classifier_options() const;
  DecoderOptions decoder_options() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

// Commands: generate, partition, train, eval-lp, eval-nc, ablate. Outputs go
// to the directory named by the "out" key, which also receives config.txt.
const std::vector<std::string>& command_names();
void run_command(std::string_view command, const RunConfig& config);

// One metric value per (method, seed).
struct MetricRow {
  std::string method;
  std::string dataset;
  std::string seed;
  std::string metric;
  double value = 0.0;
};

// Writes metrics.csv (rows plus "mean" and "stddev" rows per method and
// metric) and metrics.txt ("method.metric.mean = ..." lines). The standard
// deviation uses n - 1 and is 0 for a single seed.
void write_metrics(const std::vector<MetricRow>& rows, const std::filesystem::path& dir);

}  // namespace mazi

#endif  // MAZI_CLI_H_
