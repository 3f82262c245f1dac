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


#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <exception>
#include <string>
#include <vector>

#include "mazi/cli.h"

namespace {

std::string key_listing() {
  std::string out = "Config keys (key = default):\n";
  for (const auto& k : mazi::config_keys()) {
    out += "  " + k.name + " = " + k.default_value + "\n      " + k.help + "\n";
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint hierarchical node embedding and community detection"};
  std::string command;
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  long long seed = -1;
  bool quiet = false;
  bool list_keys = false;

  std::string commands;
  for (const auto& name : mazi::command_names()) commands += (commands.empty() ? "" : ", ") + name;
  app.add_option("command", command, "one of: " + commands);
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--set", overrides, "key=value override (repeatable)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "run seed")->check(CLI::NonNegativeNumber);
  app.add_flag("--quiet", quiet, "only log warnings and errors");
  app.add_flag("--list-keys", list_keys, "print every config key with its default");
  app.footer("Example: mazi train --config run.cfg --set lr=0.02 --out runs/a");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (list_keys) {
    std::fputs(key_listing().c_str(), stdout);
    return 0;
  }
  spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info);
  try {
    if (command.empty()) throw std::invalid_argument("a command is required (" + commands + ")");
    if (config_path.empty()) throw std::invalid_argument("--config is required");
    mazi::RunConfig config;
    config.load_file(config_path);
    for (const auto& o : overrides) config.apply_override(o);
    if (!out_dir.empty()) config.set("out", out_dir);
    if (seed >= 0) config.set("seed", std::to_string(seed));
    mazi::run_command(command, config);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
