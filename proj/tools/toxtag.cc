// Copyright 2026 The Toxtag Authors.
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

// Command-line driver.
//
//   toxtag <verb> [--config FILE] [--set key=value]...
//
// Verbs: stats, kfold, train-filter, train, predict, ensemble, evaluate.
// --set lines are appended to the config file, so they override it.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "toxtag/commands.h"
#include "toxtag/config.h"
#include "toxtag/corpus_io.h"
#include "toxtag/error.h"

int main(int argc, char** argv) {
  CLI::App app{"Substance-use trigger and argument tagger"};
  std::string verb;
  std::string config_path;
  std::vector<std::string> overrides;
  bool list_keys = false;

  std::string verb_help = "one of:";
  for (auto v : toxtag::verbs()) verb_help += " " + std::string(v);
  app.add_option("verb", verb, verb_help);
  app.add_option("-c,--config", config_path, "key = value configuration file");
  app.add_option("-s,--set", overrides, "override a configuration key (key=value)");
  app.add_flag("--list-keys", list_keys, "print the accepted configuration keys");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? toxtag::kExitOk : toxtag::kExitUsage;
  }

  if (list_keys) {
    for (const auto& k : toxtag::config_keys()) std::cout << k << "\n";
    return toxtag::kExitOk;
  }
  if (!toxtag::is_verb(verb)) {
    std::cerr << (verb.empty() ? "missing verb" : "unknown verb '" + verb + "'") << "\n"
              << app.help();
    return toxtag::kExitUsage;
  }

  std::string text;
  try {
    if (!config_path.empty()) text = toxtag::read_file(config_path);
  } catch (const toxtag::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return toxtag::kExitUsage;
  }
  text += "\n";
  for (const auto& kv : overrides) text += kv + "\n";

  toxtag::RunConfig config;
  try {
    config = toxtag::parse_config(text);
  } catch (const toxtag::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return toxtag::kExitUsage;
  }
  return toxtag::run_command(verb, config, std::cerr);
}
