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

// Run configuration for the command-line tool. The file format is
// line-oriented:
//
//   # comment
//   key = value
//
// Unknown keys and unparsable values are errors. Absent keys take the
// defaults of the structs they populate.

#ifndef TOXTAG_CONFIG_H_
#define TOXTAG_CONFIG_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "toxtag/encoder.h"
#include "toxtag/ensemble_eval.h"
#include "toxtag/filter_sampling.h"
#include "toxtag/multitask_model.h"

namespace toxtag {

struct RunConfig {
  TrainingConfig training;
  EmbedderConfig embedder;
  FilterConfig filter;
  EnsembleConfig ensemble;
  std::size_t folds = 5;
  std::uint64_t fold_seed = 42;
  std::string subset_id;

  std::string data_dir;
  std::string output_dir;
  std::string gold_dir;
  std::string pred_dir;
  std::string checkpoint;
  std::string filter_checkpoint;
  std::string subset_manifest;
};

// Throws ConfigError naming the key and line.
RunConfig parse_config(std::string_view text);

// The keys parse_config accepts, sorted.
std::vector<std::string> config_keys();

// Checks that the paths `verb` needs are set and that input paths exist.
// Throws ConfigError.
void require_paths(const RunConfig& config, std::string_view verb);

// Every key with its effective value, one "key = value" per line, sorted.
std::string canonical_config(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace toxtag

#endif  // TOXTAG_CONFIG_H_
