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

#ifndef TOXTAG_COMMANDS_H_
#define TOXTAG_COMMANDS_H_

#include <ostream>
#include <string_view>
#include <vector>

#include "toxtag/config.h"

namespace toxtag {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitDataError = 2,
  kExitInternal = 3,
};

const std::vector<std::string_view>& verbs();
bool is_verb(std::string_view verb);

// Runs one verb. Artifacts go to config.output_dir together with a
// manifest.txt recording the config hash, seed and ensemble members. Files
// written by a failed run are removed again. Progress and errors go to
// `log`.
int run_command(std::string_view verb, const RunConfig& config, std::ostream& log);

}  // namespace toxtag

#endif  // TOXTAG_COMMANDS_H_
