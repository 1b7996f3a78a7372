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

#ifndef TOXTAG_LOG_H_
#define TOXTAG_LOG_H_

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace toxtag {

using WarningSink = std::function<void(std::string_view)>;

// Reports a recoverable problem (skipped annotation line, dropped span).
// Goes to stderr unless a sink is installed.
void warn(std::string_view message);

// Installs a process-wide sink and returns the previous one. An empty sink
// restores the stderr default.
WarningSink set_warning_sink(WarningSink sink);

// Collects warnings for the lifetime of the object.
class WarningCapture {
 public:
  WarningCapture();
  ~WarningCapture();
  WarningCapture(const WarningCapture&) = delete;
  WarningCapture& operator=(const WarningCapture&) = delete;

  std::vector<std::string> messages() const;

 private:
  WarningSink previous_;
  std::shared_ptr<std::vector<std::string>> messages_;
};

}  // namespace toxtag

#endif  // TOXTAG_LOG_H_
