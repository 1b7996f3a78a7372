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

#ifndef TOXTAG_ERROR_H_
#define TOXTAG_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace toxtag {

// Base class for failures caused by input data (files, annotations,
// checkpoints). The CLI maps these to the data-error exit code.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed text in a line-oriented file.
class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input that violates a domain rule (unknown label, empty
// corpus, bad offsets).
class ValidationError : public DataError {
 public:
  using DataError::DataError;
};

// Annotation text disagrees with the document it points into.
class IntegrityError : public DataError {
 public:
  using DataError::DataError;
};

// A keyed record (precomputed embedding, label) is missing.
class LookupError : public DataError {
 public:
  using DataError::DataError;
};

// Checkpoint cannot be read: truncated, corrupt or wrong version.
class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

// Bad run configuration. Reported as a usage error by the CLI.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace toxtag

#endif  // TOXTAG_ERROR_H_
