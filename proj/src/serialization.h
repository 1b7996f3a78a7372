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

// JSON helpers shared by the model and filter checkpoint formats. Doubles
// are written with round-trip precision, so reloaded tensors are
// bit-identical.

#ifndef TOXTAG_SRC_SERIALIZATION_H_
#define TOXTAG_SRC_SERIALIZATION_H_

#include <string>

#include <json.hpp>

#include "toxtag/encoder.h"
#include "toxtag/error.h"
#include "toxtag/linalg.h"

namespace toxtag::internal {

using json = nlohmann::json;

inline json matrix_to_json(const Matrix& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  j["data"] = std::vector<double>(m.data(), m.data() + m.size());
  return j;
}

inline Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (rows < 0 || cols < 0 || static_cast<Eigen::Index>(data.size()) != rows * cols) {
    throw CheckpointError("tensor shape does not match its data");
  }
  Matrix m(rows, cols);
  std::copy(data.begin(), data.end(), m.data());
  return m;
}

inline json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Vector vector_from_json(const json& j) {
  const auto data = j.get<std::vector<double>>();
  Vector v(static_cast<Eigen::Index>(data.size()));
  std::copy(data.begin(), data.end(), v.data());
  return v;
}

inline json embedder_to_json(const EmbedderConfig& c) {
  return json{{"kind", std::string(embedder_kind_name(c.kind))},
              {"dim", c.dim},
              {"hash_seed", c.hash_seed},
              {"context_window", c.context_window},
              {"features", c.features},
              {"dropout", c.dropout},
              {"embeddings_path", c.embeddings_path}};
}

inline EmbedderConfig embedder_from_json(const json& j) {
  EmbedderConfig c;
  c.kind = parse_embedder_kind(j.at("kind").get<std::string>());
  c.dim = j.at("dim").get<int>();
  c.hash_seed = j.at("hash_seed").get<std::uint64_t>();
  c.context_window = j.at("context_window").get<int>();
  c.features = j.at("features").get<unsigned>();
  c.dropout = j.at("dropout").get<double>();
  c.embeddings_path = j.at("embeddings_path").get<std::string>();
  return c;
}

// Parses `text` and checks the format tag and version.
inline json parse_container(std::string_view text, std::string_view format, int version) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError("corrupt " + std::string(format) + " file: " + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != format) {
    throw CheckpointError("not a " + std::string(format) + " file");
  }
  if (!j.contains("version") || j["version"] != version) {
    throw CheckpointError("unsupported " + std::string(format) + " version " +
                          (j.contains("version") ? j["version"].dump() : "<missing>") +
                          ", expected " + std::to_string(version));
  }
  return j;
}

}  // namespace toxtag::internal

#endif  // TOXTAG_SRC_SERIALIZATION_H_
