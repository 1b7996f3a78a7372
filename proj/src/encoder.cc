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

#include "toxtag/encoder.h"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "toxtag/error.h"
#include "toxtag/utf8.h"

namespace toxtag {
namespace {

char32_t lower(char32_t c) {
  if ((c >= 'A' && c <= 'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7)) return c + 32;
  return c;
}

bool upper(char32_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7);
}

bool letter(char32_t c) {
  return upper(c) || (c >= 'a' && c <= 'z') || (c >= 0xDF && c <= 0xFF && c != 0xF7) ||
         c >= 0x100;
}

std::u32string lowercase(std::string_view token) {
  std::u32string cps = utf8::decode(token);
  for (auto& c : cps) c = lower(c);
  return cps;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t hash64(std::string_view data, std::uint64_t seed) {
  std::uint64_t h = 0xCBF29CE484222325ULL ^ splitmix64(seed);
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(h);
}

std::string_view embedder_kind_name(EmbedderKind kind) {
  return kind == EmbedderKind::kHashed ? "hashed" : "precomputed";
}

EmbedderKind parse_embedder_kind(std::string_view name) {
  if (name == "hashed") return EmbedderKind::kHashed;
  if (name == "precomputed") return EmbedderKind::kPrecomputed;
  throw std::invalid_argument("unknown embedder kind '" + std::string(name) + "'");
}

void validate(const EmbedderConfig& config) {
  if (config.kind == EmbedderKind::kHashed && config.dim <= 0) {
    throw std::invalid_argument("embedding dimension must be positive");
  }
  if (config.context_window < 0) {
    throw std::invalid_argument("context window must be non-negative");
  }
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1)");
  }
  if (config.kind == EmbedderKind::kHashed && (config.features & kAllFeatures) == 0) {
    throw std::invalid_argument("at least one feature template is required");
  }
}

std::string word_shape(std::string_view token) {
  std::string shape;
  char prev = 0;
  for (char32_t c : utf8::decode(token)) {
    char cls;
    if (c >= '0' && c <= '9') {
      cls = 'd';
    } else if (upper(c)) {
      cls = 'X';
    } else if (letter(c)) {
      cls = 'x';
    } else {
      std::string raw;
      utf8::append(c, raw);
      shape += raw;
      prev = 0;
      continue;
    }
    if (cls != prev) shape.push_back(cls);
    prev = cls;
  }
  return shape;
}

HashedEmbedder::HashedEmbedder(const EmbedderConfig& config) : config_(config) {
  validate(config_);
}

Matrix HashedEmbedder::embed(std::span<const Token> tokens, const SegmentKey&) const {
  const auto n = static_cast<Eigen::Index>(tokens.size());
  Matrix out = Matrix::Zero(n, config_.dim);
  if (tokens.empty()) return out;

  // Per-token feature values, computed once.
  struct Lexical {
    std::string lower, prefix, suffix, shape;
  };
  std::vector<Lexical> lex(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::u32string cps = lowercase(tokens[i].text);
    lex[i].lower = utf8::encode(cps);
    lex[i].prefix = utf8::encode(std::u32string_view(cps).substr(0, 3));
    lex[i].suffix = utf8::encode(
        std::u32string_view(cps).substr(cps.size() > 3 ? cps.size() - 3 : 0));
    lex[i].shape = word_shape(tokens[i].text);
  }

  const int window = config_.context_window;
  const int templates = std::popcount(config_.features & kAllFeatures);
  const double scale = 1.0 / std::sqrt(static_cast<double>((2 * window + 1) * templates));
  const auto dim = static_cast<std::uint64_t>(config_.dim);
  const auto count = static_cast<long>(tokens.size());

  std::string feature;
  for (long i = 0; i < count; ++i) {
    for (int o = -window; o <= window; ++o) {
      const long j = i + o;
      const std::string position = std::to_string(o);
      auto add = [&](char name, const std::string& value) {
        feature.clear();
        feature += position;
        feature += '|';
        feature += name;
        feature += '|';
        feature += value;
        const std::uint64_t h = hash64(feature, config_.hash_seed);
        const double sign = (h >> 63) ? -1.0 : 1.0;
        out(i, static_cast<Eigen::Index>(h % dim)) += sign * scale;
      };
      if (j < 0 || j >= count) {
        const std::string edge = j < 0 ? "<s>" : "</s>";
        if (config_.features & kLowercase) add('w', edge);
        if (config_.features & kPrefix3) add('p', edge);
        if (config_.features & kSuffix3) add('s', edge);
        if (config_.features & kShape) add('h', edge);
        continue;
      }
      const Lexical& l = lex[static_cast<std::size_t>(j)];
      if (config_.features & kLowercase) add('w', l.lower);
      if (config_.features & kPrefix3) add('p', l.prefix);
      if (config_.features & kSuffix3) add('s', l.suffix);
      if (config_.features & kShape) add('h', l.shape);
    }
  }
  return out;
}

std::unique_ptr<PrecomputedEmbedder> PrecomputedEmbedder::load(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embeddings file " + path.string());
  return read(in);
}

std::unique_ptr<PrecomputedEmbedder> PrecomputedEmbedder::read(std::istream& in) {
  auto out = std::unique_ptr<PrecomputedEmbedder>(new PrecomputedEmbedder());
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "missing 'dim=<d>' header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line.rfind("dim=", 0) != 0) throw ParseError(1, "missing 'dim=<d>' header");
  {
    const char* first = line.data() + 4;
    const char* last = line.data() + line.size();
    auto [ptr, ec] = std::from_chars(first, last, out->dim_);
    if (ec != std::errc() || ptr != last || out->dim_ <= 0) {
      throw ParseError(1, "invalid dimension in '" + line + "'");
    }
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t pos = 0;
    for (int f = 0; f < 3; ++f) {
      const std::size_t tab = line.find('\t', pos);
      if (tab == std::string::npos) throw ParseError(line_no, "expected 4 tab-separated fields");
      fields.push_back(line.substr(pos, tab - pos));
      pos = tab + 1;
    }
    fields.push_back(line.substr(pos));
    std::size_t sentence = 0, token = 0;
    auto parse_index = [&](const std::string& s, std::size_t& v) {
      auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line_no, "invalid index '" + s + "'");
      }
    };
    parse_index(fields[1], sentence);
    parse_index(fields[2], token);
    std::vector<double> values;
    values.reserve(static_cast<std::size_t>(out->dim_));
    std::istringstream vs(fields[3]);
    std::string item;
    while (vs >> item) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size() || !std::isfinite(v)) {
        throw ParseError(line_no, "invalid value '" + item + "'");
      }
      values.push_back(v);
    }
    if (values.size() != static_cast<std::size_t>(out->dim_)) {
      throw ParseError(line_no, "expected " + std::to_string(out->dim_) + " values, found " +
                                    std::to_string(values.size()));
    }
    out->vectors_[Key{fields[0], sentence, token}] = std::move(values);
  }
  return out;
}

Matrix PrecomputedEmbedder::embed(std::span<const Token> tokens, const SegmentKey& key) const {
  Matrix out(static_cast<Eigen::Index>(tokens.size()), dim_);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Key k{std::string(key.doc_id), key.sentence_index, key.token_offset + i};
    const auto it = vectors_.find(k);
    if (it == vectors_.end()) {
      throw LookupError("no precomputed embedding for (" + std::get<0>(k) + ", " +
                        std::to_string(std::get<1>(k)) + ", " +
                        std::to_string(std::get<2>(k)) + ")");
    }
    for (int c = 0; c < dim_; ++c) {
      out(static_cast<Eigen::Index>(i), c) = it->second[static_cast<std::size_t>(c)];
    }
  }
  return out;
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config) {
  validate(config);
  if (config.kind == EmbedderKind::kPrecomputed) {
    return PrecomputedEmbedder::load(config.embeddings_path);
  }
  return std::make_shared<HashedEmbedder>(config);
}

Matrix embed(std::span<const Token> tokens, const EmbedderConfig& config) {
  return make_embedder(config)->embed(tokens, SegmentKey{});
}

Matrix apply_dropout(const Matrix& embeddings, double rate, Rng& rng) {
  if (!(rate >= 0.0 && rate < 1.0)) {
    throw std::invalid_argument("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
  if (rate == 0.0) return embeddings;
  const double keep_scale = 1.0 / (1.0 - rate);
  Matrix out(embeddings.rows(), embeddings.cols());
  for (Eigen::Index i = 0; i < embeddings.rows(); ++i) {
    for (Eigen::Index j = 0; j < embeddings.cols(); ++j) {
      out(i, j) = rng.uniform() < rate ? 0.0 : embeddings(i, j) * keep_scale;
    }
  }
  return out;
}

}  // namespace toxtag
