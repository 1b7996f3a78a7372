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

// Token representation providers. The tagger only sees an n x d matrix per
// segment; where it comes from is decided by EmbedderConfig.

#ifndef TOXTAG_ENCODER_H_
#define TOXTAG_ENCODER_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <tuple>

#include "toxtag/corpus_io.h"
#include "toxtag/linalg.h"
#include "toxtag/rng.h"

namespace toxtag {

enum class EmbedderKind { kHashed, kPrecomputed };

std::string_view embedder_kind_name(EmbedderKind kind);
EmbedderKind parse_embedder_kind(std::string_view name);

// Bit flags selecting the per-token lexical features of the hashed provider.
enum FeatureTemplate : unsigned {
  kLowercase = 1u << 0,
  kPrefix3 = 1u << 1,
  kSuffix3 = 1u << 2,
  kShape = 1u << 3,
  kAllFeatures = kLowercase | kPrefix3 | kSuffix3 | kShape,
};

struct EmbedderConfig {
  EmbedderKind kind = EmbedderKind::kHashed;
  int dim = 128;
  std::uint64_t hash_seed = 0x5EED5EEDULL;
  int context_window = 1;
  unsigned features = kAllFeatures;
  double dropout = 0.1;
  std::string embeddings_path;  // precomputed provider only

  bool operator==(const EmbedderConfig&) const = default;
};

// Throws std::invalid_argument.
void validate(const EmbedderConfig& config);

// Where a segment sits in the corpus. Precomputed vectors are keyed by it.
struct SegmentKey {
  std::string_view doc_id;
  std::size_t sentence_index = 0;
  std::size_t token_offset = 0;
};

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual int dim() const = 0;
  virtual Matrix embed(std::span<const Token> tokens, const SegmentKey& key) const = 0;

  Matrix embed(const Segment& segment) const {
    return embed(segment.tokens, SegmentKey{segment.doc_id, segment.sentence_index,
                                            segment.token_offset});
  }
};

// Signed feature hashing over lowercased form, 3-char prefix and suffix,
// and word shape of the token and its neighbours within the context
// window. Rows are scaled by 1/sqrt(feature count).
class HashedEmbedder : public Embedder {
 public:
  explicit HashedEmbedder(const EmbedderConfig& config);
  int dim() const override { return config_.dim; }
  Matrix embed(std::span<const Token> tokens, const SegmentKey& key) const override;

 private:
  EmbedderConfig config_;
};

// Replays vectors exported by an external encoder. File format:
//   dim=<d>
//   <doc_id>\t<sentence_index>\t<token_index>\t<v1 v2 ... vd>
// where token_index counts from the start of the sentence.
class PrecomputedEmbedder : public Embedder {
 public:
  static std::unique_ptr<PrecomputedEmbedder> load(const std::filesystem::path& path);
  static std::unique_ptr<PrecomputedEmbedder> read(std::istream& in);

  int dim() const override { return dim_; }
  // Throws LookupError naming the first missing key.
  Matrix embed(std::span<const Token> tokens, const SegmentKey& key) const override;

 private:
  using Key = std::tuple<std::string, std::size_t, std::size_t>;
  int dim_ = 0;
  std::map<Key, std::vector<double>> vectors_;
};

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config);

// Convenience for the hashed provider.
Matrix embed(std::span<const Token> tokens, const EmbedderConfig& config);

// Inverted dropout: zero each entry with probability `rate`, scale the rest
// by 1/(1-rate). Throws std::invalid_argument unless 0 <= rate < 1.
Matrix apply_dropout(const Matrix& embeddings, double rate, Rng& rng);

// "Varón" -> "Xx", "51" -> "d", "1-2" -> "d-d": runs of the same class
// collapse to one symbol.
std::string word_shape(std::string_view token);

// Seeded 64-bit FNV-1a followed by a splitmix64 finalizer.
std::uint64_t hash64(std::string_view data, std::uint64_t seed);

}  // namespace toxtag

#endif  // TOXTAG_ENCODER_H_
