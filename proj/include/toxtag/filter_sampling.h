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

// The binary sentence filter and the training-data strategies used to
// diversify ensemble members: per-tag loss weights, sentence oversampling,
// weighted random sampling and k-fold subsets.

#ifndef TOXTAG_FILTER_SAMPLING_H_
#define TOXTAG_FILTER_SAMPLING_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxtag/adamw.h"
#include "toxtag/bio_codec.h"
#include "toxtag/corpus_io.h"
#include "toxtag/encoder.h"
#include "toxtag/linalg.h"
#include "toxtag/rng.h"

namespace toxtag {

struct LabeledSentence {
  Sentence sentence;
  bool positive = false;
};

// A sentence is positive iff it overlaps at least one trigger or argument.
std::vector<LabeledSentence> build_filter_dataset(std::span<const Document> corpus);

struct FilterConfig {
  double learning_rate = 1e-5;
  std::size_t batch_size = 16;
  int epochs = 5;
  double dropout = 0.1;
  AdamWConfig adam{0.9, 0.999, 1e-8, 0.01};
  std::uint64_t seed = 13;
  double threshold = 0.5;

  bool operator==(const FilterConfig&) const = default;
};

// Two-way softmax over the mean-pooled token embeddings.
struct FilterModel {
  EmbedderConfig embedder_config;
  Matrix weights;  // d x 2; column 1 is the positive class
  Vector bias;     // 2
  double threshold = 0.5;
  std::shared_ptr<const Embedder> embedder;

  double positive_probability(const Sentence& sentence) const;
  bool keep(const Sentence& sentence) const {
    return positive_probability(sentence) >= threshold;
  }
};

// Mean of the token rows; a zero vector for an empty sentence.
Vector mean_pool(const Matrix& embeddings, int dim);

// Minimizes softmax cross-entropy with AdamW. Throws ValidationError when
// the data is empty or holds a single class.
// Throws ValidationError for out-of-range settings.
void validate(const FilterConfig& config);

FilterModel train_filter(std::span<const LabeledSentence> data,
                         const EmbedderConfig& embedder, const FilterConfig& config);

// Keeps sentences whose positive probability is >= the threshold, in order.
std::vector<Sentence> filter_sentences(const FilterModel& filter,
                                       std::span<const Sentence> sentences);

void save_filter(const FilterModel& filter, const std::filesystem::path& path);
// Throws CheckpointError.
FilterModel load_filter(const std::filesystem::path& path);
std::string serialize_filter(const FilterModel& filter);
FilterModel deserialize_filter(std::string_view text);

// weight(tag) = total / (C * count(tag)); tags never seen get the largest
// computed weight.
std::vector<double> class_weights(std::span<const TagSequence> sequences,
                                  const LabelScheme& scheme);
std::vector<double> class_weights(std::span<const TagSequence> sequences, int num_tags);

// Duplication ratio per trigger category. Missing categories count as 1.
using OversampleRatios = std::map<std::string, int, std::less<>>;

// "9-3-2-2" in the order Drug, Alcohol, Tobacco, Cannabis.
OversampleRatios parse_ratios(std::string_view text);
std::string format_ratios(const OversampleRatios& ratios);

// Indices of the expanded sentence list: sentence i is repeated
// max over its trigger categories of the ratio (once if it has none).
std::vector<std::size_t> oversample(std::span<const std::vector<std::string>> trigger_labels,
                                    const OversampleRatios& ratios);

// 3 for span-bearing sentences, 1 otherwise by default.
std::vector<double> sampler_weights(const std::vector<bool>& has_spans,
                                    double positive_weight = 3.0);

// Draws `epoch_size` indices with replacement, P(i) proportional to
// weights[i]. Throws std::invalid_argument for non-positive weights.
std::vector<std::size_t> weighted_sampler(std::span<const double> weights, Rng& rng,
                                          std::size_t epoch_size);

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> parts;    // held-out part i
  std::vector<std::vector<std::string>> subsets;  // everything but part i
};

// Shuffles ids by seed and splits them into k parts whose sizes differ by
// at most one. Throws ValidationError if k < 2 or there are fewer ids than k.
FoldPlan kfold_subsets(std::span<const std::string> doc_ids, std::size_t k,
                       std::uint64_t seed);

// One doc id per line after '#' header comments.
std::string fold_manifest(const FoldPlan& plan, std::size_t fold);
std::vector<std::string> parse_manifest(std::string_view text);

}  // namespace toxtag

#endif  // TOXTAG_FILTER_SAMPLING_H_
