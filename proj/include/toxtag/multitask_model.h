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

// Shared-representation tagger with a trigger CRF head and an argument CRF
// head, trained on the weighted sum of the two negative log-likelihoods.

#ifndef TOXTAG_MULTITASK_MODEL_H_
#define TOXTAG_MULTITASK_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxtag/adamw.h"
#include "toxtag/bio_codec.h"
#include "toxtag/corpus_io.h"
#include "toxtag/crf.h"
#include "toxtag/encoder.h"
#include "toxtag/filter_sampling.h"
#include "toxtag/rng.h"

namespace toxtag {

enum class Strategy { kNone, kLabelWeighted, kOversample, kWeightedSampler };

std::string_view strategy_name(Strategy strategy);
// Accepts none, label-weighted, oversample, weighted-sampler.
Strategy parse_strategy(std::string_view name);

struct TrainingConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double learning_rate = 5e-5;
  std::size_t batch_size = 8;
  int epochs = 5;
  double dropout = 0.1;
  std::size_t max_tokens = 512;
  AdamWConfig adam;
  std::uint64_t seed = 42;
  Strategy strategy = Strategy::kNone;
  OversampleRatios oversample_ratios = {{"Drug", 9}, {"Alcohol", 3}, {"Tobacco", 2}, {"Cannabis", 2}};
  double sampler_positive_weight = 3.0;
  double init_scale = 0.1;
  bool constrain_bio = false;

  bool operator==(const TrainingConfig&) const = default;
};

// Throws ValidationError.
void validate(const TrainingConfig& config);

struct MultiOutputModel {
  EmbedderConfig embedder_config;
  LabelScheme trigger_scheme = LabelScheme::for_task(Task::kTrigger);
  LabelScheme argument_scheme = LabelScheme::for_task(Task::kArgument);
  CrfHead trigger;
  CrfHead argument;
  std::size_t max_tokens = 512;
  bool constrain_bio = false;
  std::shared_ptr<const Embedder> embedder;

  const CrfHead& head(Task task) const { return task == Task::kTrigger ? trigger : argument; }
  const LabelScheme& scheme(Task task) const {
    return task == Task::kTrigger ? trigger_scheme : argument_scheme;
  }
  // Transition matrix used for inference and the likelihood, with the BIO
  // mask added when constrain_bio is set.
  Matrix effective_transitions(Task task) const;
  // Emission scores of one head. With constrain_bio set, inside tags are
  // also ruled out on the first token.
  Matrix head_emissions(Task task, const Matrix& embeddings) const;

  // Heads initialized per TrainingConfig::init_scale from `rng`.
  static MultiOutputModel create(const EmbedderConfig& embedder, const TrainingConfig& config,
                                 Rng& rng);
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::string subset_id = "full";
  std::string strategy = "none";
  double final_loss = 0.0;
  std::vector<double> epoch_losses;
};

struct ModelCheckpoint {
  MultiOutputModel model;
  TrainingConfig config;
  RunMetadata metadata;
};

// alpha * l_tr + beta * l_arg. Throws std::invalid_argument for negative
// losses or weights.
double joint_loss(double trigger_loss, double argument_loss, double alpha, double beta);

// One segment with fixed encoder output and gold tags for both heads.
struct TrainingExample {
  Matrix embeddings;
  TagSequence trigger_tags;
  TagSequence argument_tags;
  std::vector<double> trigger_weights;   // empty: unweighted
  std::vector<double> argument_weights;  // empty: unweighted
  std::vector<std::string> trigger_labels;
  bool has_spans = false;
};

// Segments every document, embeds it and encodes gold spans. Spans that
// cross a sentence or segment boundary are dropped with a warning.
std::vector<TrainingExample> build_examples(const MultiOutputModel& model,
                                            std::span<const Document> corpus);

struct ModelGradients {
  HeadGradients trigger;
  HeadGradients argument;
};

struct BatchLoss {
  double loss = 0.0;
  ModelGradients gradients;
};

// Mean joint loss over the batch and its gradient with respect to both
// heads. Dropout is applied to the embeddings with config.dropout.
// Throws std::invalid_argument if gold tags do not match the token count.
BatchLoss forward_loss(const MultiOutputModel& model,
                       std::span<const TrainingExample* const> batch,
                       const TrainingConfig& config, Rng& rng);

struct SubsetSelector {
  std::string id = "full";
  std::optional<std::vector<std::string>> doc_ids;  // nullopt: all documents
};

// Called after each epoch with the 1-based epoch number and its mean loss.
// Returning false stops training early.
using EpochCallback = std::function<bool(int epoch, double mean_loss)>;

// Throws ValidationError for an invalid config or an empty effective corpus.
ModelCheckpoint train(std::span<const Document> corpus, const TrainingConfig& config,
                      const EmbedderConfig& embedder, const SubsetSelector& subset = {},
                      const EpochCallback& on_epoch = {});

struct DocumentTags {
  std::vector<Segment> segments;
  std::vector<TagSequence> trigger;
  std::vector<TagSequence> argument;
};

struct Prediction {
  std::vector<AnnotatedSpan> triggers;
  std::vector<AnnotatedSpan> arguments;
};

// Word-level Viterbi tags per segment. Segments of sentences rejected by
// `filter` are all O.
DocumentTags tag_document(const MultiOutputModel& model, const Document& doc,
                          const FilterModel* filter = nullptr);

// Repairs, decodes and numbers spans for both heads.
Prediction spans_from_tags(const Document& doc, const DocumentTags& tags,
                           const LabelScheme& trigger_scheme,
                           const LabelScheme& argument_scheme);

Prediction predict(const MultiOutputModel& model, const Document& doc,
                   const FilterModel* filter = nullptr);

std::string serialize_checkpoint(const ModelCheckpoint& checkpoint);
// Throws CheckpointError.
ModelCheckpoint deserialize_checkpoint(std::string_view text);
void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path);
ModelCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace toxtag

#endif  // TOXTAG_MULTITASK_MODEL_H_
