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

#include "toxtag/multitask_model.h"

#include <algorithm>
#include <numeric>
#include <limits>
#include <set>
#include <stdexcept>

#include "serialization.h"
#include "toxtag/error.h"
#include "toxtag/log.h"

namespace toxtag {
namespace {

constexpr std::string_view kModelFormat = "toxtag-model";
constexpr int kModelVersion = 1;

void apply_update(AdamW& optimizer, std::size_t first_slot, CrfHead& head,
                  const HeadGradients& grads) {
  optimizer.update(first_slot, as_span(head.weights), as_span(grads.weights));
  optimizer.update(first_slot + 1, as_span(head.bias), as_span(grads.bias));
  optimizer.update(first_slot + 2, as_span(head.transitions), as_span(grads.transitions));
}

// Spans fully inside the segment; spans that straddle it are reported once
// and skipped.
std::vector<AnnotatedSpan> spans_within(const std::vector<AnnotatedSpan>& spans,
                                        const Segment& seg, std::string_view doc_id,
                                        std::set<const AnnotatedSpan*>& reported) {
  std::vector<AnnotatedSpan> out;
  const std::size_t lo = seg.start(), hi = seg.end();
  for (const auto& s : spans) {
    if (s.end <= lo || s.start >= hi) continue;
    if (s.start >= lo && s.end <= hi) {
      out.push_back(s);
    } else if (reported.insert(&s).second) {
      warn("document '" + std::string(doc_id) + "': span " + s.id + " [" +
           std::to_string(s.start) + ", " + std::to_string(s.end) +
           ") crosses a sentence or segment boundary and is not used for training");
    }
  }
  return out;
}

// Shuffled buckets, each sorted by length, cut into batches whose order is
// shuffled again.
std::vector<std::vector<std::size_t>> make_batches(std::vector<std::size_t> indices,
                                                   const std::vector<TrainingExample>& examples,
                                                   std::size_t batch_size, Rng& rng) {
  rng.shuffle(std::span<std::size_t>(indices));
  const std::size_t bucket = batch_size * 4;
  for (std::size_t b = 0; b < indices.size(); b += bucket) {
    const auto first = indices.begin() + static_cast<long>(b);
    const auto last = indices.begin() + static_cast<long>(std::min(indices.size(), b + bucket));
    std::stable_sort(first, last, [&](std::size_t x, std::size_t y) {
      return examples[x].embeddings.rows() < examples[y].embeddings.rows();
    });
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t b = 0; b < indices.size(); b += batch_size) {
    batches.emplace_back(indices.begin() + static_cast<long>(b),
                         indices.begin() + static_cast<long>(std::min(indices.size(), b + batch_size)));
  }
  rng.shuffle(std::span<std::vector<std::size_t>>(batches));
  return batches;
}

std::vector<double> token_weights(const TagSequence& tags, const std::vector<double>& per_tag) {
  std::vector<double> w;
  w.reserve(tags.size());
  for (int t : tags) w.push_back(per_tag[static_cast<std::size_t>(t)]);
  return w;
}

internal::json scheme_to_json(const LabelScheme& s) {
  return internal::json{{"task", std::string(task_name(s.task()))}, {"categories", s.categories()}};
}

LabelScheme scheme_from_json(const internal::json& j) {
  const auto task = j.at("task").get<std::string>();
  if (task != "trigger" && task != "argument") throw CheckpointError("unknown task '" + task + "'");
  return LabelScheme(task == "trigger" ? Task::kTrigger : Task::kArgument,
                     j.at("categories").get<std::vector<std::string>>());
}

internal::json head_to_json(const CrfHead& h) {
  return internal::json{{"weights", internal::matrix_to_json(h.weights)},
                        {"bias", internal::vector_to_json(h.bias)},
                        {"transitions", internal::matrix_to_json(h.transitions)}};
}

CrfHead head_from_json(const internal::json& j) {
  return CrfHead{internal::matrix_from_json(j.at("weights")),
                 internal::vector_from_json(j.at("bias")),
                 internal::matrix_from_json(j.at("transitions"))};
}

internal::json config_to_json(const TrainingConfig& c) {
  return internal::json{{"alpha", c.alpha},
                        {"beta", c.beta},
                        {"learning_rate", c.learning_rate},
                        {"batch_size", c.batch_size},
                        {"epochs", c.epochs},
                        {"dropout", c.dropout},
                        {"max_tokens", c.max_tokens},
                        {"adam_beta1", c.adam.beta1},
                        {"adam_beta2", c.adam.beta2},
                        {"adam_epsilon", c.adam.epsilon},
                        {"weight_decay", c.adam.weight_decay},
                        {"seed", c.seed},
                        {"strategy", std::string(strategy_name(c.strategy))},
                        {"oversample_ratios", format_ratios(c.oversample_ratios)},
                        {"sampler_positive_weight", c.sampler_positive_weight},
                        {"init_scale", c.init_scale},
                        {"constrain_bio", c.constrain_bio}};
}

TrainingConfig config_from_json(const internal::json& j) {
  TrainingConfig c;
  c.alpha = j.at("alpha").get<double>();
  c.beta = j.at("beta").get<double>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.epochs = j.at("epochs").get<int>();
  c.dropout = j.at("dropout").get<double>();
  c.max_tokens = j.at("max_tokens").get<std::size_t>();
  c.adam.beta1 = j.at("adam_beta1").get<double>();
  c.adam.beta2 = j.at("adam_beta2").get<double>();
  c.adam.epsilon = j.at("adam_epsilon").get<double>();
  c.adam.weight_decay = j.at("weight_decay").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.strategy = parse_strategy(j.at("strategy").get<std::string>());
  c.oversample_ratios = parse_ratios(j.at("oversample_ratios").get<std::string>());
  c.sampler_positive_weight = j.at("sampler_positive_weight").get<double>();
  c.init_scale = j.at("init_scale").get<double>();
  c.constrain_bio = j.at("constrain_bio").get<bool>();
  return c;
}

}  // namespace

std::string_view strategy_name(Strategy strategy) {
  switch (strategy) {
    case Strategy::kNone: return "none";
    case Strategy::kLabelWeighted: return "label-weighted";
    case Strategy::kOversample: return "oversample";
    case Strategy::kWeightedSampler: return "weighted-sampler";
  }
  return "none";
}

Strategy parse_strategy(std::string_view name) {
  for (auto s : {Strategy::kNone, Strategy::kLabelWeighted, Strategy::kOversample,
                 Strategy::kWeightedSampler}) {
    if (strategy_name(s) == name) return s;
  }
  throw std::invalid_argument("unknown strategy '" + std::string(name) + "'");
}

void validate(const TrainingConfig& c) {
  if (!(c.alpha >= 0.0) || !(c.beta >= 0.0)) throw ValidationError("alpha and beta must be >= 0");
  if (!(c.learning_rate > 0.0)) throw ValidationError("learning rate must be > 0");
  if (c.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (c.batch_size < 1) throw ValidationError("batch size must be >= 1");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ValidationError("dropout must lie in [0, 1)");
  if (!(c.sampler_positive_weight > 0.0)) {
    throw ValidationError("sampler weight must be > 0");
  }
  try {
    validate(c.adam);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  for (const auto& [category, ratio] : c.oversample_ratios) {
    if (ratio < 1) throw ValidationError("oversampling ratio for " + category + " must be >= 1");
  }
}

Matrix MultiOutputModel::effective_transitions(Task task) const {
  const Matrix& t = head(task).transitions;
  if (!constrain_bio) return t;
  return t + bio_transition_mask(scheme(task));
}

Matrix MultiOutputModel::head_emissions(Task task, const Matrix& embeddings) const {
  Matrix e = emissions(embeddings, head(task));
  if (constrain_bio && e.rows() > 0) {
    for (int tag = 0; tag < scheme(task).size(); ++tag) {
      if (LabelScheme::is_inside(tag)) e(0, tag) = -std::numeric_limits<double>::infinity();
    }
  }
  return e;
}

MultiOutputModel MultiOutputModel::create(const EmbedderConfig& embedder,
                                          const TrainingConfig& config, Rng& rng) {
  MultiOutputModel model;
  model.embedder_config = embedder;
  model.embedder = make_embedder(embedder);
  model.max_tokens = config.max_tokens;
  model.constrain_bio = config.constrain_bio;
  const int d = model.embedder->dim();
  model.trigger = CrfHead::random(d, model.trigger_scheme.size(), config.init_scale, rng);
  model.argument = CrfHead::random(d, model.argument_scheme.size(), config.init_scale, rng);
  return model;
}

double joint_loss(double trigger_loss, double argument_loss, double alpha, double beta) {
  if (trigger_loss < 0.0 || argument_loss < 0.0) {
    throw std::invalid_argument("losses must be non-negative");
  }
  if (alpha < 0.0 || beta < 0.0) throw std::invalid_argument("loss weights must be non-negative");
  return alpha * trigger_loss + beta * argument_loss;
}

std::vector<TrainingExample> build_examples(const MultiOutputModel& model,
                                            std::span<const Document> corpus) {
  std::vector<TrainingExample> examples;
  for (const auto& doc : corpus) {
    std::set<const AnnotatedSpan*> reported;
    for (const auto& seg : segment_document(doc, model.max_tokens)) {
      if (seg.tokens.empty()) continue;
      TrainingExample ex;
      ex.embeddings = model.embedder->embed(seg);
      const auto triggers = spans_within(doc.trigger_spans, seg, doc.doc_id(), reported);
      const auto arguments = spans_within(doc.argument_spans, seg, doc.doc_id(), reported);
      ex.trigger_tags = encode_bio(seg.tokens, triggers, model.trigger_scheme);
      ex.argument_tags = encode_bio(seg.tokens, arguments, model.argument_scheme);
      ex.has_spans = !triggers.empty() || !arguments.empty();
      for (const auto& s : triggers) ex.trigger_labels.push_back(s.label);
      examples.push_back(std::move(ex));
    }
  }
  return examples;
}

BatchLoss forward_loss(const MultiOutputModel& model,
                       std::span<const TrainingExample* const> batch,
                       const TrainingConfig& config, Rng& rng) {
  BatchLoss out;
  out.gradients.trigger = HeadGradients::zeros_like(model.trigger);
  out.gradients.argument = HeadGradients::zeros_like(model.argument);
  if (batch.empty()) return out;
  const Matrix t_tr = model.effective_transitions(Task::kTrigger);
  const Matrix t_arg = model.effective_transitions(Task::kArgument);
  for (const TrainingExample* ex : batch) {
    const auto n = static_cast<std::size_t>(ex->embeddings.rows());
    if (ex->trigger_tags.size() != n || ex->argument_tags.size() != n) {
      throw std::invalid_argument("gold tags have lengths " +
                                  std::to_string(ex->trigger_tags.size()) + "/" +
                                  std::to_string(ex->argument_tags.size()) + " for " +
                                  std::to_string(n) + " tokens");
    }
    const Matrix h = apply_dropout(ex->embeddings, config.dropout, rng);
    const CrfGradients g_tr =
        nll_gradients(model.head_emissions(Task::kTrigger, h), t_tr, ex->trigger_tags,
                      ex->trigger_weights);
    const CrfGradients g_arg = nll_gradients(model.head_emissions(Task::kArgument, h), t_arg,
                                             ex->argument_tags, ex->argument_weights);
    // Round-off can push a near-zero NLL slightly negative.
    out.loss += joint_loss(std::max(0.0, g_tr.loss), std::max(0.0, g_arg.loss), config.alpha,
                           config.beta);
    HeadGradients tr = backprop_head(h, g_tr);
    HeadGradients arg = backprop_head(h, g_arg);
    tr *= config.alpha;
    arg *= config.beta;
    out.gradients.trigger += tr;
    out.gradients.argument += arg;
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv;
  out.gradients.trigger *= inv;
  out.gradients.argument *= inv;
  return out;
}

ModelCheckpoint train(std::span<const Document> corpus, const TrainingConfig& config,
                      const EmbedderConfig& embedder, const SubsetSelector& subset,
                      const EpochCallback& on_epoch) {
  validate(config);

  std::vector<Document> selected;
  if (subset.doc_ids) {
    std::set<std::string, std::less<>> wanted(subset.doc_ids->begin(), subset.doc_ids->end());
    std::set<std::string, std::less<>> found;
    for (const auto& doc : corpus) {
      if (wanted.count(doc.doc_id())) {
        selected.push_back(doc);
        found.insert(doc.doc_id());
      }
    }
    for (const auto& id : wanted) {
      if (!found.count(id)) {
        throw ValidationError("subset '" + subset.id + "' names unknown document '" + id + "'");
      }
    }
  } else {
    selected.assign(corpus.begin(), corpus.end());
  }
  if (selected.empty()) throw ValidationError("no documents left to train on");

  Rng rng(config.seed);
  ModelCheckpoint ckpt;
  ckpt.config = config;
  ckpt.model = MultiOutputModel::create(embedder, config, rng);
  MultiOutputModel& model = ckpt.model;

  std::vector<TrainingExample> examples = build_examples(model, selected);
  if (examples.empty()) throw ValidationError("training documents contain no tokens");

  std::vector<std::size_t> base(examples.size());
  std::iota(base.begin(), base.end(), 0);
  std::vector<double> sample_weights;

  switch (config.strategy) {
    case Strategy::kNone:
      break;
    case Strategy::kLabelWeighted: {
      std::vector<TagSequence> tr, arg;
      for (const auto& ex : examples) {
        tr.push_back(ex.trigger_tags);
        arg.push_back(ex.argument_tags);
      }
      const auto w_tr = class_weights(tr, model.trigger_scheme);
      const auto w_arg = class_weights(arg, model.argument_scheme);
      for (auto& ex : examples) {
        ex.trigger_weights = token_weights(ex.trigger_tags, w_tr);
        ex.argument_weights = token_weights(ex.argument_tags, w_arg);
      }
      break;
    }
    case Strategy::kOversample: {
      std::vector<std::vector<std::string>> labels;
      for (const auto& ex : examples) labels.push_back(ex.trigger_labels);
      base = oversample(labels, config.oversample_ratios);
      break;
    }
    case Strategy::kWeightedSampler: {
      std::vector<bool> flags;
      for (const auto& ex : examples) flags.push_back(ex.has_spans);
      sample_weights = sampler_weights(flags, config.sampler_positive_weight);
      break;
    }
  }

  AdamW optimizer(config.learning_rate, config.adam);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> indices =
        config.strategy == Strategy::kWeightedSampler
            ? weighted_sampler(sample_weights, rng, examples.size())
            : base;
    double total = 0.0;
    std::size_t seen = 0;
    for (const auto& batch_idx : make_batches(std::move(indices), examples, config.batch_size, rng)) {
      std::vector<const TrainingExample*> batch;
      for (std::size_t i : batch_idx) batch.push_back(&examples[i]);
      const BatchLoss result = forward_loss(model, batch, config, rng);
      total += result.loss * static_cast<double>(batch.size());
      seen += batch.size();
      optimizer.next_step();
      apply_update(optimizer, 0, model.trigger, result.gradients.trigger);
      apply_update(optimizer, 3, model.argument, result.gradients.argument);
    }
    const double mean = total / static_cast<double>(seen);
    ckpt.metadata.epoch_losses.push_back(mean);
    if (on_epoch && !on_epoch(epoch, mean)) break;
  }

  ckpt.metadata.seed = config.seed;
  ckpt.metadata.subset_id = subset.id;
  ckpt.metadata.strategy = std::string(strategy_name(config.strategy));
  ckpt.metadata.final_loss = ckpt.metadata.epoch_losses.back();
  return ckpt;
}

DocumentTags tag_document(const MultiOutputModel& model, const Document& doc,
                          const FilterModel* filter) {
  DocumentTags out;
  const Matrix t_tr = model.effective_transitions(Task::kTrigger);
  const Matrix t_arg = model.effective_transitions(Task::kArgument);
  for (const auto& sentence : segment_sentences(doc)) {
    const bool keep = filter == nullptr || filter->keep(sentence);
    for (auto& seg : split_segments(sentence, model.max_tokens)) {
      if (seg.tokens.empty()) continue;
      if (!keep) {
        out.trigger.emplace_back(seg.tokens.size(), LabelScheme::kOutside);
        out.argument.emplace_back(seg.tokens.size(), LabelScheme::kOutside);
      } else {
        const Matrix h = model.embedder->embed(seg);
        out.trigger.push_back(viterbi_decode(model.head_emissions(Task::kTrigger, h), t_tr));
        out.argument.push_back(viterbi_decode(model.head_emissions(Task::kArgument, h), t_arg));
      }
      out.segments.push_back(std::move(seg));
    }
  }
  return out;
}

Prediction spans_from_tags(const Document& doc, const DocumentTags& tags,
                           const LabelScheme& trigger_scheme,
                           const LabelScheme& argument_scheme) {
  Prediction p;
  for (std::size_t i = 0; i < tags.segments.size(); ++i) {
    const auto& tokens = tags.segments[i].tokens;
    for (auto& s : decode_bio(tokens, repair_bio(tags.trigger[i]), trigger_scheme, doc.units())) {
      p.triggers.push_back(std::move(s));
    }
    for (auto& s : decode_bio(tokens, repair_bio(tags.argument[i]), argument_scheme, doc.units())) {
      p.arguments.push_back(std::move(s));
    }
  }
  number_spans(p.triggers);
  number_spans(p.arguments);
  return p;
}

Prediction predict(const MultiOutputModel& model, const Document& doc, const FilterModel* filter) {
  return spans_from_tags(doc, tag_document(model, doc, filter), model.trigger_scheme,
                         model.argument_scheme);
}

std::string serialize_checkpoint(const ModelCheckpoint& ckpt) {
  const auto& m = ckpt.model;
  internal::json j;
  j["format"] = kModelFormat;
  j["version"] = kModelVersion;
  j["embedder"] = internal::embedder_to_json(m.embedder_config);
  j["trigger_scheme"] = scheme_to_json(m.trigger_scheme);
  j["argument_scheme"] = scheme_to_json(m.argument_scheme);
  j["trigger_head"] = head_to_json(m.trigger);
  j["argument_head"] = head_to_json(m.argument);
  j["max_tokens"] = m.max_tokens;
  j["constrain_bio"] = m.constrain_bio;
  j["training"] = config_to_json(ckpt.config);
  j["metadata"] = internal::json{{"seed", ckpt.metadata.seed},
                                 {"subset_id", ckpt.metadata.subset_id},
                                 {"strategy", ckpt.metadata.strategy},
                                 {"final_loss", ckpt.metadata.final_loss},
                                 {"epoch_losses", ckpt.metadata.epoch_losses}};
  return j.dump(1) + "\n";
}

ModelCheckpoint deserialize_checkpoint(std::string_view text) {
  const auto j = internal::parse_container(text, kModelFormat, kModelVersion);
  ModelCheckpoint ckpt;
  auto& m = ckpt.model;
  try {
    m.embedder_config = internal::embedder_from_json(j.at("embedder"));
    m.trigger_scheme = scheme_from_json(j.at("trigger_scheme"));
    m.argument_scheme = scheme_from_json(j.at("argument_scheme"));
    m.trigger = head_from_json(j.at("trigger_head"));
    m.argument = head_from_json(j.at("argument_head"));
    m.max_tokens = j.at("max_tokens").get<std::size_t>();
    m.constrain_bio = j.at("constrain_bio").get<bool>();
    ckpt.config = config_from_json(j.at("training"));
    const auto& meta = j.at("metadata");
    ckpt.metadata.seed = meta.at("seed").get<std::uint64_t>();
    ckpt.metadata.subset_id = meta.at("subset_id").get<std::string>();
    ckpt.metadata.strategy = meta.at("strategy").get<std::string>();
    ckpt.metadata.final_loss = meta.at("final_loss").get<double>();
    ckpt.metadata.epoch_losses = meta.at("epoch_losses").get<std::vector<double>>();
  } catch (const internal::json::exception& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed checkpoint: ") + e.what());
  }
  for (Task task : {Task::kTrigger, Task::kArgument}) {
    const CrfHead& h = m.head(task);
    const int c = m.scheme(task).size();
    if (h.weights.cols() != c || h.bias.size() != c || h.transitions.rows() != c ||
        h.transitions.cols() != c) {
      throw CheckpointError(std::string(task_name(task)) + " head shape does not match its scheme");
    }
  }
  if (m.trigger.weights.rows() != m.argument.weights.rows()) {
    throw CheckpointError("heads disagree on the embedding dimension");
  }
  m.embedder = make_embedder(m.embedder_config);
  if (m.embedder->dim() != m.trigger.dim()) {
    throw CheckpointError("head dimension does not match the embedder");
  }
  return ckpt;
}

void save_checkpoint(const ModelCheckpoint& checkpoint, const std::filesystem::path& path) {
  write_file(path, serialize_checkpoint(checkpoint));
}

ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_file(path));
}

}  // namespace toxtag
