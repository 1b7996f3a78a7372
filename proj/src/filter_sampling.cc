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

#include "toxtag/filter_sampling.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "serialization.h"
#include "toxtag/error.h"

namespace toxtag {
namespace {

constexpr std::string_view kFilterFormat = "toxtag-filter";
constexpr int kFilterVersion = 1;

bool overlaps(std::size_t a_start, std::size_t a_end, std::size_t b_start, std::size_t b_end) {
  return a_start < b_end && b_start < a_end;
}

Vector softmax2(const Vector& logits) {
  const double m = logits.maxCoeff();
  Vector p = (logits.array() - m).exp();
  return p / p.sum();
}

}  // namespace

std::vector<LabeledSentence> build_filter_dataset(std::span<const Document> corpus) {
  std::vector<LabeledSentence> out;
  for (const auto& doc : corpus) {
    for (auto& sentence : segment_sentences(doc)) {
      bool positive = false;
      for (const auto* spans : {&doc.trigger_spans, &doc.argument_spans}) {
        for (const auto& s : *spans) {
          positive = positive || overlaps(sentence.start, sentence.end, s.start, s.end);
        }
      }
      out.push_back(LabeledSentence{std::move(sentence), positive});
    }
  }
  return out;
}

Vector mean_pool(const Matrix& embeddings, int dim) {
  if (embeddings.rows() == 0) return Vector::Zero(dim);
  return embeddings.colwise().mean().transpose();
}

double FilterModel::positive_probability(const Sentence& sentence) const {
  const Matrix h = embedder->embed(sentence.tokens,
                                   SegmentKey{sentence.doc_id, sentence.index, 0});
  const Vector x = mean_pool(h, static_cast<int>(weights.rows()));
  const Vector logits = weights.transpose() * x + bias;
  return softmax2(logits)(1);
}

void validate(const FilterConfig& config) {
  if (!(config.learning_rate > 0.0)) throw ValidationError("filter learning rate must be > 0");
  if (config.epochs < 1) throw ValidationError("filter epochs must be at least 1");
  if (config.batch_size < 1) throw ValidationError("filter batch size must be at least 1");
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
    throw ValidationError("filter dropout must lie in [0, 1)");
  }
  if (!(config.threshold > 0.0 && config.threshold < 1.0)) {
    throw ValidationError("filter threshold must lie in (0, 1)");
  }
  try {
    validate(config.adam);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

FilterModel train_filter(std::span<const LabeledSentence> data, const EmbedderConfig& embedder,
                         const FilterConfig& config) {
  if (data.empty()) throw ValidationError("sentence filter needs training data");
  const auto positives = std::count_if(data.begin(), data.end(),
                                       [](const LabeledSentence& s) { return s.positive; });
  if (positives == 0 || positives == static_cast<long>(data.size())) {
    throw ValidationError("sentence filter needs both positive and negative sentences");
  }
  validate(config);

  FilterModel model;
  model.embedder_config = embedder;
  model.embedder = make_embedder(embedder);
  model.threshold = config.threshold;
  const int dim = model.embedder->dim();

  Rng rng(config.seed);
  model.weights = Matrix(dim, 2);
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) {
    model.weights.data()[i] = (2.0 * rng.uniform() - 1.0) * 0.1;
  }
  model.bias = Vector::Zero(2);

  std::vector<Matrix> inputs;
  inputs.reserve(data.size());
  for (const auto& item : data) {
    inputs.push_back(model.embedder->embed(
        item.sentence.tokens, SegmentKey{item.sentence.doc_id, item.sentence.index, 0}));
  }

  AdamW optimizer(config.learning_rate, config.adam);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t stop = std::min(order.size(), b + config.batch_size);
      Matrix grad_w = Matrix::Zero(dim, 2);
      Vector grad_b = Vector::Zero(2);
      for (std::size_t k = b; k < stop; ++k) {
        const std::size_t idx = order[k];
        const Vector x = mean_pool(apply_dropout(inputs[idx], config.dropout, rng), dim);
        Vector delta = softmax2(model.weights.transpose() * x + model.bias);
        delta(data[idx].positive ? 1 : 0) -= 1.0;
        grad_w += x * delta.transpose();
        grad_b += delta;
      }
      const double inv = 1.0 / static_cast<double>(stop - b);
      grad_w *= inv;
      grad_b *= inv;
      optimizer.next_step();
      optimizer.update(0, as_span(model.weights), as_span(grad_w));
      optimizer.update(1, as_span(model.bias), as_span(grad_b));
    }
  }
  return model;
}

std::vector<Sentence> filter_sentences(const FilterModel& filter,
                                       std::span<const Sentence> sentences) {
  std::vector<Sentence> kept;
  for (const auto& s : sentences) {
    if (filter.keep(s)) kept.push_back(s);
  }
  return kept;
}

std::string serialize_filter(const FilterModel& filter) {
  internal::json j;
  j["format"] = kFilterFormat;
  j["version"] = kFilterVersion;
  j["embedder"] = internal::embedder_to_json(filter.embedder_config);
  j["weights"] = internal::matrix_to_json(filter.weights);
  j["bias"] = internal::vector_to_json(filter.bias);
  j["threshold"] = filter.threshold;
  return j.dump(1) + "\n";
}

FilterModel deserialize_filter(std::string_view text) {
  const auto j = internal::parse_container(text, kFilterFormat, kFilterVersion);
  FilterModel model;
  try {
    model.embedder_config = internal::embedder_from_json(j.at("embedder"));
    model.weights = internal::matrix_from_json(j.at("weights"));
    model.bias = internal::vector_from_json(j.at("bias"));
    model.threshold = j.at("threshold").get<double>();
  } catch (const internal::json::exception& e) {
    throw CheckpointError(std::string("malformed filter file: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw CheckpointError(std::string("malformed filter file: ") + e.what());
  }
  if (model.weights.cols() != 2 || model.bias.size() != 2) {
    throw CheckpointError("filter weights must have two output classes");
  }
  model.embedder = make_embedder(model.embedder_config);
  if (model.embedder->dim() != model.weights.rows()) {
    throw CheckpointError("filter weights do not match the embedder dimension");
  }
  return model;
}

void save_filter(const FilterModel& filter, const std::filesystem::path& path) {
  write_file(path, serialize_filter(filter));
}

FilterModel load_filter(const std::filesystem::path& path) {
  return deserialize_filter(read_file(path));
}

std::vector<double> class_weights(std::span<const TagSequence> sequences,
                                  const LabelScheme& scheme) {
  return class_weights(sequences, scheme.size());
}

std::vector<double> class_weights(std::span<const TagSequence> sequences, int num_tags) {
  if (num_tags < 1) throw ValidationError("class weights need at least one tag");
  const auto c = static_cast<std::size_t>(num_tags);
  std::vector<std::size_t> counts(c, 0);
  std::size_t total = 0;
  for (const auto& seq : sequences) {
    for (int tag : seq) {
      counts.at(static_cast<std::size_t>(tag)) += 1;
      ++total;
    }
  }
  if (total == 0) throw ValidationError("class weights need at least one tagged token");
  std::vector<double> weights(c, 0.0);
  double max_weight = 0.0;
  for (std::size_t t = 0; t < c; ++t) {
    if (counts[t] == 0) continue;
    weights[t] = static_cast<double>(total) /
                 (static_cast<double>(c) * static_cast<double>(counts[t]));
    max_weight = std::max(max_weight, weights[t]);
  }
  for (std::size_t t = 0; t < c; ++t) {
    if (counts[t] == 0) weights[t] = max_weight;
  }
  return weights;
}

namespace {

const std::vector<std::string>& ratio_order() {
  static const std::vector<std::string> order = {"Drug", "Alcohol", "Tobacco", "Cannabis"};
  return order;
}

}  // namespace

OversampleRatios parse_ratios(std::string_view text) {
  OversampleRatios ratios;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < ratio_order().size(); ++k) {
    const std::size_t dash = text.find('-', pos);
    const bool last = k + 1 == ratio_order().size();
    if (last != (dash == std::string_view::npos)) {
      throw std::invalid_argument("ratios must look like 9-3-2-2, got '" + std::string(text) + "'");
    }
    const std::string_view field = text.substr(pos, last ? std::string_view::npos : dash - pos);
    int value = 0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, value);
    if (ec != std::errc() || ptr != end || value < 1) {
      throw std::invalid_argument("ratio '" + std::string(field) + "' must be an integer >= 1");
    }
    ratios[ratio_order()[k]] = value;
    pos = dash + 1;
  }
  return ratios;
}

std::string format_ratios(const OversampleRatios& ratios) {
  std::string out;
  for (const auto& category : ratio_order()) {
    if (!out.empty()) out += '-';
    const auto it = ratios.find(category);
    out += std::to_string(it == ratios.end() ? 1 : it->second);
  }
  return out;
}

std::vector<std::size_t> oversample(std::span<const std::vector<std::string>> trigger_labels,
                                    const OversampleRatios& ratios) {
  for (const auto& [category, ratio] : ratios) {
    if (ratio < 1) throw std::invalid_argument("ratio for " + category + " must be >= 1");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < trigger_labels.size(); ++i) {
    int copies = 1;
    for (const auto& label : trigger_labels[i]) {
      const auto it = ratios.find(label);
      if (it != ratios.end()) copies = std::max(copies, it->second);
    }
    out.insert(out.end(), static_cast<std::size_t>(copies), i);
  }
  return out;
}

std::vector<double> sampler_weights(const std::vector<bool>& has_spans, double positive_weight) {
  std::vector<double> w;
  w.reserve(has_spans.size());
  for (bool b : has_spans) w.push_back(b ? positive_weight : 1.0);
  return w;
}

std::vector<std::size_t> weighted_sampler(std::span<const double> weights, Rng& rng,
                                          std::size_t epoch_size) {
  if (weights.empty()) throw std::invalid_argument("weighted sampler needs at least one item");
  std::vector<double> cumulative(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i])) {
      throw std::invalid_argument("sampling weights must be positive and finite");
    }
    total += weights[i];
    cumulative[i] = total;
  }
  std::vector<std::size_t> out;
  out.reserve(epoch_size);
  for (std::size_t k = 0; k < epoch_size; ++k) {
    const double u = rng.uniform() * total;
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
  }
  return out;
}

FoldPlan kfold_subsets(std::span<const std::string> doc_ids, std::size_t k,
                       std::uint64_t seed) {
  if (k < 2) throw ValidationError("k-fold needs k >= 2, got " + std::to_string(k));
  if (doc_ids.size() < k) {
    throw ValidationError("cannot split " + std::to_string(doc_ids.size()) +
                          " documents into " + std::to_string(k) + " folds");
  }
  std::vector<std::size_t> order(doc_ids.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  std::vector<std::size_t> part_of(doc_ids.size());
  const std::size_t base = doc_ids.size() / k;
  const std::size_t extra = doc_ids.size() % k;
  std::size_t pos = 0;
  for (std::size_t p = 0; p < k; ++p) {
    const std::size_t size = base + (p < extra ? 1 : 0);
    std::vector<std::size_t> members(order.begin() + pos, order.begin() + pos + size);
    std::sort(members.begin(), members.end());
    std::vector<std::string> part;
    for (std::size_t m : members) {
      part.push_back(doc_ids[m]);
      part_of[m] = p;
    }
    plan.parts.push_back(std::move(part));
    pos += size;
  }
  for (std::size_t p = 0; p < k; ++p) {
    std::vector<std::string> subset;
    for (std::size_t i = 0; i < doc_ids.size(); ++i) {
      if (part_of[i] != p) subset.push_back(doc_ids[i]);
    }
    plan.subsets.push_back(std::move(subset));
  }
  return plan;
}

std::string fold_manifest(const FoldPlan& plan, std::size_t fold) {
  std::ostringstream out;
  out << "# subset " << fold << " of k=" << plan.k << ", seed " << plan.seed << "\n";
  out << "# held out: " << plan.parts.at(fold).size() << " documents\n";
  for (const auto& id : plan.subsets.at(fold)) out << id << "\n";
  return out.str();
}

std::vector<std::string> parse_manifest(std::string_view text) {
  std::vector<std::string> ids;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    ids.push_back(line);
  }
  return ids;
}

}  // namespace toxtag
