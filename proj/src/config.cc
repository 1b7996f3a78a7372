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

#include "toxtag/config.h"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>

#include "toxtag/error.h"

namespace toxtag {
namespace {

struct Field {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename T>
T parse_number(const std::string& value) {
  T out{};
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (value.empty() || ec != std::errc() || ptr != last) {
    throw std::invalid_argument("'" + value + "' is not a valid number");
  }
  return out;
}

bool parse_bool(const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("'" + value + "' is not a boolean");
}

std::string show(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) {
    if (!out.empty()) out += ',';
    out += i;
  }
  return out;
}

unsigned parse_features(const std::string& value) {
  unsigned f = 0;
  for (const auto& name : split_list(value)) {
    if (name == "lower") f |= kLowercase;
    else if (name == "prefix") f |= kPrefix3;
    else if (name == "suffix") f |= kSuffix3;
    else if (name == "shape") f |= kShape;
    else throw std::invalid_argument("unknown feature template '" + name + "'");
  }
  if (f == 0) throw std::invalid_argument("no feature templates given");
  return f;
}

std::string show_features(unsigned f) {
  std::vector<std::string> names;
  if (f & kLowercase) names.push_back("lower");
  if (f & kPrefix3) names.push_back("prefix");
  if (f & kSuffix3) names.push_back("suffix");
  if (f & kShape) names.push_back("shape");
  return join(names);
}

template <typename T>
T positive(T v, const char* what) {
  if (!(v > T{})) throw std::invalid_argument(std::string(what) + " must be positive");
  return v;
}

#define TOXTAG_STRING_FIELD(key, member)                                   \
  {key, Field{[](RunConfig& c, const std::string& v) { c.member = v; },    \
              [](const RunConfig& c) { return c.member; }}}

#define TOXTAG_DOUBLE_FIELD(key, member)                                                   \
  {key, Field{[](RunConfig& c, const std::string& v) { c.member = parse_number<double>(v); }, \
              [](const RunConfig& c) { return show(c.member); }}}

#define TOXTAG_SIZE_FIELD(key, member)                                                          \
  {key, Field{[](RunConfig& c, const std::string& v) {                                         \
                c.member = positive(parse_number<std::size_t>(v), key);                        \
              },                                                                                \
              [](const RunConfig& c) { return std::to_string(c.member); }}}

#define TOXTAG_SEED_FIELD(key, member)                                                        \
  {key, Field{[](RunConfig& c, const std::string& v) {                                       \
                c.member = parse_number<std::uint64_t>(v);                                   \
              },                                                                              \
              [](const RunConfig& c) { return std::to_string(c.member); }}}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = {
      TOXTAG_STRING_FIELD("data_dir", data_dir),
      TOXTAG_STRING_FIELD("output_dir", output_dir),
      TOXTAG_STRING_FIELD("gold_dir", gold_dir),
      TOXTAG_STRING_FIELD("pred_dir", pred_dir),
      TOXTAG_STRING_FIELD("checkpoint", checkpoint),
      TOXTAG_STRING_FIELD("filter_checkpoint", filter_checkpoint),
      TOXTAG_STRING_FIELD("subset_manifest", subset_manifest),
      TOXTAG_STRING_FIELD("subset_id", subset_id),
      TOXTAG_STRING_FIELD("embeddings_file", embedder.embeddings_path),
      {"members", Field{[](RunConfig& c, const std::string& v) { c.ensemble.members = split_list(v); },
                        [](const RunConfig& c) { return join(c.ensemble.members); }}},
      {"tie_break", Field{[](RunConfig& c, const std::string& v) {
                            c.ensemble.tie_break = parse_tie_break(v);
                          },
                          [](const RunConfig& c) {
                            return std::string(tie_break_name(c.ensemble.tie_break));
                          }}},
      TOXTAG_DOUBLE_FIELD("alpha", training.alpha),
      TOXTAG_DOUBLE_FIELD("beta", training.beta),
      TOXTAG_DOUBLE_FIELD("learning_rate", training.learning_rate),
      TOXTAG_SIZE_FIELD("batch_size", training.batch_size),
      {"epochs", Field{[](RunConfig& c, const std::string& v) {
                         c.training.epochs = positive(parse_number<int>(v), "epochs");
                       },
                       [](const RunConfig& c) { return std::to_string(c.training.epochs); }}},
      {"dropout", Field{[](RunConfig& c, const std::string& v) {
                          c.training.dropout = parse_number<double>(v);
                          c.embedder.dropout = c.training.dropout;
                        },
                        [](const RunConfig& c) { return show(c.training.dropout); }}},
      TOXTAG_SIZE_FIELD("max_tokens", training.max_tokens),
      TOXTAG_DOUBLE_FIELD("adam_beta1", training.adam.beta1),
      TOXTAG_DOUBLE_FIELD("adam_beta2", training.adam.beta2),
      TOXTAG_DOUBLE_FIELD("adam_epsilon", training.adam.epsilon),
      TOXTAG_DOUBLE_FIELD("weight_decay", training.adam.weight_decay),
      TOXTAG_SEED_FIELD("seed", training.seed),
      {"strategy", Field{[](RunConfig& c, const std::string& v) {
                           c.training.strategy = parse_strategy(v);
                         },
                         [](const RunConfig& c) {
                           return std::string(strategy_name(c.training.strategy));
                         }}},
      {"oversample_ratios", Field{[](RunConfig& c, const std::string& v) {
                                    c.training.oversample_ratios = parse_ratios(v);
                                  },
                                  [](const RunConfig& c) {
                                    return format_ratios(c.training.oversample_ratios);
                                  }}},
      TOXTAG_DOUBLE_FIELD("sampler_positive_weight", training.sampler_positive_weight),
      TOXTAG_DOUBLE_FIELD("init_scale", training.init_scale),
      {"constrain_bio", Field{[](RunConfig& c, const std::string& v) {
                                c.training.constrain_bio = parse_bool(v);
                              },
                              [](const RunConfig& c) {
                                return std::string(c.training.constrain_bio ? "true" : "false");
                              }}},
      {"embedder", Field{[](RunConfig& c, const std::string& v) {
                           c.embedder.kind = parse_embedder_kind(v);
                         },
                         [](const RunConfig& c) {
                           return std::string(embedder_kind_name(c.embedder.kind));
                         }}},
      {"embedding_dim", Field{[](RunConfig& c, const std::string& v) {
                                c.embedder.dim = positive(parse_number<int>(v), "embedding_dim");
                              },
                              [](const RunConfig& c) { return std::to_string(c.embedder.dim); }}},
      TOXTAG_SEED_FIELD("hash_seed", embedder.hash_seed),
      {"context_window", Field{[](RunConfig& c, const std::string& v) {
                                 c.embedder.context_window = parse_number<int>(v);
                                 if (c.embedder.context_window < 0) {
                                   throw std::invalid_argument("context_window must be >= 0");
                                 }
                               },
                               [](const RunConfig& c) {
                                 return std::to_string(c.embedder.context_window);
                               }}},
      {"features", Field{[](RunConfig& c, const std::string& v) {
                           c.embedder.features = parse_features(v);
                         },
                         [](const RunConfig& c) { return show_features(c.embedder.features); }}},
      TOXTAG_DOUBLE_FIELD("filter_learning_rate", filter.learning_rate),
      TOXTAG_SIZE_FIELD("filter_batch_size", filter.batch_size),
      {"filter_epochs", Field{[](RunConfig& c, const std::string& v) {
                                c.filter.epochs = positive(parse_number<int>(v), "filter_epochs");
                              },
                              [](const RunConfig& c) { return std::to_string(c.filter.epochs); }}},
      TOXTAG_DOUBLE_FIELD("filter_dropout", filter.dropout),
      TOXTAG_DOUBLE_FIELD("filter_weight_decay", filter.adam.weight_decay),
      TOXTAG_DOUBLE_FIELD("filter_threshold", filter.threshold),
      TOXTAG_SEED_FIELD("filter_seed", filter.seed),
      {"folds", Field{[](RunConfig& c, const std::string& v) {
                        c.folds = parse_number<std::size_t>(v);
                        if (c.folds < 2) throw std::invalid_argument("folds must be >= 2");
                      },
                      [](const RunConfig& c) { return std::to_string(c.folds); }}},
      TOXTAG_SEED_FIELD("fold_seed", fold_seed),
  };
  return table;
}

#undef TOXTAG_STRING_FIELD
#undef TOXTAG_DOUBLE_FIELD
#undef TOXTAG_SIZE_FIELD
#undef TOXTAG_SEED_FIELD

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) {
      throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    try {
      it->second.set(config, value);
      validate(config.training);
      validate(config.embedder);
      validate(config.filter);
    } catch (const std::exception& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": invalid value for '" + key +
                        "': " + e.what());
    }
  }
  return config;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, f] : fields()) keys.push_back(k);
  return keys;
}

void require_paths(const RunConfig& c, std::string_view verb) {
  namespace fs = std::filesystem;
  std::vector<std::pair<std::string, std::string>> inputs;
  bool needs_output = true;
  if (verb == "stats" || verb == "kfold" || verb == "train-filter" || verb == "train") {
    inputs.emplace_back("data_dir", c.data_dir);
  } else if (verb == "predict") {
    inputs.emplace_back("data_dir", c.data_dir);
    inputs.emplace_back("checkpoint", c.checkpoint);
  } else if (verb == "ensemble") {
    inputs.emplace_back("data_dir", c.data_dir);
    if (c.ensemble.members.empty()) {
      throw ConfigError("missing required key 'members' for verb '" + std::string(verb) + "'");
    }
    for (const auto& m : c.ensemble.members) inputs.emplace_back("members", m);
  } else if (verb == "evaluate") {
    inputs.emplace_back("gold_dir", c.gold_dir);
    inputs.emplace_back("pred_dir", c.pred_dir);
  } else {
    throw ConfigError("unknown verb '" + std::string(verb) + "'");
  }
  for (const auto& [key, value] : inputs) {
    if (value.empty()) {
      throw ConfigError("missing required key '" + key + "' for verb '" + std::string(verb) + "'");
    }
  }
  if (needs_output && c.output_dir.empty()) {
    throw ConfigError("missing required key 'output_dir' for verb '" + std::string(verb) + "'");
  }
  if (!c.filter_checkpoint.empty()) inputs.emplace_back("filter_checkpoint", c.filter_checkpoint);
  if (!c.subset_manifest.empty()) inputs.emplace_back("subset_manifest", c.subset_manifest);
  if (c.embedder.kind == EmbedderKind::kPrecomputed) {
    if (c.embedder.embeddings_path.empty() && (verb == "train" || verb == "train-filter")) {
      throw ConfigError("missing required key 'embeddings_file' for the precomputed embedder");
    }
    if (!c.embedder.embeddings_path.empty()) {
      inputs.emplace_back("embeddings_file", c.embedder.embeddings_path);
    }
  }
  for (const auto& [key, value] : inputs) {
    if (!fs::exists(value)) {
      throw ConfigError("path for '" + key + "' does not exist: " + value);
    }
  }
}

std::string canonical_config(const RunConfig& config) {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

std::string config_hash(const RunConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash64(canonical_config(config), 0)));
  return buf;
}

}  // namespace toxtag
