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

#include "toxtag/commands.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>

#include "toxtag/corpus_io.h"
#include "toxtag/ensemble_eval.h"
#include "toxtag/error.h"
#include "toxtag/filter_sampling.h"
#include "toxtag/multitask_model.h"

namespace toxtag {
namespace {

namespace fs = std::filesystem;

// Records every file a run writes so that a failed run can remove them.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, std::string_view content) {
    const fs::path p = dir_ / name;
    if (!fs::exists(p)) written_.push_back(p);
    write_file(p, content);
  }

  void commit() { committed_ = true; }

  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
  }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
  bool committed_ = false;
};

std::string fmt(double v, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

std::optional<FilterModel> maybe_filter(const RunConfig& c) {
  if (c.filter_checkpoint.empty()) return std::nullopt;
  return load_filter(c.filter_checkpoint);
}

void write_predictions(OutputSet& out, const Document& doc, const Prediction& p) {
  out.write(annotation_path("", doc.doc_id(), Task::kTrigger).string(), serialize_ann(p.triggers));
  out.write(annotation_path("", doc.doc_id(), Task::kArgument).string(),
            serialize_ann(p.arguments));
}

void run_stats(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const auto corpus = load_corpus(c.data_dir);
  const CorpusStats s = corpus_stats(corpus);
  std::ostringstream text;
  text << "documents = " << s.documents << "\n"
       << "mean_words = " << fmt(s.mean_words, "%.2f") << "\n"
       << "triggers = " << s.triggers << "\n"
       << "arguments = " << s.arguments << "\n"
       << "triggers_per_document = " << fmt(s.triggers_per_document, "%.2f") << "\n"
       << "arguments_per_document = " << fmt(s.arguments_per_document, "%.2f") << "\n";
  out.write("stats.txt", text.str());
  log << text.str();
}

void run_kfold(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const auto corpus = load_corpus(c.data_dir);
  std::vector<std::string> ids;
  for (const auto& d : corpus) ids.push_back(d.doc_id());
  const FoldPlan plan = kfold_subsets(ids, c.folds, c.fold_seed);
  for (std::size_t i = 0; i < plan.k; ++i) {
    out.write("fold_" + std::to_string(i) + ".txt", fold_manifest(plan, i));
    log << "fold " << i << ": " << plan.subsets[i].size() << " training documents, "
        << plan.parts[i].size() << " held out\n";
  }
}

void run_train_filter(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const auto corpus = load_corpus(c.data_dir);
  const auto data = build_filter_dataset(corpus);
  const FilterModel filter = train_filter(data, c.embedder, c.filter);
  out.write("filter.json", serialize_filter(filter));
  std::size_t correct = 0;
  for (const auto& item : data) correct += filter.keep(item.sentence) == item.positive ? 1 : 0;
  log << "filter training accuracy "
      << fmt(static_cast<double>(correct) / static_cast<double>(data.size())) << " on "
      << data.size() << " sentences\n";
}

void run_train(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const auto corpus = load_corpus(c.data_dir);
  SubsetSelector subset;
  if (!c.subset_manifest.empty()) {
    subset.doc_ids = parse_manifest(read_file(c.subset_manifest));
    subset.id = fs::path(c.subset_manifest).stem().string();
  }
  if (!c.subset_id.empty()) subset.id = c.subset_id;
  const ModelCheckpoint ckpt =
      train(corpus, c.training, c.embedder, subset, [&](int epoch, double loss) {
        log << "epoch " << epoch << " loss " << fmt(loss, "%.6f") << "\n";
        return true;
      });
  out.write("model.json", serialize_checkpoint(ckpt));
}

void run_predict(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const ModelCheckpoint ckpt = load_checkpoint(c.checkpoint);
  const auto filter = maybe_filter(c);
  const auto corpus = load_corpus(c.data_dir);
  for (const auto& doc : corpus) {
    write_predictions(out, doc, predict(ckpt.model, doc, filter ? &*filter : nullptr));
  }
  log << "wrote predictions for " << corpus.size() << " documents\n";
}

void run_ensemble(const RunConfig& c, OutputSet& out, std::ostream& log) {
  std::vector<MultiOutputModel> members;
  for (const auto& path : c.ensemble.members) members.push_back(load_checkpoint(path).model);
  const auto filter = maybe_filter(c);
  const auto corpus = load_corpus(c.data_dir);
  for (const auto& doc : corpus) {
    write_predictions(out, doc, ensemble_predict(members, doc, filter ? &*filter : nullptr,
                                                 c.ensemble.tie_break));
  }
  log << "wrote " << members.size() << "-member ensemble predictions for " << corpus.size()
      << " documents\n";
}

void run_evaluate(const RunConfig& c, OutputSet& out, std::ostream& log) {
  const auto gold_docs = load_corpus(c.gold_dir);
  std::string table, kv;
  for (Task task : {Task::kTrigger, Task::kArgument}) {
    SpansByDocument gold, pred;
    for (const auto& doc : gold_docs) {
      gold[doc.doc_id()] = doc.spans(task);
      const fs::path p = annotation_path(c.pred_dir, doc.doc_id(), task);
      pred[doc.doc_id()] =
          fs::exists(p) ? parse_ann(read_file(p), categories_for(task)) : std::vector<AnnotatedSpan>{};
    }
    const EvalReport report = micro_prf(gold, pred);
    table += format_table(report, std::string(task_name(task)) + " spans") + "\n";
    kv += format_key_values(report, task_name(task));
  }
  out.write("eval.txt", table);
  out.write("eval.kv", kv);
  log << table;
}

std::string manifest(std::string_view verb, const RunConfig& c) {
  std::ostringstream m;
  m << "verb = " << verb << "\n";
  m << "config_hash = " << config_hash(c) << "\n";
  m << "seed = " << c.training.seed << "\n";
  m << "members = ";
  for (std::size_t i = 0; i < c.ensemble.members.size(); ++i) {
    m << (i ? "," : "") << c.ensemble.members[i];
  }
  m << "\n\n# effective configuration\n" << canonical_config(c);
  return m.str();
}

}  // namespace

const std::vector<std::string_view>& verbs() {
  static const std::vector<std::string_view> v = {"stats",   "kfold",    "train-filter", "train",
                                                  "predict", "ensemble", "evaluate"};
  return v;
}

bool is_verb(std::string_view verb) {
  return std::find(verbs().begin(), verbs().end(), verb) != verbs().end();
}

int run_command(std::string_view verb, const RunConfig& config, std::ostream& log) {
  if (!is_verb(verb)) {
    log << "error: unknown verb '" << verb << "'\n";
    return kExitUsage;
  }
  try {
    require_paths(config, verb);
  } catch (const ConfigError& e) {
    log << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  log << verb << ": config " << config_hash(config) << ", seed " << config.training.seed << "\n";
  OutputSet out(config.output_dir);
  try {
    if (verb == "stats") run_stats(config, out, log);
    else if (verb == "kfold") run_kfold(config, out, log);
    else if (verb == "train-filter") run_train_filter(config, out, log);
    else if (verb == "train") run_train(config, out, log);
    else if (verb == "predict") run_predict(config, out, log);
    else if (verb == "ensemble") run_ensemble(config, out, log);
    else run_evaluate(config, out, log);
    out.write("manifest.txt", manifest(verb, config));
    out.commit();
    return kExitOk;
  } catch (const ConfigError& e) {
    log << "error [" << verb << "]: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    log << "error [" << verb << "]: " << e.what() << "\n";
    return kExitDataError;
  } catch (const std::exception& e) {
    log << "internal error [" << verb << "]: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace toxtag
