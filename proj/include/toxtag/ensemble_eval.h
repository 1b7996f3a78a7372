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

#ifndef TOXTAG_ENSEMBLE_EVAL_H_
#define TOXTAG_ENSEMBLE_EVAL_H_

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxtag/bio_codec.h"
#include "toxtag/corpus_io.h"
#include "toxtag/filter_sampling.h"
#include "toxtag/multitask_model.h"

namespace toxtag {

enum class TieBreak {
  // On an exact tie any entity tag beats O; remaining ties go to the
  // lexicographically smallest tag string.
  kPreferEntity,
  // Lexicographically smallest tag string only.
  kLexicographic,
};

std::string_view tie_break_name(TieBreak policy);
TieBreak parse_tie_break(std::string_view name);

struct EnsembleConfig {
  std::vector<std::string> members;  // checkpoint paths
  TieBreak tie_break = TieBreak::kPreferEntity;
};

// Per-position plurality vote. Throws std::invalid_argument when the
// sequences differ in length or there are none.
TagSequence majority_vote(std::span<const TagSequence> sequences, const LabelScheme& scheme,
                          TieBreak policy = TieBreak::kPreferEntity);

// Votes word-level tags of all members per head, then repairs and decodes.
// Throws ValidationError if members disagree on schemes or segmentation.
Prediction ensemble_predict(std::span<const MultiOutputModel> members, const Document& doc,
                            const FilterModel* filter = nullptr,
                            TieBreak policy = TieBreak::kPreferEntity);

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const;
  double recall() const;
  double f1() const;
};

struct EvalReport {
  std::map<std::string, Counts> per_label;
  Counts overall;
  // Predicted spans identical to an earlier prediction; they are counted
  // as false positives.
  std::size_t duplicate_predictions = 0;
};

using SpansByDocument = std::map<std::string, std::vector<AnnotatedSpan>>;

// Exact match on (document, label, start, end), one-to-one.
EvalReport micro_prf(const SpansByDocument& gold, const SpansByDocument& predicted);

std::string format_table(const EvalReport& report, std::string_view title);

// "<prefix>.<label>.precision = 0.500000" style lines; labels sorted, then
// the overall block.
std::string format_key_values(const EvalReport& report, std::string_view prefix);

}  // namespace toxtag

#endif  // TOXTAG_ENSEMBLE_EVAL_H_
