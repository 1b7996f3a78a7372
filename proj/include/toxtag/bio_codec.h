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

#ifndef TOXTAG_BIO_CODEC_H_
#define TOXTAG_BIO_CODEC_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "toxtag/corpus_io.h"
#include "toxtag/linalg.h"

namespace toxtag {

// Tag inventory of one head. Index 0 is O; category k owns B at 2k+1 and
// I at 2k+2.
class LabelScheme {
 public:
  static constexpr int kOutside = 0;

  LabelScheme() = default;
  LabelScheme(Task task, std::vector<std::string> categories);

  static LabelScheme for_task(Task task);

  Task task() const { return task_; }
  const std::vector<std::string>& categories() const { return categories_; }
  int size() const { return static_cast<int>(tags_.size()); }

  const std::string& tag(int index) const { return tags_.at(static_cast<std::size_t>(index)); }
  // Throws LookupError for unknown tag strings.
  int index(std::string_view tag) const;
  // Throws LookupError for unknown categories.
  int category_index(std::string_view category) const;

  static int begin_tag(int category) { return 2 * category + 1; }
  static int inside_tag(int category) { return 2 * category + 2; }
  static bool is_begin(int tag) { return tag > 0 && tag % 2 == 1; }
  static bool is_inside(int tag) { return tag > 0 && tag % 2 == 0; }
  // -1 for O.
  static int category_of(int tag) { return tag == 0 ? -1 : (tag - 1) / 2; }

  bool operator==(const LabelScheme& other) const {
    return task_ == other.task_ && categories_ == other.categories_;
  }

 private:
  Task task_ = Task::kTrigger;
  std::vector<std::string> categories_;
  std::vector<std::string> tags_;
};

using TagSequence = std::vector<int>;

// Tags tokens with the spans they overlap. Spans that start or end inside a
// token are widened to the covering tokens; overlapping spans keep the
// longer one (earlier start on ties). Both adjustments emit a warning.
// Throws ValidationError for a span that crosses the token range or has an
// unknown label.
TagSequence encode_bio(std::span<const Token> tokens,
                       std::span<const AnnotatedSpan> spans,
                       const LabelScheme& scheme);

// Merges B (I)* runs into spans. `text` is the unit string the token
// offsets refer to. Span ids are left empty. Input must be valid BIO.
std::vector<AnnotatedSpan> decode_bio(std::span<const Token> tokens,
                                      std::span<const int> tags,
                                      const LabelScheme& scheme,
                                      std::u32string_view text);

// Rewrites every I-c that does not continue a c span to B-c.
TagSequence repair_bio(std::span<const int> tags);

bool is_valid_bio(std::span<const int> tags);

// Word tags from sub-token tags: each word takes its first sub-token's tag.
// `alignment[i]` is the word index of sub-token i; it must be monotone
// non-decreasing, start at 0 and have no gaps. Throws std::invalid_argument.
TagSequence project_subtokens(std::span<const int> subtoken_tags,
                              std::span<const std::size_t> alignment);

enum class SubtokenLabeling {
  kFirstOnly,     // continuation sub-tokens are O
  kPropagateInside,  // continuation sub-tokens carry I of the word's category
};

// Inverse of project_subtokens for building sub-token training targets.
TagSequence expand_to_subtokens(std::span<const int> word_tags,
                                std::span<const std::size_t> alignment,
                                SubtokenLabeling mode = SubtokenLabeling::kPropagateInside);

// 0 for allowed transitions, -inf for O -> I-c and B-c/I-c -> I-c' (c' != c).
// Added to a transition matrix to hard-constrain decoding.
Matrix bio_transition_mask(const LabelScheme& scheme);

}  // namespace toxtag

#endif  // TOXTAG_BIO_CODEC_H_
