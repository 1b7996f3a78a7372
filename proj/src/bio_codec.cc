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

#include "toxtag/bio_codec.h"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "toxtag/error.h"
#include "toxtag/log.h"

namespace toxtag {

LabelScheme::LabelScheme(Task task, std::vector<std::string> categories)
    : task_(task), categories_(std::move(categories)) {
  tags_.push_back("O");
  for (const auto& c : categories_) {
    tags_.push_back("B-" + c);
    tags_.push_back("I-" + c);
  }
}

LabelScheme LabelScheme::for_task(Task task) {
  return LabelScheme(task, categories_for(task));
}

int LabelScheme::index(std::string_view tag) const {
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    if (tags_[i] == tag) return static_cast<int>(i);
  }
  throw LookupError("unknown tag '" + std::string(tag) + "' for the " +
                    std::string(task_name(task_)) + " scheme");
}

int LabelScheme::category_index(std::string_view category) const {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i] == category) return static_cast<int>(i);
  }
  throw LookupError("unknown " + std::string(task_name(task_)) + " category '" +
                    std::string(category) + "'");
}

TagSequence encode_bio(std::span<const Token> tokens,
                       std::span<const AnnotatedSpan> spans,
                       const LabelScheme& scheme) {
  TagSequence tags(tokens.size(), LabelScheme::kOutside);
  if (spans.empty()) return tags;
  if (tokens.empty()) {
    throw ValidationError("span " + spans.front().id + " given for an empty token list");
  }
  const std::size_t lo = tokens.front().start;
  const std::size_t hi = tokens.back().end;

  struct Candidate {
    std::size_t first, last;
    int category;
    std::size_t length, start;
    const AnnotatedSpan* span;
  };
  std::vector<Candidate> candidates;
  for (const auto& span : spans) {
    if (span.start < lo || span.end > hi) {
      throw ValidationError("span " + span.id + " [" + std::to_string(span.start) +
                            ", " + std::to_string(span.end) +
                            ") crosses the sentence range [" + std::to_string(lo) +
                            ", " + std::to_string(hi) + ")");
    }
    int category;
    try {
      category = scheme.category_index(span.label);
    } catch (const LookupError& e) {
      throw ValidationError("span " + span.id + ": " + e.what());
    }
    std::size_t first = 0;
    while (first < tokens.size() && tokens[first].end <= span.start) ++first;
    std::size_t last = tokens.size();
    while (last > 0 && tokens[last - 1].start >= span.end) --last;
    if (first >= last) {
      warn("dropping span " + span.id + " that covers no token");
      continue;
    }
    --last;
    if (tokens[first].start != span.start || tokens[last].end != span.end) {
      warn("span " + span.id + " [" + std::to_string(span.start) + ", " +
           std::to_string(span.end) + ") widened to token boundaries [" +
           std::to_string(tokens[first].start) + ", " +
           std::to_string(tokens[last].end) + ")");
    }
    candidates.push_back({first, last, category, span.end - span.start, span.start, &span});
  }

  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) {
                     if (a.length != b.length) return a.length > b.length;
                     return a.start < b.start;
                   });
  std::vector<bool> taken(tokens.size(), false);
  for (const auto& c : candidates) {
    bool clash = false;
    for (std::size_t i = c.first; i <= c.last; ++i) clash = clash || taken[i];
    if (clash) {
      warn("dropping span " + c.span->id + " (" + c.span->label +
           ") that overlaps a longer span");
      continue;
    }
    tags[c.first] = LabelScheme::begin_tag(c.category);
    taken[c.first] = true;
    for (std::size_t i = c.first + 1; i <= c.last; ++i) {
      tags[i] = LabelScheme::inside_tag(c.category);
      taken[i] = true;
    }
  }
  return tags;
}

std::vector<AnnotatedSpan> decode_bio(std::span<const Token> tokens,
                                      std::span<const int> tags,
                                      const LabelScheme& scheme,
                                      std::u32string_view text) {
  if (tokens.size() != tags.size()) {
    throw std::invalid_argument("decode_bio: " + std::to_string(tokens.size()) +
                                " tokens but " + std::to_string(tags.size()) + " tags");
  }
  std::vector<AnnotatedSpan> spans;
  std::size_t i = 0;
  while (i < tags.size()) {
    if (!LabelScheme::is_begin(tags[i])) {
      ++i;
      continue;
    }
    const int category = LabelScheme::category_of(tags[i]);
    std::size_t j = i + 1;
    while (j < tags.size() && tags[j] == LabelScheme::inside_tag(category)) ++j;
    AnnotatedSpan span;
    span.label = scheme.categories().at(static_cast<std::size_t>(category));
    span.start = tokens[i].start;
    span.end = tokens[j - 1].end;
    span.text = from_units(text.substr(span.start, span.end - span.start));
    spans.push_back(std::move(span));
    i = j;
  }
  return spans;
}

TagSequence repair_bio(std::span<const int> tags) {
  TagSequence out(tags.begin(), tags.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!LabelScheme::is_inside(out[i])) continue;
    const int category = LabelScheme::category_of(out[i]);
    const bool continues = i > 0 && out[i - 1] != LabelScheme::kOutside &&
                           LabelScheme::category_of(out[i - 1]) == category;
    if (!continues) out[i] = LabelScheme::begin_tag(category);
  }
  return out;
}

bool is_valid_bio(std::span<const int> tags) {
  for (std::size_t i = 0; i < tags.size(); ++i) {
    if (!LabelScheme::is_inside(tags[i])) continue;
    if (i == 0 || tags[i - 1] == LabelScheme::kOutside ||
        LabelScheme::category_of(tags[i - 1]) != LabelScheme::category_of(tags[i])) {
      return false;
    }
  }
  return true;
}

namespace {

std::size_t check_alignment(std::span<const std::size_t> alignment) {
  if (alignment.empty()) return 0;
  if (alignment.front() != 0) {
    throw std::invalid_argument("sub-token alignment must start at word 0");
  }
  for (std::size_t i = 1; i < alignment.size(); ++i) {
    if (alignment[i] < alignment[i - 1]) {
      throw std::invalid_argument("sub-token alignment is not monotone at position " +
                                  std::to_string(i));
    }
    if (alignment[i] > alignment[i - 1] + 1) {
      throw std::invalid_argument("sub-token alignment skips word " +
                                  std::to_string(alignment[i - 1] + 1));
    }
  }
  return alignment.back() + 1;
}

}  // namespace

TagSequence project_subtokens(std::span<const int> subtoken_tags,
                              std::span<const std::size_t> alignment) {
  if (subtoken_tags.size() != alignment.size()) {
    throw std::invalid_argument("sub-token tags and alignment differ in length");
  }
  const std::size_t words = check_alignment(alignment);
  TagSequence out(words, LabelScheme::kOutside);
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    if (i == 0 || alignment[i] != alignment[i - 1]) out[alignment[i]] = subtoken_tags[i];
  }
  return out;
}

TagSequence expand_to_subtokens(std::span<const int> word_tags,
                                std::span<const std::size_t> alignment,
                                SubtokenLabeling mode) {
  const std::size_t words = check_alignment(alignment);
  if (words != word_tags.size()) {
    throw std::invalid_argument("alignment covers " + std::to_string(words) +
                                " words but " + std::to_string(word_tags.size()) +
                                " tags were given");
  }
  TagSequence out(alignment.size(), LabelScheme::kOutside);
  for (std::size_t i = 0; i < alignment.size(); ++i) {
    const int word_tag = word_tags[alignment[i]];
    const bool first = i == 0 || alignment[i] != alignment[i - 1];
    if (first) {
      out[i] = word_tag;
    } else if (mode == SubtokenLabeling::kPropagateInside && word_tag != LabelScheme::kOutside) {
      out[i] = LabelScheme::inside_tag(LabelScheme::category_of(word_tag));
    }
  }
  return out;
}

Matrix bio_transition_mask(const LabelScheme& scheme) {
  const int c = scheme.size();
  Matrix mask = Matrix::Zero(c, c);
  const double forbidden = -std::numeric_limits<double>::infinity();
  for (int from = 0; from < c; ++from) {
    for (int to = 0; to < c; ++to) {
      if (!LabelScheme::is_inside(to)) continue;
      if (from == LabelScheme::kOutside ||
          LabelScheme::category_of(from) != LabelScheme::category_of(to)) {
        mask(from, to) = forbidden;
      }
    }
  }
  return mask;
}

}  // namespace toxtag
