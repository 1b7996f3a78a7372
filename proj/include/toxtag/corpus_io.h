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

// Documents, standoff annotations, sentence segmentation and tokenization.
//
// All offsets are counted in text units, which are Unicode code points
// (see kOffsetUnit). A document keeps both its UTF-8 text and the decoded
// unit string so that spans can be sliced without re-decoding.

#ifndef TOXTAG_CORPUS_IO_H_
#define TOXTAG_CORPUS_IO_H_

#include <cstddef>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace toxtag {

enum class OffsetUnit { kCodePoint, kByte };

// The unit in which .ann offsets are interpreted.
inline constexpr OffsetUnit kOffsetUnit = OffsetUnit::kCodePoint;

std::u32string to_units(std::string_view utf8);
std::string from_units(std::u32string_view units);

enum class Task { kTrigger, kArgument };

std::string_view task_name(Task task);

// Categories in canonical order.
const std::vector<std::string>& trigger_categories();
const std::vector<std::string>& argument_categories();
const std::vector<std::string>& categories_for(Task task);

struct AnnotatedSpan {
  std::string id;
  std::string label;
  std::size_t start = 0;  // inclusive
  std::size_t end = 0;    // exclusive
  std::string text;

  bool operator==(const AnnotatedSpan&) const = default;
};

struct Token {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string doc_id;
  std::size_t index = 0;
  std::size_t start = 0;
  std::size_t end = 0;
  std::vector<Token> tokens;
};

// A bounded run of a sentence's tokens. Sentences longer than the token cap
// are split into several consecutive segments.
struct Segment {
  std::string doc_id;
  std::size_t sentence_index = 0;
  std::size_t token_offset = 0;  // index of tokens[0] within the sentence
  std::vector<Token> tokens;

  std::size_t start() const { return tokens.empty() ? 0 : tokens.front().start; }
  std::size_t end() const { return tokens.empty() ? 0 : tokens.back().end; }
};

class Document {
 public:
  Document() = default;
  Document(std::string doc_id, std::string text);

  const std::string& doc_id() const { return doc_id_; }
  const std::string& text() const { return text_; }
  const std::u32string& units() const { return units_; }
  std::size_t length() const { return units_.size(); }

  // UTF-8 text of [start, end). Throws ValidationError if out of range.
  std::string slice(std::size_t start, std::size_t end) const;

  std::vector<AnnotatedSpan> trigger_spans;
  std::vector<AnnotatedSpan> argument_spans;

  const std::vector<AnnotatedSpan>& spans(Task task) const {
    return task == Task::kTrigger ? trigger_spans : argument_spans;
  }

 private:
  std::string doc_id_;
  std::string text_;
  std::u32string units_;
};

struct CorpusStats {
  std::size_t documents = 0;
  double mean_words = 0.0;
  std::size_t triggers = 0;
  std::size_t arguments = 0;
  double triggers_per_document = 0.0;
  double arguments_per_document = 0.0;
};

// Parses brat-style standoff text. Lines that are not text-bound
// annotations ('T' prefix) and discontinuous spans are skipped with a
// warning. Throws ParseError for malformed lines and ValidationError for
// labels outside `expected_labels`.
std::vector<AnnotatedSpan> parse_ann(std::string_view content,
                                     std::span<const std::string> expected_labels);

std::string serialize_ann(std::span<const AnnotatedSpan> spans);

// Builds a document and validates every span against its text.
Document load_document(std::string_view txt, std::string_view trigger_ann,
                       std::string_view argument_ann, std::string doc_id);

// Checks range and surface text of each span. Throws IntegrityError.
void validate_spans(const Document& doc, std::span<const AnnotatedSpan> spans);

std::vector<Token> tokenize(std::string_view text, std::size_t offset = 0);
std::vector<Token> tokenize_units(std::u32string_view units, std::size_t offset);

std::vector<Sentence> segment_sentences(const Document& doc);

std::vector<Segment> split_segments(const Sentence& sentence,
                                    std::size_t max_tokens);
std::vector<Segment> segment_document(const Document& doc,
                                      std::size_t max_tokens);

// Throws ValidationError for an empty corpus.
CorpusStats corpus_stats(std::span<const Document> corpus);

std::size_t word_count(std::string_view text);

// Directory layout: <id>.txt with optional <id>.trigger.ann and
// <id>.argument.ann next to it. Documents are returned sorted by id.
std::vector<Document> load_corpus(const std::filesystem::path& dir);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::filesystem::path annotation_path(const std::filesystem::path& dir,
                                      std::string_view doc_id, Task task);

// Assigns ids T1..Tn in order.
void number_spans(std::vector<AnnotatedSpan>& spans);

}  // namespace toxtag

#endif  // TOXTAG_CORPUS_IO_H_
