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

#include "toxtag/corpus_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "toxtag/error.h"
#include "toxtag/log.h"
#include "toxtag/utf8.h"

namespace toxtag {
namespace {

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v' || c == 0xA0 || (c >= 0x2000 && c <= 0x200A) ||
         c == 0x2028 || c == 0x2029 || c == 0x3000;
}

bool is_upper(char32_t c) {
  return (c >= 'A' && c <= 'Z') || (c >= 0xC0 && c <= 0xDE && c != 0xD7);
}

bool is_digit(char32_t c) { return c >= '0' && c <= '9'; }

bool is_alnum(char32_t c) {
  if (c < 0x80) {
    return is_digit(c) || (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z');
  }
  if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
  if (c >= 0xC0 && c <= 0xFF) return c != 0xD7 && c != 0xF7;
  return c >= 0x100 && !is_space(c);
}

bool is_detached(char32_t c) {
  switch (c) {
    case '.': case ',': case ';': case ':': case '!': case '?':
    case '(': case ')': case '"': case 0xAB: case 0xBB:
      return true;
    default:
      return false;
  }
}

char32_t to_lower(char32_t c) {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
  return c;
}

// Lowercased abbreviations, including the final period, after which a
// period never ends a sentence.
const std::vector<std::u32string>& abbreviations() {
  static const std::vector<std::u32string> list = {
      U"dr.",   U"dra.",  U"sr.",    U"sra.",  U"srta.", U"dña.",
      U"etc.",  U"p.ej.", U"ej.",    U"aprox.", U"núm.", U"pág.",
      U"vs.",   U"ud.",   U"uds.",   U"prof.", U"lic.",  U"tel.",
      U"fig.",  U"cap.",  U"vol.",   U"art.",  U"h.",    U"min.",
  };
  return list;
}

bool is_abbreviation(std::u32string_view units, std::size_t period) {
  std::size_t begin = period;
  while (begin > 0 && !is_space(units[begin - 1])) --begin;
  std::u32string word;
  for (std::size_t i = begin; i <= period; ++i) word.push_back(to_lower(units[i]));
  // An opening bracket or quote is not part of the abbreviation.
  while (word.size() > 1 && (word.front() == '(' || word.front() == '"' ||
                             word.front() == 0xAB)) {
    word.erase(word.begin());
  }
  const auto& list = abbreviations();
  return std::find(list.begin(), list.end(), word) != list.end();
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    if (next == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, next - pos));
    pos = next + 1;
  }
}

bool parse_offset(std::string_view field, std::size_t& value) {
  if (field.empty()) return false;
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::u32string to_units(std::string_view utf8) {
  if constexpr (kOffsetUnit == OffsetUnit::kCodePoint) {
    return utf8::decode(utf8);
  } else {
    std::u32string units;
    units.reserve(utf8.size());
    for (char c : utf8) units.push_back(static_cast<unsigned char>(c));
    return units;
  }
}

std::string from_units(std::u32string_view units) {
  if constexpr (kOffsetUnit == OffsetUnit::kCodePoint) {
    return utf8::encode(units);
  } else {
    std::string out;
    out.reserve(units.size());
    for (char32_t u : units) out.push_back(static_cast<char>(u));
    return out;
  }
}

std::string_view task_name(Task task) {
  return task == Task::kTrigger ? "trigger" : "argument";
}

const std::vector<std::string>& trigger_categories() {
  static const std::vector<std::string> labels = {"Tobacco", "Cannabis",
                                                  "Alcohol", "Drug"};
  return labels;
}

const std::vector<std::string>& argument_categories() {
  static const std::vector<std::string> labels = {
      "Type", "Method", "Amount", "Frequency", "Duration", "History"};
  return labels;
}

const std::vector<std::string>& categories_for(Task task) {
  return task == Task::kTrigger ? trigger_categories() : argument_categories();
}

Document::Document(std::string doc_id, std::string text)
    : doc_id_(std::move(doc_id)), text_(std::move(text)), units_(to_units(text_)) {}

std::string Document::slice(std::size_t start, std::size_t end) const {
  if (start > end || end > units_.size()) {
    throw ValidationError("range [" + std::to_string(start) + ", " +
                          std::to_string(end) + ") outside document '" +
                          doc_id_ + "' of length " +
                          std::to_string(units_.size()));
  }
  return from_units(std::u32string_view(units_).substr(start, end - start));
}

std::vector<AnnotatedSpan> parse_ann(std::string_view content,
                                     std::span<const std::string> expected_labels) {
  std::vector<AnnotatedSpan> spans;
  const auto lines = split(content, '\n');
  for (std::size_t n = 0; n < lines.size(); ++n) {
    std::string_view line = lines[n];
    const std::size_t line_no = n + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
    if (line.front() != 'T') {
      warn("skipping non text-bound annotation on line " +
           std::to_string(line_no) + ": " + std::string(line));
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 3) {
      throw ParseError(line_no, "expected 3 tab-separated fields, found " +
                                    std::to_string(fields.size()));
    }
    if (fields[1].find(';') != std::string_view::npos) {
      warn("skipping discontinuous span " + std::string(fields[0]) +
           " on line " + std::to_string(line_no));
      continue;
    }
    const auto parts = split(fields[1], ' ');
    if (parts.size() != 3) {
      throw ParseError(line_no, "expected '<label> <start> <end>', found '" +
                                    std::string(fields[1]) + "'");
    }
    AnnotatedSpan span;
    span.id = std::string(fields[0]);
    span.label = std::string(parts[0]);
    if (!parse_offset(parts[1], span.start) || !parse_offset(parts[2], span.end)) {
      throw ParseError(line_no, "non-integer offset in '" +
                                    std::string(fields[1]) + "'");
    }
    if (span.start >= span.end) {
      throw ParseError(line_no, "empty or reversed span [" +
                                    std::to_string(span.start) + ", " +
                                    std::to_string(span.end) + ")");
    }
    if (!expected_labels.empty() &&
        std::find(expected_labels.begin(), expected_labels.end(), span.label) ==
            expected_labels.end()) {
      throw ValidationError("unexpected label '" + span.label + "' on line " +
                            std::to_string(line_no));
    }
    span.text = std::string(fields[2]);
    spans.push_back(std::move(span));
  }
  return spans;
}

std::string serialize_ann(std::span<const AnnotatedSpan> spans) {
  std::string out;
  for (const auto& s : spans) {
    out += s.id;
    out += '\t';
    out += s.label;
    out += ' ';
    out += std::to_string(s.start);
    out += ' ';
    out += std::to_string(s.end);
    out += '\t';
    out += s.text;
    out += '\n';
  }
  return out;
}

void validate_spans(const Document& doc, std::span<const AnnotatedSpan> spans) {
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > doc.length()) {
      throw IntegrityError("span " + s.id + " [" + std::to_string(s.start) +
                           ", " + std::to_string(s.end) +
                           ") is outside document '" + doc.doc_id() +
                           "' of length " + std::to_string(doc.length()));
    }
    const std::string actual = doc.slice(s.start, s.end);
    if (actual != s.text) {
      throw IntegrityError("span " + s.id + " in '" + doc.doc_id() +
                           "' claims \"" + s.text + "\" but the document has \"" +
                           actual + "\"");
    }
  }
}

Document load_document(std::string_view txt, std::string_view trigger_ann,
                       std::string_view argument_ann, std::string doc_id) {
  Document doc(std::move(doc_id), std::string(txt));
  doc.trigger_spans = parse_ann(trigger_ann, trigger_categories());
  doc.argument_spans = parse_ann(argument_ann, argument_categories());
  validate_spans(doc, doc.trigger_spans);
  validate_spans(doc, doc.argument_spans);
  return doc;
}

std::vector<Token> tokenize_units(std::u32string_view units, std::size_t offset) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = units.size();
  while (i < n) {
    while (i < n && is_space(units[i])) ++i;
    if (i == n) break;
    std::size_t chunk_end = i;
    while (chunk_end < n && !is_space(units[chunk_end])) ++chunk_end;

    std::size_t word_start = i;
    auto flush = [&](std::size_t end) {
      if (end > word_start) {
        tokens.push_back(Token{from_units(units.substr(word_start, end - word_start)),
                               offset + word_start, offset + end});
      }
    };
    for (std::size_t j = i; j < chunk_end; ++j) {
      if (!is_detached(units[j])) continue;
      const bool internal = j > i && j + 1 < chunk_end && is_alnum(units[j - 1]) &&
                            is_alnum(units[j + 1]);
      if (internal) continue;
      flush(j);
      tokens.push_back(Token{from_units(units.substr(j, 1)), offset + j, offset + j + 1});
      word_start = j + 1;
    }
    flush(chunk_end);
    i = chunk_end;
  }
  return tokens;
}

std::vector<Token> tokenize(std::string_view text, std::size_t offset) {
  return tokenize_units(to_units(text), offset);
}

std::vector<Sentence> segment_sentences(const Document& doc) {
  std::vector<Sentence> sentences;
  std::u32string_view units = doc.units();
  const std::size_t n = units.size();

  auto emit = [&](std::size_t start, std::size_t end) {
    Sentence s;
    s.doc_id = doc.doc_id();
    s.index = sentences.size();
    s.start = start;
    s.end = end;
    s.tokens = tokenize_units(units.substr(start, end - start), start);
    sentences.push_back(std::move(s));
  };

  std::size_t pos = 0;
  while (pos < n) {
    while (pos < n && is_space(units[pos])) ++pos;
    if (pos == n) break;
    const std::size_t start = pos;
    std::size_t end = n;
    for (std::size_t i = start; i < n; ++i) {
      const char32_t c = units[i];
      if (c != '.' && c != '!' && c != '?') continue;
      if (i + 1 >= n || !is_space(units[i + 1])) continue;
      std::size_t next = i + 1;
      while (next < n && is_space(units[next])) ++next;
      if (next < n && !is_upper(units[next]) && !is_digit(units[next])) continue;
      if (c == '.' && is_abbreviation(units, i)) continue;
      end = i + 1;
      break;
    }
    // Trim trailing whitespace of a final, unterminated sentence.
    std::size_t trimmed = end;
    while (trimmed > start && is_space(units[trimmed - 1])) --trimmed;
    emit(start, trimmed);
    pos = end;
  }
  return sentences;
}

std::vector<Segment> split_segments(const Sentence& sentence, std::size_t max_tokens) {
  std::vector<Segment> segments;
  const std::size_t cap = max_tokens == 0 ? sentence.tokens.size() : max_tokens;
  for (std::size_t off = 0; off < sentence.tokens.size(); off += cap) {
    Segment seg;
    seg.doc_id = sentence.doc_id;
    seg.sentence_index = sentence.index;
    seg.token_offset = off;
    const std::size_t stop = std::min(sentence.tokens.size(), off + cap);
    seg.tokens.assign(sentence.tokens.begin() + off, sentence.tokens.begin() + stop);
    segments.push_back(std::move(seg));
  }
  return segments;
}

std::vector<Segment> segment_document(const Document& doc, std::size_t max_tokens) {
  std::vector<Segment> out;
  for (const auto& sentence : segment_sentences(doc)) {
    for (auto& seg : split_segments(sentence, max_tokens)) out.push_back(std::move(seg));
  }
  return out;
}

std::size_t word_count(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char32_t c : to_units(text)) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++count;
    }
  }
  return count;
}

CorpusStats corpus_stats(std::span<const Document> corpus) {
  if (corpus.empty()) throw ValidationError("corpus statistics of an empty corpus");
  CorpusStats stats;
  std::size_t words = 0;
  for (const auto& doc : corpus) {
    words += word_count(doc.text());
    stats.triggers += doc.trigger_spans.size();
    stats.arguments += doc.argument_spans.size();
  }
  stats.documents = corpus.size();
  const auto docs = static_cast<double>(stats.documents);
  stats.mean_words = static_cast<double>(words) / docs;
  stats.triggers_per_document = static_cast<double>(stats.triggers) / docs;
  stats.arguments_per_document = static_cast<double>(stats.arguments) / docs;
  return stats;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw DataError("write failed for " + path.string());
}

std::filesystem::path annotation_path(const std::filesystem::path& dir,
                                      std::string_view doc_id, Task task) {
  return dir / (std::string(doc_id) + "." + std::string(task_name(task)) + ".ann");
}

std::vector<Document> load_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw DataError("not a directory: " + dir.string());
  std::vector<fs::path> texts;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      texts.push_back(entry.path());
    }
  }
  std::sort(texts.begin(), texts.end());
  std::vector<Document> corpus;
  corpus.reserve(texts.size());
  for (const auto& path : texts) {
    const std::string id = path.stem().string();
    auto read_optional = [&](Task task) {
      const auto p = annotation_path(dir, id, task);
      return fs::exists(p) ? read_file(p) : std::string();
    };
    try {
      corpus.push_back(load_document(read_file(path), read_optional(Task::kTrigger),
                                     read_optional(Task::kArgument), id));
    } catch (const DataError& e) {
      throw DataError("document '" + id + "': " + e.what());
    }
  }
  return corpus;
}

void number_spans(std::vector<AnnotatedSpan>& spans) {
  for (std::size_t i = 0; i < spans.size(); ++i) spans[i].id = "T" + std::to_string(i + 1);
}

}  // namespace toxtag
