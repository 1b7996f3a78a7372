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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "synthetic.h"
#include "toxtag/corpus_io.h"
#include "toxtag/error.h"
#include "toxtag/log.h"
#include "toxtag/rng.h"

using namespace toxtag;

namespace {

const std::string kSampleNote =
    "Varón de 51 años con antecedentes de policonsumo de drogas. "
    "Actualmente, cannabis 1-2 g/día vía oral.";

// Independent code-point locator: walks UTF-8 lead bytes.
std::size_t code_point_offset(const std::string& text, const std::string& needle) {
  const std::size_t byte = text.find(needle);
  REQUIRE(byte != std::string::npos);
  std::size_t count = 0;
  for (std::size_t i = 0; i < byte; ++i) {
    if ((static_cast<unsigned char>(text[i]) & 0xC0) != 0x80) ++count;
  }
  return count;
}

std::vector<std::string> token_texts(const std::vector<Token>& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

}  // namespace

TEST_CASE("sample note offsets agree with an independent code-point count") {
  CHECK(code_point_offset(kSampleNote, "drogas") == 52);
  CHECK(code_point_offset(kSampleNote, "cannabis") == 73);
  CHECK(code_point_offset(kSampleNote, "1-2 g") == 82);
  CHECK(code_point_offset(kSampleNote, "/día") == 87);
  CHECK(code_point_offset(kSampleNote, "vía oral") == 92);
  CHECK(to_units(kSampleNote).size() == 101);
  CHECK(kSampleNote.size() == 105);
  CHECK(kOffsetUnit == OffsetUnit::kCodePoint);
}

TEST_CASE("parse_ann reads trigger and argument lines") {
  const auto triggers = parse_ann("T1\tCannabis 73 81\tcannabis", trigger_categories());
  REQUIRE(triggers.size() == 1);
  CHECK(triggers[0] == AnnotatedSpan{"T1", "Cannabis", 73, 81, "cannabis"});

  const auto arguments = parse_ann("T9\tMethod 92 100\tvía oral", argument_categories());
  REQUIRE(arguments.size() == 1);
  CHECK(arguments[0] == AnnotatedSpan{"T9", "Method", 92, 100, "vía oral"});

  CHECK(parse_ann("", trigger_categories()).empty());
  CHECK(parse_ann("\n\n", trigger_categories()).size() == 0);
}

TEST_CASE("parse_ann keeps file order and skips blank lines") {
  const auto spans = parse_ann("T2\tDrug 5 9\tabcd\n\nT1\tAlcohol 0 3\txyz\n", trigger_categories());
  REQUIRE(spans.size() == 2);
  CHECK(spans[0].id == "T2");
  CHECK(spans[1].id == "T1");
}

TEST_CASE("parse_ann errors name the line") {
  auto line_of = [](std::string_view content) {
    try {
      parse_ann(content, trigger_categories());
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(line_of("T1\tDrug 52 58\tdrogas\nT2\tDrug x 58\tdrogas") == 2);
  CHECK(line_of("T1\tDrug 52\tdrogas") == 1);
  CHECK(line_of("T1 Drug 52 58 drogas") == 1);
  CHECK(line_of("\nT1\tDrug 52 58\tdrogas\textra") == 2);
  CHECK(line_of("T1\tDrug 58 52\tdrogas") == 1);
  CHECK(line_of("T1\tDrug -1 5\tdrogas") == 1);

  try {
    parse_ann("T1\tHeroin 0 3\tabc", trigger_categories());
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Heroin") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_ann("T1\tDrug 0 3\tabc", argument_categories()), ValidationError);
}

TEST_CASE("parse_ann skips note lines and discontinuous spans with a warning") {
  WarningCapture capture;
  const auto spans = parse_ann(
      "#1\tAnnotatorNotes T1\tnote\nT1\tDrug 0 3;5 8\tabc def\nT2\tDrug 10 13\txyz\n",
      trigger_categories());
  REQUIRE(spans.size() == 1);
  CHECK(spans[0].id == "T2");
  CHECK(capture.messages().size() == 2);
}

TEST_CASE("serialize_ann formats spans") {
  CHECK(serialize_ann({}) == "");
  const std::vector<AnnotatedSpan> one = {{"T1", "Drug", 52, 58, "drogas"}};
  CHECK(serialize_ann(one) == "T1\tDrug 52 58\tdrogas\n");
}

TEST_CASE("parse/serialize round-trip on random span lists") {
  Rng rng(11);
  const std::vector<std::string> words = {"cannabis", "vía oral", "año", "Varón", "«ñ»", "x y z"};
  const auto& labels = argument_categories();
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<AnnotatedSpan> spans;
    const std::size_t n = rng.below(6);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t start = rng.below(1000);
      spans.push_back({"T" + std::to_string(i + 1), labels[rng.below(labels.size())], start,
                       start + 1 + rng.below(20), words[rng.below(words.size())]});
    }
    CHECK(parse_ann(serialize_ann(spans), labels) == spans);
  }
}

TEST_CASE("load_document validates span text") {
  const Document doc = load_document(kSampleNote,
                                     "T1\tDrug 52 58\tdrogas\nT2\tCannabis 73 81\tcannabis\n",
                                     "T3\tAmount 82 87\t1-2 g\nT4\tFrequency 87 91\t/día\n"
                                     "T5\tMethod 92 100\tvía oral\n",
                                     "a");
  REQUIRE(doc.trigger_spans.size() == 2);
  REQUIRE(doc.argument_spans.size() == 3);
  CHECK(doc.trigger_spans[0].label == "Drug");
  CHECK(doc.trigger_spans[1].label == "Cannabis");
  CHECK(doc.argument_spans[0].label == "Amount");
  CHECK(doc.argument_spans[1].label == "Frequency");
  CHECK(doc.argument_spans[2].label == "Method");
  for (const auto& s : doc.argument_spans) CHECK(doc.slice(s.start, s.end) == s.text);

  const Document empty = load_document(kSampleNote, "", "", "b");
  CHECK(empty.trigger_spans.empty());
  CHECK(empty.argument_spans.empty());

  try {
    load_document(kSampleNote, "T7\tCannabis 52 58\tcannabis\n", "", "c");
    FAIL("expected an integrity error");
  } catch (const IntegrityError& e) {
    const std::string what = e.what();
    CHECK(what.find("T7") != std::string::npos);
    CHECK(what.find("cannabis") != std::string::npos);
    CHECK(what.find("drogas") != std::string::npos);
  }
  CHECK_THROWS_AS(load_document("abc", "T1\tDrug 1 9\tbc\n", "", "d"), IntegrityError);
}

TEST_CASE("code-point offsets treat accented letters as one unit") {
  const Document doc = load_document("Varón fuma", "T1\tTobacco 6 10\tfuma\n", "", "v");
  CHECK(doc.length() == 10);
  CHECK(doc.slice(0, 5) == "Varón");
  const auto tokens = tokenize("Varón fuma");
  REQUIRE(tokens.size() == 2);
  CHECK(tokens[0].end == 5);
  CHECK(tokens[1].start == 6);
}

TEST_CASE("tokenize detaches listed punctuation only") {
  const auto tokens = tokenize("Actualmente, cannabis 1-2 g/día vía oral.");
  CHECK(token_texts(tokens) == std::vector<std::string>{"Actualmente", ",", "cannabis", "1-2",
                                                         "g/día", "vía", "oral", "."});
  CHECK(tokenize("").empty());

  const auto simple = tokenize("51 años");
  REQUIRE(simple.size() == 2);
  CHECK(simple[0] == Token{"51", 0, 2});
  CHECK(simple[1] == Token{"años", 3, 7});

  const auto shifted = tokenize("51 años", 10);
  CHECK(shifted[1].start == 13);

  CHECK(token_texts(tokenize("(tabaco) «vino»")) ==
        std::vector<std::string>{"(", "tabaco", ")", "«", "vino", "»"});
  CHECK(token_texts(tokenize("1.5 g")) == std::vector<std::string>{"1.5", "g"});
  CHECK(token_texts(tokenize("TA:120")) == std::vector<std::string>{"TA:120"});
}

TEST_CASE("segment_sentences follows the rule-based splitter") {
  const Document note("a", kSampleNote);
  const auto sentences = segment_sentences(note);
  REQUIRE(sentences.size() == 2);
  CHECK(sentences[0].start == 0);
  CHECK(sentences[0].end == 59);
  CHECK(sentences[1].start == 60);
  CHECK(sentences[1].end == 101);
  CHECK(sentences[0].tokens.back().text == ".");

  const auto hola = segment_sentences(Document("h", "Hola"));
  REQUIRE(hola.size() == 1);
  CHECK(hola[0].start == 0);
  CHECK(hola[0].end == 4);

  CHECK(segment_sentences(Document("d", "Dr. García llegó.")).size() == 1);
  CHECK(segment_sentences(Document("e", "")).empty());
  CHECK(segment_sentences(Document("w", "  \n ")).empty());
  CHECK(segment_sentences(Document("l", "Fuma. bebe poco.")).size() == 1);
  CHECK(segment_sentences(Document("n", "Fuma. 20 al día!")).size() == 2);
  CHECK(segment_sentences(Document("q", "¿Fuma? Sí.")).size() == 2);
}

TEST_CASE("sentences cover the text and tokens stay inside them") {
  Rng rng(5);
  const std::vector<std::string> pieces = {"Fuma", "tabaco.", "Dr.", "López", "bebe", "vino,",
                                           "a diario!", "Sí?", "20", "años", "«ñu»", "\n"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const std::size_t n = rng.below(15);
    for (std::size_t i = 0; i < n; ++i) {
      text += pieces[rng.below(pieces.size())];
      text += rng.below(4) == 0 ? "  " : " ";
    }
    const Document doc("r", text);
    const auto sentences = segment_sentences(doc);
    const std::u32string& units = doc.units();
    std::size_t cursor = 0;
    for (const auto& s : sentences) {
      for (std::size_t i = cursor; i < s.start; ++i) CHECK(std::iswspace(units[i]));
      CHECK(s.start < s.end);
      std::size_t last = s.start;
      for (const auto& t : s.tokens) {
        CHECK(t.start >= last);
        CHECK(t.start < t.end);
        CHECK(t.end <= s.end);
        CHECK(doc.slice(t.start, t.end) == t.text);
        last = t.end;
      }
      cursor = s.end;
    }
    for (std::size_t i = cursor; i < units.size(); ++i) CHECK(std::iswspace(units[i]));
  }
}

TEST_CASE("split_segments caps the token count") {
  const Document doc("s", "a b c d e f g.");
  const auto sentences = segment_sentences(doc);
  REQUIRE(sentences.size() == 1);
  const auto segments = split_segments(sentences[0], 3);
  REQUIRE(segments.size() == 3);
  CHECK(segments[0].tokens.size() == 3);
  CHECK(segments[2].tokens.size() == 2);
  CHECK(segments[1].token_offset == 3);
  CHECK(split_segments(sentences[0], 0).size() == 1);
  CHECK(segment_document(doc, 100).size() == 1);
}

TEST_CASE("corpus_stats") {
  const Document note = testing::sample_note();
  const auto stats = corpus_stats(std::vector<Document>{note});
  CHECK(stats.documents == 1);
  CHECK(stats.triggers == 2);
  CHECK(stats.arguments == 3);
  CHECK(stats.triggers_per_document == 2.0);
  CHECK(stats.arguments_per_document == 3.0);
  CHECK(stats.mean_words == doctest::Approx(word_count(kSampleNote)));

  std::vector<Document> constant;
  for (int d = 0; d < 1199; ++d) {
    Document doc("d" + std::to_string(d), "x");
    doc.trigger_spans.assign(6, AnnotatedSpan{"T1", "Drug", 0, 1, "x"});
    constant.push_back(std::move(doc));
  }
  CHECK(corpus_stats(constant).triggers_per_document == 6.0);

  const auto synthetic = testing::synthetic_corpus(10, 3, 99, "s");
  std::size_t triggers = 0, arguments = 0, words = 0;
  for (const auto& doc : synthetic) {
    triggers += doc.trigger_spans.size();
    arguments += doc.argument_spans.size();
    bool in_word = false;
    for (char c : doc.text()) {
      const bool space = c == ' ' || c == '\n' || c == '\t';
      if (!space && !in_word) ++words;
      in_word = !space;
    }
  }
  const auto synth_stats = corpus_stats(synthetic);
  CHECK(synth_stats.documents == 10);
  CHECK(synth_stats.triggers == triggers);
  CHECK(synth_stats.arguments == arguments);
  CHECK(synth_stats.triggers_per_document == doctest::Approx(triggers / 10.0));
  CHECK(synth_stats.arguments_per_document == doctest::Approx(arguments / 10.0));
  CHECK(synth_stats.mean_words == doctest::Approx(words / 10.0));

  CHECK_THROWS_AS(corpus_stats(std::vector<Document>{}), ValidationError);
}

TEST_CASE("load_corpus reads a directory and reports the failing document") {
  const auto dir = std::filesystem::temp_directory_path() / "toxtag_corpus_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto corpus = testing::synthetic_corpus(3, 2, 1, "c");
  testing::write_corpus(corpus, dir);
  write_file(dir / "extra.txt", "Sin anotaciones.");

  const auto loaded = load_corpus(dir);
  REQUIRE(loaded.size() == 4);
  CHECK(loaded[0].doc_id() == "c000");
  CHECK(loaded[0].trigger_spans == corpus[0].trigger_spans);
  CHECK(loaded[0].argument_spans == corpus[0].argument_spans);
  CHECK(loaded[3].doc_id() == "extra");
  CHECK(loaded[3].trigger_spans.empty());

  write_file(annotation_path(dir, "extra", Task::kTrigger), "T1\tDrug 0 3\tzzz\n");
  try {
    load_corpus(dir);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("extra") != std::string::npos);
  }
  CHECK_THROWS_AS(load_corpus(dir / "missing"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bundled synthetic corpus matches the generator") {
  const std::filesystem::path root = TOXTAG_DATA_DIR;
  const auto train = load_corpus(root / "synthetic" / "train");
  const auto expected = testing::synthetic_train();
  REQUIRE(train.size() == expected.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    CHECK(train[i].text() == expected[i].text());
    CHECK(train[i].trigger_spans == expected[i].trigger_spans);
    CHECK(train[i].argument_spans == expected[i].argument_spans);
  }
  std::size_t sentences = 0;
  for (const auto& doc : train) sentences += segment_sentences(doc).size();
  CHECK(sentences == 50);
  CHECK(load_corpus(root / "synthetic" / "heldout").size() == testing::synthetic_heldout().size());
}
