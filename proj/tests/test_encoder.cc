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

#include <cmath>
#include <sstream>

#include "toxtag/encoder.h"
#include "toxtag/error.h"

using namespace toxtag;

TEST_CASE("hashed embedder is deterministic and shaped") {
  EmbedderConfig config;
  const auto tokens = tokenize("Varón de 51 años con antecedentes de policonsumo de drogas");
  REQUIRE(tokens.size() == 10);
  const Matrix a = embed(tokens, config);
  const Matrix b = embed(tokens, config);
  CHECK(a.rows() == 10);
  CHECK(a.cols() == 128);
  CHECK(a == b);
  CHECK(a.allFinite());

  const auto nine = tokenize("Actualmente , cannabis 1-2 g/día vía oral diaria .");
  CHECK(embed(nine, config).rows() == 9);

  EmbedderConfig other = config;
  other.hash_seed = 1;
  CHECK(embed(tokens, other) != a);

  for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(a.row(i).squaredNorm() > 0.0);
}

TEST_CASE("hashed embedding depends only on the context window") {
  EmbedderConfig config;
  config.context_window = 1;
  const auto left = tokenize("uno dos tres cuatro cinco");
  const auto right = tokenize("seis dos tres cuatro siete");
  const Matrix a = embed(left, config), b = embed(right, config);
  CHECK(a.row(2) == b.row(2));
  CHECK(a.row(1) != b.row(1));
  CHECK(a.row(3) != b.row(3));

  config.context_window = 0;
  CHECK(embed(left, config).row(1) == embed(right, config).row(1));

  config.context_window = 2;
  CHECK(embed(left, config).row(2) != embed(right, config).row(2));
}

TEST_CASE("feature templates and hashing helpers") {
  CHECK(word_shape("Varón") == "Xx");
  CHECK(word_shape("120") == "d");
  CHECK(word_shape("TA") == "X");
  CHECK(word_shape("1-2") == "d-d");
  CHECK(word_shape("") == "");
  CHECK(hash64("abc", 1) == hash64("abc", 1));
  CHECK(hash64("abc", 1) != hash64("abc", 2));
  CHECK(hash64("abc", 1) != hash64("abd", 1));

  EmbedderConfig only_lower;
  only_lower.features = kLowercase;
  only_lower.context_window = 0;
  const Matrix m = embed(tokenize("Tabaco tabaco TABACO"), only_lower);
  CHECK(m.row(0) == m.row(1));
  CHECK(m.row(1) == m.row(2));
  CHECK(m.row(0).cwiseAbs().sum() == doctest::Approx(1.0));
}

TEST_CASE("config validation") {
  EmbedderConfig config;
  config.dim = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config = {};
  config.dropout = 1.0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  config = {};
  config.features = 0;
  CHECK_THROWS_AS(validate(config), std::invalid_argument);
  CHECK(parse_embedder_kind("hashed") == EmbedderKind::kHashed);
  CHECK(parse_embedder_kind(embedder_kind_name(EmbedderKind::kPrecomputed)) ==
        EmbedderKind::kPrecomputed);
  CHECK_THROWS(parse_embedder_kind("bert"));
}

TEST_CASE("precomputed embedder returns stored vectors") {
  std::istringstream in(
      "dim=3\n"
      "doc\t0\t0\t1.0 0.0 0.0\n"
      "doc\t0\t1\t0.5 -2 3e-1\n"
      "doc\t1\t0\t9 9 9\n");
  const auto embedder = PrecomputedEmbedder::read(in);
  CHECK(embedder->dim() == 3);
  const auto tokens = tokenize("a b");
  const Matrix m = embedder->embed(tokens, SegmentKey{"doc", 0, 0});
  CHECK(m(0, 0) == 1.0);
  CHECK(m(0, 1) == 0.0);
  CHECK(m(1, 1) == -2.0);
  CHECK(m(1, 2) == 0.3);

  const auto one = tokenize("b");
  CHECK(embedder->embed(one, SegmentKey{"doc", 0, 1})(0, 0) == 0.5);

  try {
    embedder->embed(tokens, SegmentKey{"doc", 1, 0});
    FAIL("expected a lookup error");
  } catch (const LookupError& e) {
    const std::string what = e.what();
    CHECK(what.find("doc") != std::string::npos);
    CHECK(what.find("1") != std::string::npos);
  }
}

TEST_CASE("precomputed file errors") {
  auto parse_line = [](const std::string& text) {
    std::istringstream in(text);
    try {
      PrecomputedEmbedder::read(in);
    } catch (const ParseError& e) {
      return static_cast<long>(e.line());
    }
    return -1L;
  };
  CHECK(parse_line("d=3\n") == 1);
  CHECK(parse_line("dim=0\n") == 1);
  CHECK(parse_line("dim=2\ndoc\t0\t0\t1\n") == 2);
  CHECK(parse_line("dim=2\ndoc\t0\t0\t1 2\ndoc\t0\tx\t1 2\n") == 3);
  CHECK(parse_line("dim=2\ndoc\t0\t0\t1 zz\n") == 2);
  CHECK(parse_line("dim=2\ndoc\t0\t0\t1 2\n") == -1);
  CHECK_THROWS_AS(PrecomputedEmbedder::load("/nonexistent/embeddings.tsv"), DataError);
}

TEST_CASE("dropout") {
  Rng rng(1);
  const Matrix ones = Matrix::Ones(400, 250);
  CHECK(apply_dropout(ones, 0.0, rng) == ones);
  CHECK_THROWS_AS(apply_dropout(ones, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(apply_dropout(ones, -0.1, rng), std::invalid_argument);

  const Matrix dropped = apply_dropout(ones, 0.1, rng);
  const double zero_fraction = static_cast<double>((dropped.array() == 0.0).count()) /
                               static_cast<double>(dropped.size());
  CHECK(std::abs(zero_fraction - 0.1) <= 0.02);
  for (Eigen::Index i = 0; i < dropped.size(); ++i) {
    const double v = dropped.data()[i];
    CHECK((v == 0.0 || std::abs(v - 1.0 / 0.9) < 1e-15));
  }

  Rng a(77), b(77);
  CHECK(apply_dropout(ones, 0.3, a) == apply_dropout(ones, 0.3, b));

  // Expectation is preserved: mean over 1e5 samples of a single scalar.
  Rng mc(5);
  const Matrix scalar = Matrix::Constant(1, 1, 2.5);
  double sum = 0.0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) sum += apply_dropout(scalar, 0.1, mc)(0, 0);
  CHECK(std::abs(sum / samples - 2.5) <= 0.01 * 2.5);
}
