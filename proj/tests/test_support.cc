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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "toxtag/adamw.h"
#include "toxtag/error.h"
#include "toxtag/log.h"
#include "toxtag/rng.h"
#include "toxtag/utf8.h"

using namespace toxtag;

TEST_CASE("utf8 decode and encode") {
  const std::string text = "Varón ñ « 🩺";
  const std::u32string cps = utf8::decode(text);
  CHECK(cps.size() == 11);
  CHECK(cps[3] == U'ó');
  CHECK(cps[10] == U'\U0001FA7A');
  CHECK(utf8::encode(cps) == text);
  CHECK(utf8::decode("").empty());

  CHECK_THROWS_AS(utf8::decode("\xC3"), ValidationError);          // truncated
  CHECK_THROWS_AS(utf8::decode("\x80"), ValidationError);          // stray continuation
  CHECK_THROWS_AS(utf8::decode("\xC0\xAF"), ValidationError);      // overlong
  CHECK_THROWS_AS(utf8::decode("\xED\xA0\x80"), ValidationError);  // surrogate
  CHECK_THROWS_AS(utf8::decode("\xF4\x90\x80\x80"), ValidationError);  // above U+10FFFF
}

TEST_CASE("utf8 round-trip over random code points") {
  Rng rng(1);
  for (int trial = 0; trial < 500; ++trial) {
    std::u32string cps;
    const std::size_t n = rng.below(20);
    for (std::size_t i = 0; i < n; ++i) {
      char32_t cp;
      do {
        cp = static_cast<char32_t>(rng.below(0x110000));
      } while (cp >= 0xD800 && cp <= 0xDFFF);
      cps.push_back(cp);
    }
    CHECK(utf8::decode(utf8::encode(cps)) == cps);
  }
}

TEST_CASE("rng is reproducible and in range") {
  Rng a(9), b(9), c(10);
  std::vector<std::uint64_t> xs, ys, zs;
  for (int i = 0; i < 20; ++i) {
    xs.push_back(a.next());
    ys.push_back(b.next());
    zs.push_back(c.next());
  }
  CHECK(xs == ys);
  CHECK(xs != zs);

  Rng r(3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    sum += u;
  }
  CHECK(std::abs(sum / 100000 - 0.5) < 0.01);

  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    REQUIRE(k < 7);
    ++counts[k];
  }
  for (int n : counts) CHECK(std::abs(n - 10000) < 500);
  CHECK_THROWS(r.below(0));

  std::vector<int> v(50);
  std::iota(v.begin(), v.end(), 0);
  auto shuffled = v;
  r.shuffle(std::span<int>(shuffled));
  CHECK(shuffled != v);
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(shuffled == v);
}

TEST_CASE("adamw matches a hand-computed first step") {
  AdamWConfig config;
  config.weight_decay = 0.01;
  AdamW opt(0.1, config);
  std::vector<double> p = {1.0, -2.0};
  const std::vector<double> g = {0.5, 0.0};
  opt.next_step();
  opt.update(0, p, g);
  // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps) plus decay.
  CHECK(p[0] == doctest::Approx(1.0 - 0.1 * (0.5 / (0.5 + 1e-8) + 0.01 * 1.0)).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(-2.0 - 0.1 * (0.0 + 0.01 * -2.0)).epsilon(1e-14));
  CHECK_THROWS(opt.update(0, p, std::vector<double>{1.0}));

  AdamWConfig bad;
  bad.beta1 = 1.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("adamw minimizes a quadratic") {
  AdamW opt(0.05, AdamWConfig{});
  std::vector<double> x = {5.0, -3.0};
  for (int step = 0; step < 2000; ++step) {
    const std::vector<double> grad = {2.0 * (x[0] - 1.0), 2.0 * (x[1] + 4.0)};
    opt.next_step();
    opt.update(0, x, grad);
  }
  CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(x[1] == doctest::Approx(-4.0).epsilon(1e-3));
}

TEST_CASE("warning capture") {
  std::vector<std::string> outer;
  {
    WarningCapture capture;
    warn("first");
    {
      WarningCapture inner;
      warn("second");
      CHECK(inner.messages() == std::vector<std::string>{"second"});
    }
    warn("third");
    outer = capture.messages();
  }
  CHECK(outer == std::vector<std::string>{"first", "third"});
}
