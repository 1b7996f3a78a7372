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

#include "synthetic.h"
#include "toxtag/ensemble_eval.h"
#include "toxtag/log.h"
#include "toxtag/rng.h"

using namespace toxtag;

namespace {

const LabelScheme& trigger_scheme() {
  static const LabelScheme s = LabelScheme::for_task(Task::kTrigger);
  return s;
}

int tag(const char* name) { return trigger_scheme().index(name); }

AnnotatedSpan span(const char* label, std::size_t start, std::size_t end) {
  return {"", label, start, end, ""};
}

void check_f1_consistency(const Counts& c) {
  const double p = c.precision(), r = c.recall();
  if (p + r > 0) CHECK(c.f1() == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-15));
  else CHECK(c.f1() == 0.0);
}

}  // namespace

TEST_CASE("majority vote counts") {
  const std::vector<TagSequence> unanimous(3, TagSequence{tag("B-Drug")});
  CHECK(majority_vote(unanimous, trigger_scheme()) == TagSequence{tag("B-Drug")});

  const std::vector<TagSequence> two_of_three = {{tag("B-Drug")}, {tag("B-Drug")}, {tag("O")}};
  CHECK(majority_vote(two_of_three, trigger_scheme()) == TagSequence{tag("B-Drug")});

  const std::vector<TagSequence> o_majority = {{tag("B-Drug")}, {tag("O")}, {tag("O")}};
  CHECK(majority_vote(o_majority, trigger_scheme()) == TagSequence{tag("O")});
}

TEST_CASE("majority vote tie policies") {
  const std::vector<TagSequence> tie = {{tag("O")}, {tag("B-Drug")}};
  CHECK(majority_vote(tie, trigger_scheme(), TieBreak::kPreferEntity) ==
        TagSequence{tag("B-Drug")});
  CHECK(majority_vote(tie, trigger_scheme(), TieBreak::kLexicographic) ==
        TagSequence{tag("B-Drug")});  // "B-Drug" < "O"

  const std::vector<TagSequence> entity_tie = {{tag("B-Drug")}, {tag("B-Alcohol")}};
  CHECK(majority_vote(entity_tie, trigger_scheme()) == TagSequence{tag("B-Alcohol")});

  const std::vector<TagSequence> inside_vs_o = {{tag("O")}, {tag("I-Tobacco")}};
  CHECK(majority_vote(inside_vs_o, trigger_scheme(), TieBreak::kPreferEntity) ==
        TagSequence{tag("I-Tobacco")});
  CHECK(majority_vote(inside_vs_o, trigger_scheme(), TieBreak::kLexicographic) ==
        TagSequence{tag("I-Tobacco")});  // "I-Tobacco" < "O"

  CHECK(parse_tie_break(tie_break_name(TieBreak::kLexicographic)) == TieBreak::kLexicographic);
  CHECK_THROWS(parse_tie_break("coin-flip"));
}

TEST_CASE("majority vote errors") {
  const std::vector<TagSequence> ragged = {{0, 1}, {0}};
  CHECK_THROWS_AS(majority_vote(ragged, trigger_scheme()), std::invalid_argument);
  CHECK_THROWS_AS(majority_vote(std::vector<TagSequence>{}, trigger_scheme()),
                  std::invalid_argument);
  const std::vector<TagSequence> out_of_range = {{42}};
  CHECK_THROWS_AS(majority_vote(out_of_range, trigger_scheme()), std::invalid_argument);
}

TEST_CASE("majority vote properties") {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = rng.below(8), members = 1 + rng.below(6);
    std::vector<TagSequence> votes(members, TagSequence(n));
    for (auto& seq : votes)
      for (auto& t : seq) t = static_cast<int>(rng.below(9));
    const auto result = majority_vote(votes, trigger_scheme());

    // Independent count: the winner holds the maximum vote count.
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<int> counts(9, 0);
      for (const auto& seq : votes) ++counts[static_cast<std::size_t>(seq[i])];
      const int best = *std::max_element(counts.begin(), counts.end());
      CHECK(counts[static_cast<std::size_t>(result[i])] == best);
      if (result[i] == 0) {
        for (std::size_t t = 1; t < 9; ++t) CHECK(counts[t] < best);
      }
    }

    auto shuffled = votes;
    rng.shuffle(std::span<TagSequence>(shuffled));
    CHECK(majority_vote(shuffled, trigger_scheme()) == result);

    const std::vector<TagSequence> same(members, votes[0]);
    CHECK(majority_vote(same, trigger_scheme()) == votes[0]);
  }
}

TEST_CASE("micro_prf hand-counted cases") {
  const SpansByDocument gold = {{"d", {span("Drug", 0, 4), span("Drug", 10, 14)}}};
  const SpansByDocument pred = {{"d", {span("Drug", 0, 4), span("Drug", 20, 24)}}};
  const auto report = micro_prf(gold, pred);
  CHECK(report.overall.tp == 1);
  CHECK(report.overall.fp == 1);
  CHECK(report.overall.fn == 1);
  CHECK(report.overall.precision() == 0.5);
  CHECK(report.overall.recall() == 0.5);
  CHECK(report.overall.f1() == 0.5);

  const auto same = micro_prf(gold, gold);
  CHECK(same.overall.precision() == 1.0);
  CHECK(same.overall.recall() == 1.0);
  CHECK(same.overall.f1() == 1.0);

  const SpansByDocument wrong_label = {{"d", {span("Alcohol", 0, 4), span("Drug", 10, 14)}}};
  const auto wl = micro_prf(gold, wrong_label);
  CHECK(wl.per_label.at("Alcohol").tp == 0);
  CHECK(wl.per_label.at("Alcohol").fp == 1);
  CHECK(wl.per_label.at("Drug").fn == 1);
  CHECK(wl.overall.tp == 1);

  const SpansByDocument only_wrong = {{"d", {span("Alcohol", 0, 4)}}};
  const SpansByDocument only_gold = {{"d", {span("Drug", 0, 4)}}};
  const auto ow = micro_prf(only_gold, only_wrong);
  CHECK(ow.overall.tp == 0);
  CHECK(ow.overall.fp == 1);
  CHECK(ow.overall.fn == 1);
  CHECK(ow.overall.f1() == 0.0);

  // Same offsets in another document do not match.
  const SpansByDocument other_doc = {{"e", {span("Drug", 0, 4)}}};
  CHECK(micro_prf(only_gold, other_doc).overall.tp == 0);

  const auto empty = micro_prf({}, {});
  CHECK(empty.overall.precision() == 0.0);
  CHECK(empty.overall.f1() == 0.0);
}

TEST_CASE("micro_prf counts duplicate predictions as false positives") {
  const SpansByDocument gold = {{"d", {span("Drug", 0, 4)}}};
  const SpansByDocument dup = {{"d", {span("Drug", 0, 4), span("Drug", 0, 4)}}};
  const auto report = micro_prf(gold, dup);
  CHECK(report.overall.tp == 1);
  CHECK(report.overall.fp == 1);
  CHECK(report.duplicate_predictions == 1);

  const SpansByDocument two_gold = {{"d", {span("Drug", 0, 4), span("Drug", 0, 4)}}};
  const auto both = micro_prf(two_gold, dup);
  CHECK(both.overall.tp == 1);
  CHECK(both.overall.fn == 1);
}

TEST_CASE("micro_prf properties against a brute-force matcher") {
  Rng rng(31);
  const std::vector<std::string> labels = {"Drug", "Alcohol"};
  auto random_spans = [&](std::size_t n) {
    std::vector<AnnotatedSpan> out;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t start = rng.below(6);
      out.push_back({"", labels[rng.below(2)], start, start + 1 + rng.below(2), ""});
    }
    return out;
  };
  for (int trial = 0; trial < 300; ++trial) {
    SpansByDocument gold, pred;
    for (const char* d : {"a", "b"}) {
      gold[d] = random_spans(rng.below(5));
      pred[d] = random_spans(rng.below(5));
    }
    const auto r = micro_prf(gold, pred);
    const auto swapped = micro_prf(pred, gold);
    CHECK(swapped.overall.precision() == r.overall.recall());
    CHECK(swapped.overall.recall() == r.overall.precision());
    CHECK(swapped.overall.f1() == doctest::Approx(r.overall.f1()).epsilon(1e-15));
    check_f1_consistency(r.overall);
    for (const auto& [label, c] : r.per_label) check_f1_consistency(c);

    // Oracle: TP = sum over distinct keys of min(gold multiplicity, 1 if predicted).
    std::size_t tp = 0, n_gold = 0, n_pred = 0;
    for (const auto& [doc, spans] : gold) {
      n_gold += spans.size();
      n_pred += pred[doc].size();
      std::vector<AnnotatedSpan> used;
      for (const auto& p : pred[doc]) {
        const bool dup = std::find(used.begin(), used.end(), p) != used.end();
        used.push_back(p);
        if (!dup && std::find(spans.begin(), spans.end(), p) != spans.end()) ++tp;
      }
    }
    CHECK(r.overall.tp == tp);
    CHECK(r.overall.fp == n_pred - tp);
    CHECK(r.overall.fn == n_gold - tp);
  }
}

TEST_CASE("report formats") {
  const SpansByDocument gold = {{"d", {span("Drug", 0, 4), span("Alcohol", 5, 8)}}};
  const SpansByDocument pred = {{"d", {span("Drug", 0, 4)}}};
  const auto report = micro_prf(gold, pred);
  const std::string kv = format_key_values(report, "trigger");
  CHECK(kv.find("trigger.overall.tp = 1\n") != std::string::npos);
  CHECK(kv.find("trigger.overall.precision = 1.000000\n") != std::string::npos);
  CHECK(kv.find("trigger.overall.recall = 0.500000\n") != std::string::npos);
  CHECK(kv.find("trigger.Alcohol.fn = 1\n") != std::string::npos);
  const std::string table = format_table(report, "trigger spans");
  CHECK(table.find("micro") != std::string::npos);
  CHECK(table.find("Alcohol") != std::string::npos);
}

TEST_CASE("ensemble_predict") {
  WarningCapture quiet;
  const auto corpus = testing::synthetic_train();
  TrainingConfig config;
  config.learning_rate = 0.05;
  config.epochs = 10;
  std::vector<MultiOutputModel> members;
  for (std::uint64_t seed : {1, 2, 3}) {
    config.seed = seed;
    members.push_back(train(corpus, config, EmbedderConfig{}).model);
  }
  const auto docs = testing::synthetic_heldout();
  for (const auto& doc : docs) {
    const Prediction single = predict(members[0], doc);
    const Prediction one = ensemble_predict(std::span<const MultiOutputModel>(members.data(), 1), doc);
    CHECK(one.triggers == single.triggers);
    CHECK(one.arguments == single.arguments);

    const std::vector<MultiOutputModel> clones(3, members[1]);
    const Prediction agreed = ensemble_predict(clones, doc);
    const Prediction member = predict(members[1], doc);
    CHECK(agreed.triggers == member.triggers);
    CHECK(agreed.arguments == member.arguments);

    // Three members: the voted tags equal an independent per-token vote.
    std::vector<DocumentTags> tags;
    for (const auto& m : members) tags.push_back(tag_document(m, doc));
    DocumentTags voted = tags[0];
    for (std::size_t s = 0; s < voted.segments.size(); ++s) {
      std::vector<TagSequence> tr, arg;
      for (const auto& t : tags) {
        tr.push_back(t.trigger[s]);
        arg.push_back(t.argument[s]);
      }
      voted.trigger[s] = majority_vote(tr, members[0].trigger_scheme);
      voted.argument[s] = majority_vote(arg, members[0].argument_scheme);
    }
    const Prediction expected =
        spans_from_tags(doc, voted, members[0].trigger_scheme, members[0].argument_scheme);
    const Prediction actual = ensemble_predict(members, doc);
    CHECK(actual.triggers == expected.triggers);
    CHECK(actual.arguments == expected.arguments);
  }

  CHECK_THROWS(ensemble_predict(std::vector<MultiOutputModel>{}, docs[0]));
  std::vector<MultiOutputModel> mismatched = {members[0], members[1]};
  mismatched[1].max_tokens = 7;
  CHECK_THROWS(ensemble_predict(mismatched, docs[0]));
  mismatched[1] = members[1];
  mismatched[1].argument_scheme = LabelScheme(Task::kArgument, std::vector<std::string>{"Type"});
  CHECK_THROWS(ensemble_predict(mismatched, docs[0]));
}
