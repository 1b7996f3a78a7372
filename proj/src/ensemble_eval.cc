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

#include "toxtag/ensemble_eval.h"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <set>
#include <tuple>

#include "toxtag/error.h"

namespace toxtag {
namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

std::string_view tie_break_name(TieBreak policy) {
  return policy == TieBreak::kPreferEntity ? "prefer-entity" : "lexicographic";
}

TieBreak parse_tie_break(std::string_view name) {
  if (name == "prefer-entity") return TieBreak::kPreferEntity;
  if (name == "lexicographic") return TieBreak::kLexicographic;
  throw std::invalid_argument("unknown tie-break policy '" + std::string(name) + "'");
}

TagSequence majority_vote(std::span<const TagSequence> sequences, const LabelScheme& scheme,
                          TieBreak policy) {
  if (sequences.empty()) throw std::invalid_argument("majority vote needs at least one sequence");
  const std::size_t n = sequences.front().size();
  for (const auto& s : sequences) {
    if (s.size() != n) {
      throw std::invalid_argument("cannot vote over sequences of lengths " + std::to_string(n) +
                                  " and " + std::to_string(s.size()));
    }
  }
  const auto c = static_cast<std::size_t>(scheme.size());
  TagSequence out(n, LabelScheme::kOutside);
  std::vector<std::size_t> votes(c);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(votes.begin(), votes.end(), 0);
    for (const auto& s : sequences) {
      if (s[i] < 0 || static_cast<std::size_t>(s[i]) >= c) {
        throw std::invalid_argument("tag index " + std::to_string(s[i]) + " outside the " +
                                    std::to_string(c) + "-tag scheme");
      }
      votes[static_cast<std::size_t>(s[i])] += 1;
    }
    int best = -1;
    for (std::size_t t = 0; t < c; ++t) {
      if (votes[t] == 0) continue;
      const int tag = static_cast<int>(t);
      if (best < 0 || votes[t] > votes[static_cast<std::size_t>(best)]) {
        best = tag;
        continue;
      }
      if (votes[t] < votes[static_cast<std::size_t>(best)]) continue;
      if (policy == TieBreak::kPreferEntity) {
        const bool cand_o = tag == LabelScheme::kOutside;
        const bool best_o = best == LabelScheme::kOutside;
        if (cand_o != best_o) {
          if (best_o) best = tag;
          continue;
        }
      }
      if (scheme.tag(tag) < scheme.tag(best)) best = tag;
    }
    out[i] = best;
  }
  return out;
}

Prediction ensemble_predict(std::span<const MultiOutputModel> members, const Document& doc,
                            const FilterModel* filter, TieBreak policy) {
  if (members.empty()) throw ValidationError("an ensemble needs at least one member");
  const auto& first = members.front();
  for (const auto& m : members) {
    if (!(m.trigger_scheme == first.trigger_scheme) ||
        !(m.argument_scheme == first.argument_scheme)) {
      throw ValidationError("ensemble members use different label schemes");
    }
    if (m.max_tokens != first.max_tokens) {
      throw ValidationError("ensemble members use different segment lengths");
    }
  }
  std::vector<DocumentTags> outputs;
  outputs.reserve(members.size());
  for (const auto& m : members) outputs.push_back(tag_document(m, doc, filter));

  DocumentTags voted;
  voted.segments = outputs.front().segments;
  for (std::size_t s = 0; s < voted.segments.size(); ++s) {
    std::vector<TagSequence> tr, arg;
    for (const auto& o : outputs) {
      tr.push_back(o.trigger.at(s));
      arg.push_back(o.argument.at(s));
    }
    voted.trigger.push_back(majority_vote(tr, first.trigger_scheme, policy));
    voted.argument.push_back(majority_vote(arg, first.argument_scheme, policy));
  }
  return spans_from_tags(doc, voted, first.trigger_scheme, first.argument_scheme);
}

double Counts::precision() const { return ratio(tp, tp + fp); }
double Counts::recall() const { return ratio(tp, tp + fn); }
double Counts::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

EvalReport micro_prf(const SpansByDocument& gold, const SpansByDocument& predicted) {
  using Key = std::tuple<std::string, std::size_t, std::size_t>;  // label, start, end
  EvalReport report;
  std::set<std::string> docs;
  for (const auto& [id, spans] : gold) docs.insert(id);
  for (const auto& [id, spans] : predicted) docs.insert(id);

  for (const auto& id : docs) {
    std::map<Key, std::size_t> gold_counts, pred_counts;
    if (auto it = gold.find(id); it != gold.end()) {
      for (const auto& s : it->second) gold_counts[{s.label, s.start, s.end}] += 1;
    }
    if (auto it = predicted.find(id); it != predicted.end()) {
      for (const auto& s : it->second) pred_counts[{s.label, s.start, s.end}] += 1;
    }
    // Repeated predictions count once; the copies are false positives.
    for (const auto& [key, count] : pred_counts) {
      Counts& c = report.per_label[std::get<0>(key)];
      const bool matched = gold_counts.count(key) > 0;
      c.tp += matched ? 1 : 0;
      c.fp += count - (matched ? 1 : 0);
      report.duplicate_predictions += count - 1;
    }
    for (const auto& [key, count] : gold_counts) {
      Counts& c = report.per_label[std::get<0>(key)];
      c.fn += count - (pred_counts.count(key) > 0 ? 1 : 0);
    }
  }
  for (const auto& [label, c] : report.per_label) {
    report.overall.tp += c.tp;
    report.overall.fp += c.fp;
    report.overall.fn += c.fn;
  }
  return report;
}

std::string format_table(const EvalReport& report, std::string_view title) {
  std::ostringstream out;
  char line[160];
  out << title << "\n";
  std::snprintf(line, sizeof(line), "%-12s %6s %6s %6s %9s %9s %9s\n", "label", "tp", "fp", "fn",
                "precision", "recall", "f1");
  out << line;
  auto row = [&](const std::string& name, const Counts& c) {
    std::snprintf(line, sizeof(line), "%-12s %6zu %6zu %6zu %9.4f %9.4f %9.4f\n", name.c_str(),
                  c.tp, c.fp, c.fn, c.precision(), c.recall(), c.f1());
    out << line;
  };
  for (const auto& [label, c] : report.per_label) row(label, c);
  row("micro", report.overall);
  if (report.duplicate_predictions > 0) {
    out << "duplicate predictions counted as false positives: " << report.duplicate_predictions
        << "\n";
  }
  return out.str();
}

std::string format_key_values(const EvalReport& report, std::string_view prefix) {
  std::ostringstream out;
  auto block = [&](const std::string& name, const Counts& c) {
    const std::string base = std::string(prefix) + "." + name + ".";
    out << base << "tp = " << c.tp << "\n";
    out << base << "fp = " << c.fp << "\n";
    out << base << "fn = " << c.fn << "\n";
    out << base << "precision = " << fixed(c.precision()) << "\n";
    out << base << "recall = " << fixed(c.recall()) << "\n";
    out << base << "f1 = " << fixed(c.f1()) << "\n";
  };
  for (const auto& [label, c] : report.per_label) block(label, c);
  block("overall", report.overall);
  out << prefix << ".duplicate_predictions = " << report.duplicate_predictions << "\n";
  return out.str();
}

}  // namespace toxtag
