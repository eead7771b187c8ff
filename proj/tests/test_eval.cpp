// tests/test_eval.cpp

// Copyright 2026  The octl authors

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
#include <string>
#include <unordered_set>
#include <vector>

#include "doctest.h"
#include "octl/corpus.hpp"
#include "octl/error.hpp"
#include "octl/eval.hpp"
#include "octl/model.hpp"
#include "octl/rng.hpp"

using namespace octl;

namespace {

std::vector<std::string> Words(std::initializer_list<const char*> ws) {
  return std::vector<std::string>(ws.begin(), ws.end());
}

}  // namespace

TEST_CASE("identical transcripts score zero") {
  const auto r = WordErrorRate(Words({"news", "about", "brexit"}),
                               Words({"news", "about", "brexit"}));
  CHECK(r.substitutions == 0);
  CHECK(r.deletions == 0);
  CHECK(r.insertions == 0);
  CHECK(r.wer == 0.0);
}

TEST_CASE("single deletion") {
  const auto r = WordErrorRate(Words({"news", "about", "brexit"}),
                               Words({"news", "brexit"}));
  CHECK(r.substitutions == 0);
  CHECK(r.deletions == 1);
  CHECK(r.insertions == 0);
  CHECK(r.wer == doctest::Approx(100.0 / 3.0));
}

TEST_CASE("error rate can exceed one hundred percent") {
  const auto r = WordErrorRate(Words({"a"}), Words({"b", "c"}));
  CHECK(r.substitutions + r.deletions + r.insertions == 2);
  CHECK(r.wer == doctest::Approx(200.0));
}

TEST_CASE("tied alignments resolve to substitutions first") {
  // (a,b) vs (b,a) costs 2 either as two substitutions or as a
  // deletion plus an insertion; the breakdown must pick the former.
  const auto r = WordErrorRate(Words({"a", "b"}), Words({"b", "a"}));
  CHECK(r.substitutions == 2);
  CHECK(r.deletions == 0);
  CHECK(r.insertions == 0);
}

TEST_CASE("empty hypothesis deletes everything") {
  const auto r = WordErrorRate(Words({"x", "y", "z"}), {});
  CHECK(r.deletions == 3);
  CHECK(r.wer == doctest::Approx(100.0));
}

TEST_CASE("empty reference is rejected") {
  CHECK_THROWS_WITH_AS(WordErrorRate({}, Words({"a"})),
                       doctest::Contains("EmptyReference"), Error);
}

TEST_CASE("oov occurrence matching") {
  const std::unordered_set<std::string> oov = {"brexit"};
  SUBCASE("exact match") {
    const auto c = CountOov(Words({"news", "brexit"}), Words({"news", "brexit"}), oov);
    CHECK(c.tp == 1);
    CHECK(c.fp == 0);
    CHECK(c.fn == 0);
  }
  SUBCASE("over-prediction becomes a false positive") {
    const auto c = CountOov(Words({"brexit"}), Words({"brexit", "brexit"}), oov);
    CHECK(c.tp == 1);
    CHECK(c.fp == 1);
    CHECK(c.fn == 0);
    CHECK(PrecisionPercent(c.tp, c.fp) == doctest::Approx(50.0));
  }
  SUBCASE("misses become false negatives") {
    const auto c = CountOov(Words({"brexit", "now", "brexit"}), Words({"now"}), oov);
    CHECK(c.tp == 0);
    CHECK(c.fn == 2);
  }
  SUBCASE("in-vocabulary words never count") {
    const auto c = CountOov(Words({"news", "news"}), Words({"news"}), oov);
    CHECK(c.tp + c.fp + c.fn == 0);
  }
}

TEST_CASE("score conventions for empty denominators") {
  CHECK(RecallPercent(0, 0) == 100.0);
  CHECK(PrecisionPercent(0, 0) == 100.0);
  CHECK(RecallPercent(1, 1) == doctest::Approx(50.0));
  CHECK(PrecisionPercent(3, 1) == doctest::Approx(75.0));
}

TEST_CASE("ground-truth hypotheses are a perfect run") {
  const std::unordered_set<std::string> oov = {"kolu", "mane"};
  std::vector<std::vector<std::string>> refs = {
      Words({"kolu", "baba"}), Words({"mane"}), Words({"deka", "kolu"})};
  const auto rep = EvaluateHypotheses(refs, refs, oov);
  CHECK(rep.wer == 0.0);
  CHECK(rep.recall == 100.0);
  CHECK(rep.precision == 100.0);
  CHECK(rep.tp == 3);
  CHECK(rep.fp == 0);
  CHECK(rep.fn == 0);
  CHECK(rep.per_word.at("kolu").tp == 2);
  CHECK(rep.per_word.at("mane").tp == 1);
}

TEST_CASE("tp plus fn equals reference oov occurrences") {
  Rng rng(DeriveSeed(77, 1));
  const std::vector<std::string> pool = {"aa", "bb", "cc", "dd", "ee"};
  const std::unordered_set<std::string> oov = {"aa", "cc", "ee"};
  for (int it = 0; it < 100; ++it) {
    std::vector<std::string> ref;
    std::vector<std::string> hyp;
    const std::size_t nr = 1 + rng.UniformInt(5);
    const std::size_t nh = rng.UniformInt(6);
    for (std::size_t i = 0; i < nr; ++i) ref.push_back(pool[rng.UniformInt(4)]);
    for (std::size_t i = 0; i < nh; ++i) hyp.push_back(pool[rng.UniformInt(4)]);
    const auto rep = EvaluateHypotheses({ref}, {hyp}, oov);
    std::size_t ref_oov = 0;
    for (const auto& w : ref) ref_oov += oov.count(w);
    CHECK(rep.tp + rep.fn == ref_oov);
    CHECK(rep.recall >= 0.0);
    CHECK(rep.recall <= 100.0);
    CHECK(rep.precision >= 0.0);
    CHECK(rep.precision <= 100.0);
  }
}

TEST_CASE("aggregate error rate pools edits over utterances") {
  const std::unordered_set<std::string> oov;
  std::vector<std::vector<std::string>> refs = {Words({"a", "b", "c"}),
                                                Words({"d"})};
  std::vector<std::vector<std::string>> hyps = {Words({"a", "b", "c"}),
                                                Words({"x", "y"})};
  // 1 substitution + 1 insertion over 4 reference words.
  const auto rep = EvaluateHypotheses(refs, hyps, oov);
  CHECK(rep.ref_words == 4);
  CHECK(rep.substitutions == 1);
  CHECK(rep.insertions == 1);
  CHECK(rep.wer == doctest::Approx(50.0));
}

TEST_CASE("model evaluation decodes every record") {
  // All-zero parameters give flat logits; the frame argmax ties to the
  // blank (lowest id), so every hypothesis is empty and the run scores
  // all deletions with zero recall.
  SyntheticSpec spec;
  spec.seed = 11;
  const Lexicon lex = Lexicon::Generate(6, 2, spec.seed);
  Synthesizer synth(lex, spec);
  Rng rng(DeriveSeed(spec.seed, 9));
  std::vector<UtteranceRecord> recs;
  for (int i = 0; i < 4; ++i) {
    recs.push_back(synth.Utterance({lex.InvocabWords()[0], lex.InvocabWords()[1]}, rng));
  }
  std::vector<const UtteranceRecord*> ptrs;
  for (const auto& r : recs) ptrs.push_back(&r);

  ModelConfig cfg;
  cfg.feature_dim = spec.feature_dim;
  cfg.num_units = static_cast<std::size_t>(lex.inventory().size());
  cfg.seed = 3;
  const ParamVector zeros = ZeroParams(cfg);
  const std::unordered_set<std::string> oov = lex.oov_words();
  const auto rep = Evaluate(zeros, cfg, lex, ptrs, oov);
  CHECK(rep.utterances == 4);
  CHECK(rep.ref_words == 8);
  CHECK(rep.deletions == 8);
  CHECK(rep.wer == doctest::Approx(100.0));
  CHECK(rep.recall == 100.0);  // no OOV words in the references

  // A mismatched inventory size is rejected up front.
  ModelConfig bad = cfg;
  bad.num_units += 1;
  CHECK_THROWS_WITH_AS(Evaluate(zeros, bad, lex, ptrs, oov),
                       doctest::Contains("ShapeMismatch"), Error);
}

TEST_CASE("report formatting is stable") {
  EvalReport rep;
  rep.utterances = 2;
  rep.ref_words = 5;
  rep.substitutions = 1;
  rep.wer = 20.0;
  rep.tp = 1;
  rep.fn = 1;
  rep.recall = 50.0;
  rep.precision = 100.0;
  rep.per_word["kolu"] = OovCounts{1, 0, 1};
  const std::string text = FormatReport(rep);
  CHECK(text.find("WER 20.00%") != std::string::npos);
  CHECK(text.find("kolu") != std::string::npos);
  const std::string tsv = FormatReportTsv(rep);
  CHECK(tsv.find("wer\t20.00") != std::string::npos);
  CHECK(tsv.find("oov_recall\t50.00") != std::string::npos);
}
