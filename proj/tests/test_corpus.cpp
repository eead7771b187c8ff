// tests/test_corpus.cpp

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
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "octl/corpus.hpp"
#include "octl/error.hpp"

using namespace octl;

namespace {

std::filesystem::path TempDir(const char* name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

SyntheticSpec SmallSpec(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.feature_dim = 8;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST_CASE("greedy longest-match tokenization") {
  TokenInventory inv({"ne", "ws", "n", "e", "w", "s", "<blank>"}, 6);
  CHECK(Tokenize("news", inv) == std::vector<int>{0, 1});
  CHECK(Tokenize("sew", inv) == std::vector<int>{5, 3, 4});

  TokenInventory chars({"n", "e", "w", "s", "<blank>"}, 4);
  CHECK(Tokenize("news", chars) == std::vector<int>{0, 1, 2, 3});

  CHECK_THROWS_WITH_AS(Tokenize("nexus", inv),
                       doctest::Contains("UncoverableWord"), Error);
  CHECK_THROWS_AS(Tokenize("", inv), Error);
}

TEST_CASE("lexicon generation") {
  const auto lex = Lexicon::Generate(40, 10, 7);
  CHECK(lex.InvocabWords().size() == 40);
  CHECK(lex.OovWords().size() == 10);
  CHECK(lex.words().size() == 50);

  std::set<std::string> uniq(lex.words().begin(), lex.words().end());
  CHECK(uniq.size() == 50);

  // Word shape: 2..3 two-character pieces, so 4 or 6 characters.
  for (const auto& w : lex.words()) {
    CHECK((w.size() == 4 || w.size() == 6));
  }

  // The unit pools of OOV and in-vocab words are disjoint.
  std::set<int> invocab_units, oov_units;
  for (const auto& w : lex.InvocabWords()) {
    for (int t : lex.Tokens(w)) invocab_units.insert(t);
  }
  for (const auto& w : lex.OovWords()) {
    for (int t : lex.Tokens(w)) oov_units.insert(t);
  }
  for (int t : oov_units) CHECK(invocab_units.count(t) == 0);

  // Same seed regenerates the same lexicon; another seed does not.
  const auto again = Lexicon::Generate(40, 10, 7);
  CHECK(again.words() == lex.words());
  const auto other = Lexicon::Generate(40, 10, 8);
  CHECK(other.words() != lex.words());
}

TEST_CASE("word tokens carry the continuation marker") {
  const auto lex = Lexicon::Generate(10, 4, 3);
  const auto& inv = lex.inventory();
  for (const auto& w : lex.words()) {
    const auto toks = lex.Tokens(w);
    CHECK(toks.size() >= 2);
    std::string rebuilt;
    for (std::size_t i = 0; i < toks.size(); ++i) {
      const auto& text = inv.token(toks[i]);
      if (i + 1 < toks.size()) {
        REQUIRE(text.back() == '_');
        rebuilt += text.substr(0, text.size() - 1);
      } else {
        CHECK(text.back() != '_');
        rebuilt += text;
      }
    }
    CHECK(rebuilt == w);
  }
}

TEST_CASE("detokenization round trip") {
  const auto lex = Lexicon::Generate(12, 5, 9);
  Rng rng(4);
  const auto all = lex.words();
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<std::string> sentence;
    const std::size_t len = 1 + rng.UniformInt(6);
    for (std::size_t i = 0; i < len; ++i) {
      sentence.push_back(all[rng.UniformInt(all.size())]);
    }
    CHECK(lex.Detokenize(lex.SentenceTokens(sentence)) == sentence);
  }

  // A stream cut mid-word flushes the residue as a word.
  const auto toks = lex.Tokens(lex.words()[0]);
  std::vector<int> cut(toks.begin(), toks.end() - 1);
  const auto words = lex.Detokenize(cut);
  CHECK(words.size() == 1);
  CHECK(lex.words()[0].starts_with(words[0]));

  // Blanks in the stream are ignored.
  std::vector<int> with_blanks;
  with_blanks.push_back(lex.inventory().blank_id());
  for (int t : toks) {
    with_blanks.push_back(t);
    with_blanks.push_back(lex.inventory().blank_id());
  }
  CHECK(lex.Detokenize(with_blanks) == std::vector<std::string>{lex.words()[0]});
}

TEST_CASE("synthesis determinism and frame arithmetic") {
  const auto lex = Lexicon::Generate(10, 4, 21);
  SyntheticSpec spec = SmallSpec(21);
  spec.frames_lo = spec.frames_hi = 3;
  spec.silence_lo = spec.silence_hi = 0;
  spec.noise_sigma = 0.0;
  const Synthesizer synth(lex, spec);

  std::string word;
  for (const auto& w : lex.words()) {
    if (w.size() == 4) {
      word = w;
      break;
    }
  }
  REQUIRE(lex.Tokens(word).size() == 2);
  Rng rng(1);
  const auto rec = synth.Utterance({word}, rng);
  CHECK(rec.features.rows == 6);  // 2 tokens x 3 frames, no silence
  CHECK(rec.features.cols == 8);
  CHECK(rec.tokens == lex.Tokens(word));

  // Zero noise: every frame is its token mean, cast to f32.
  for (std::size_t t = 0; t < rec.features.rows; ++t) {
    const int tok = rec.tokens[t / 3];
    const auto& mean = synth.MeanFor(tok);
    for (std::size_t k = 0; k < rec.features.cols; ++k) {
      CHECK(rec.features(t, k) == static_cast<float>(mean[k]));
    }
  }

  Rng rng_a(5), rng_b(5);
  const auto a = synth.Utterance({word, lex.words()[3]}, rng_a);
  const auto b = synth.Utterance({word, lex.words()[3]}, rng_b);
  CHECK(a.features.data == b.features.data);
}

TEST_CASE("unit means stay separated") {
  const auto lex = Lexicon::Generate(40, 10, 33);
  const SyntheticSpec spec = SmallSpec(33);
  const Synthesizer synth(lex, spec);
  const double min_dist = 0.5 * std::sqrt(static_cast<double>(spec.feature_dim));

  const auto& inv = lex.inventory();
  std::vector<std::vector<double>> means;
  means.emplace_back(spec.feature_dim, 0.0);  // silence
  for (int k = 0; k < static_cast<int>(inv.size()); ++k) {
    if (k == inv.blank_id()) continue;
    means.push_back(synth.MeanFor(k));
    for (double m : means.back()) CHECK(std::fabs(m) <= 1.0);
  }
  for (std::size_t i = 0; i < means.size(); ++i) {
    for (std::size_t j = i + 1; j < means.size(); ++j) {
      double sq = 0.0;
      for (std::size_t k = 0; k < spec.feature_dim; ++k) {
        sq += (means[i][k] - means[j][k]) * (means[i][k] - means[j][k]);
      }
      CHECK(std::sqrt(sq) >= min_dist);
    }
  }
}

TEST_CASE("split construction") {
  const auto lex = Lexicon::Generate(40, 10, 55);
  const SyntheticSpec spec = SmallSpec(55);
  SplitSizes sizes;
  sizes.source_train = 60;
  sizes.source_val = 12;
  sizes.target_total = 40;
  sizes.oov_test = 20;
  sizes.invocab_test = 15;
  sizes.target_support = 10;
  const auto ds = BuildSplits(lex, spec, sizes);

  CHECK(ds.Select("source", "train").size() == 60);
  CHECK(ds.Select("source", "val").size() == 12);
  CHECK(ds.Select("target", "train").size() == 36);  // 9:1 of 40
  CHECK(ds.Select("target", "val").size() == 4);
  CHECK(ds.Select("target", "test").size() == 20);
  CHECK(ds.Select("source", "test").size() == 15);

  std::set<std::string> ids;
  for (const auto& rec : ds.records) {
    CHECK(ids.insert(rec.id).second);
    bool has_oov = false;
    for (const auto& w : rec.words) has_oov = has_oov || lex.IsOov(w);
    CHECK(rec.contains_oov == has_oov);
    CHECK(rec.tokens == lex.SentenceTokens(rec.words));
    if (rec.domain == "source") CHECK(!rec.contains_oov);
    if (rec.domain == "target") {
      std::size_t n_oov = 0;
      for (const auto& w : rec.words) n_oov += lex.IsOov(w) ? 1 : 0;
      CHECK(n_oov >= 1);
      CHECK(n_oov <= 2);
      CHECK(rec.words.size() >= 3);
      CHECK(rec.words.size() <= 8);
    }
  }

  // Every OOV word shows up in target train and in the OOV test split.
  for (const auto* split : {"train", "test"}) {
    std::set<std::string> seen;
    for (const auto* rec : ds.Select("target", split)) {
      for (const auto& w : rec->words) {
        if (lex.IsOov(w)) seen.insert(w);
      }
    }
    CHECK(seen.size() == 10);
  }

  // Target filler words come from the support slice only.
  const auto invocab = lex.InvocabWords();
  const std::set<std::string> support(invocab.begin(), invocab.begin() + 10);
  for (const auto* rec : ds.Select("target", "train")) {
    for (const auto& w : rec->words) {
      if (!lex.IsOov(w)) CHECK(support.count(w) == 1);
    }
  }

  // Rebuilding with the same spec is bit-identical; the OOV test split
  // uses its own noise stream so it differs from target train.
  const auto ds2 = BuildSplits(lex, spec, sizes);
  REQUIRE(ds2.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(ds2.records[i].features.data == ds.records[i].features.data);
  }
}

TEST_CASE("mask augmentation") {
  Rng rng(3);
  FloatMat f(6, 10);
  for (float& v : f.data) v = 1.0f;

  FloatMat untouched = f;
  MaskAugment(untouched, rng, 0);
  CHECK(untouched.data == f.data);

  Rng rng2(4);
  FloatMat masked = f;
  MaskAugment(masked, rng2, 3);
  std::set<std::size_t> zero_cols;
  for (std::size_t k = 0; k < masked.cols; ++k) {
    bool all_zero = true, any_zero = false;
    for (std::size_t t = 0; t < masked.rows; ++t) {
      all_zero = all_zero && masked(t, k) == 0.0f;
      any_zero = any_zero || masked(t, k) == 0.0f;
    }
    CHECK(all_zero == any_zero);  // a column is masked whole or not at all
    if (all_zero) zero_cols.insert(k);
  }
  CHECK(zero_cols.size() <= 6);  // two bands of width <= 3

  FloatMat bad(4, 3);
  Rng rng3(5);
  CHECK_THROWS_AS(MaskAugment(bad, rng3, 3), Error);
}

TEST_CASE("dataset round trip") {
  const auto lex = Lexicon::Generate(12, 5, 77);
  const SyntheticSpec spec = SmallSpec(77);
  SplitSizes sizes;
  sizes.source_train = 12;
  sizes.source_val = 6;
  sizes.target_total = 10;
  sizes.oov_test = 6;
  sizes.invocab_test = 5;
  sizes.target_support = 6;
  const auto ds = BuildSplits(lex, spec, sizes);

  const auto dir = TempDir("octl_ds_roundtrip");
  WriteDataset(dir, ds);
  const auto back = ReadDataset(dir);

  REQUIRE(back.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    const auto& a = ds.records[i];
    const auto& b = back.records[i];
    CHECK(a.id == b.id);
    CHECK(a.words == b.words);
    CHECK(a.tokens == b.tokens);
    CHECK(a.split == b.split);
    CHECK(a.domain == b.domain);
    CHECK(a.contains_oov == b.contains_oov);
    CHECK(a.features.data == b.features.data);
  }
  CHECK(back.lexicon.words() == ds.lexicon.words());
  CHECK(back.lexicon.inventory().size() == ds.lexicon.inventory().size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty dataset round trips") {
  const auto lex = Lexicon::Generate(6, 2, 1);
  const auto dir = TempDir("octl_ds_empty");
  WriteDataset(dir, Dataset{lex, {}});
  const auto back = ReadDataset(dir);
  CHECK(back.records.empty());
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupt datasets are rejected") {
  const auto lex = Lexicon::Generate(8, 3, 13);
  const SyntheticSpec spec = SmallSpec(13);
  SplitSizes sizes;
  sizes.source_train = 11;
  sizes.source_val = 4;
  sizes.target_total = 10;
  sizes.oov_test = 4;
  sizes.invocab_test = 4;
  sizes.target_support = 4;
  const auto ds = BuildSplits(lex, spec, sizes);
  const auto dir = TempDir("octl_ds_corrupt");

  WriteDataset(dir, ds);
  const auto blob = dir / "features.ctcf";
  const auto size = std::filesystem::file_size(blob);
  std::filesystem::resize_file(blob, size - 7);
  CHECK_THROWS_WITH_AS(ReadDataset(dir), doctest::Contains("CorruptDataset"),
                       Error);

  WriteDataset(dir, ds);
  {
    std::fstream f(blob, std::ios::in | std::ios::out | std::ios::binary);
    f.write("NOPE", 4);
  }
  CHECK_THROWS_AS(ReadDataset(dir), Error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("oov test features differ from target train") {
  const auto lex = Lexicon::Generate(10, 4, 99);
  const SyntheticSpec spec = SmallSpec(99);
  SplitSizes sizes;
  sizes.source_train = 10;
  sizes.source_val = 4;
  sizes.target_total = 10;
  sizes.oov_test = 5;
  sizes.invocab_test = 4;
  sizes.target_support = 5;
  const auto ds = BuildSplits(lex, spec, sizes);
  const auto train = ds.Select("target", "train");
  const auto test = ds.Select("target", "test");
  for (const auto* a : test) {
    for (const auto* b : train) {
      CHECK(a->features.data != b->features.data);
    }
  }
}
