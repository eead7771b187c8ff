// tests/test_gradients.cpp

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
#include <vector>

#include "octl/gradients.hpp"
#include "octl/rng.hpp"

using namespace octl;

namespace {

std::vector<std::string> UnitNames(int n) {
  std::vector<std::string> toks;
  for (int i = 0; i + 1 < n; ++i) toks.push_back(std::string(1, 'a' + i));
  toks.push_back("<blank>");
  return toks;
}

Mat RandomLogits(int n, int t, Rng& rng) {
  Mat m(n, t);
  for (double& x : m.data) x = rng.Uniform(-2.0, 2.0);
  return m;
}

}  // namespace

TEST_CASE("single frame posterior gradient") {
  TokenInventory inv({"a", "b", "<blank>"}, 2);
  Mat m(3, 1);
  m(0, 0) = 0.6;
  m(1, 0) = 0.0;
  m(2, 0) = 0.4;
  const auto post = FramePosteriors::Checked(std::move(m));
  const auto ext = ExtendLabels(std::vector<int>{0}, inv);

  const auto g = PosteriorGradient(ext, post);
  CHECK(g.loss == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
  CHECK(g.d_posteriors(0, 0) ==
        doctest::Approx(-1.0 / 0.6).epsilon(1e-12));
  CHECK(g.d_posteriors(1, 0) == 0.0);
  CHECK(g.d_posteriors(2, 0) == 0.0);
}

TEST_CASE("uniform logits, one frame, two units") {
  TokenInventory inv({"a", "<blank>"}, 1);
  const auto ext = ExtendLabels(std::vector<int>{0}, inv);
  Mat logits(2, 1, 0.0);
  const auto g = LogitsGradient(ext, logits);
  // Softmax gives (1/2, 1/2); d_logits = posterior - one-hot target.
  CHECK(g.loss == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(g.d_logits(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(g.d_logits(1, 0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("finite differences on random instances") {
  Rng rng(20260111);
  int checked = 0;
  while (checked < 50) {
    const int n = 2 + static_cast<int>(rng.UniformInt(4));  // 2..5
    const int t = 1 + static_cast<int>(rng.UniformInt(6));
    const int u = 1 + static_cast<int>(rng.UniformInt(3));
    const TokenInventory inv(UnitNames(n), n - 1);
    std::vector<int> y(u);
    for (int i = 0; i < u; ++i) y[i] = static_cast<int>(rng.UniformInt(n - 1));
    const auto ext = ExtendLabels(y, inv);
    if (ext.min_frames() > t) continue;

    const auto logits = RandomLogits(n, t, rng);
    const auto report = FiniteDiffCheck(ext, logits);
    CHECK(report.max_rel_err <= 1e-5);
    ++checked;
  }
}

TEST_CASE("logit gradient columns sum to zero") {
  Rng rng(42);
  TokenInventory inv(UnitNames(4), 3);
  const auto ext = ExtendLabels(std::vector<int>{0, 1, 2}, inv);
  for (int iter = 0; iter < 20; ++iter) {
    const auto logits = RandomLogits(4, 7, rng);
    const auto g = LogitsGradient(ext, logits);
    for (std::size_t t = 0; t < g.d_logits.cols; ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < g.d_logits.rows; ++k) sum += g.d_logits(k, t);
      CHECK(std::fabs(sum) <= 1e-10);
    }
  }
}

TEST_CASE("posterior gradient sign and support") {
  Rng rng(17);
  TokenInventory inv(UnitNames(3), 2);
  const auto ext = ExtendLabels(std::vector<int>{0, 1}, inv);
  const auto logits = RandomLogits(3, 6, rng);
  const auto post = FramePosteriors::Raw(SoftmaxColumns(logits));
  const auto g = PosteriorGradient(ext, post);

  const auto lat = Lattice::Compute(ext, post);
  const auto occ = NodeOccupancy(lat);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t t = 0; t < 6; ++t) {
      double mass = 0.0;
      for (std::size_t uu = 0; uu < ext.length(); ++uu) {
        if (ext.units[uu] == static_cast<int>(k)) mass += occ(uu, t);
      }
      if (mass > 0.0) {
        CHECK(g.d_posteriors(k, t) < 0.0);
      } else {
        CHECK(g.d_posteriors(k, t) == 0.0);
      }
    }
  }
}

TEST_CASE("rescale plumbing through the logits gradient") {
  Rng rng(77);
  TokenInventory inv({"<blank>", "a", "X"}, 0);
  const auto ext = ExtendLabels(std::vector<int>{1, 2}, inv);
  const auto logits = RandomLogits(3, 5, rng);

  RescaleConfig word1;
  word1.level = RescaleLevel::kWord;
  word1.mu = 1.0;
  word1.oov_words = {"x"};
  const auto plain = LogitsGradient(ext, logits);
  const auto same = LogitsGradient(ext, logits, &word1, true);
  for (std::size_t i = 0; i < plain.d_logits.data.size(); ++i) {
    CHECK(same.d_logits.data[i] ==
          doctest::Approx(plain.d_logits.data[i]).epsilon(1e-12));
  }

  // Sentence level scales loss and gradient together.
  RescaleConfig sent;
  sent.level = RescaleLevel::kSentence;
  sent.mu = 7.0;
  const auto scaled = LogitsGradient(ext, logits, &sent, true);
  CHECK(scaled.loss == doctest::Approx(7.0 * plain.loss).epsilon(1e-12));
  for (std::size_t i = 0; i < plain.d_logits.data.size(); ++i) {
    CHECK(scaled.d_logits.data[i] ==
          doctest::Approx(7.0 * plain.d_logits.data[i]).epsilon(1e-12));
  }
  const auto unflagged = LogitsGradient(ext, logits, &sent, false);
  CHECK(unflagged.loss == doctest::Approx(plain.loss).epsilon(1e-12));
}

TEST_CASE("sentence-level finite differences include the mu factor") {
  Rng rng(123);
  TokenInventory inv(UnitNames(3), 2);
  const auto ext = ExtendLabels(std::vector<int>{0, 1}, inv);
  const auto logits = RandomLogits(3, 5, rng);

  RescaleConfig sent;
  sent.level = RescaleLevel::kSentence;
  sent.mu = 13.0;
  const auto report = FiniteDiffCheck(ext, logits, &sent, true);
  CHECK(report.max_rel_err <= 1e-5);
  CHECK(report.note.empty());
}

TEST_CASE("word-level mu has no scalar objective; check falls back") {
  Rng rng(321);
  TokenInventory inv({"<blank>", "a", "X"}, 0);
  auto ext = ExtendLabels(std::vector<int>{1, 2}, inv);
  std::vector<WordSpan> words = {{"a", 0, 1}, {"X", 1, 2}};
  RescaleConfig word;
  word.level = RescaleLevel::kWord;
  word.mu = 100.0;
  word.oov_words = {"x"};
  ext = MarkOovNodes(ext, words, word);

  const auto logits = RandomLogits(3, 5, rng);
  const auto report = FiniteDiffCheck(ext, logits, &word, true);
  CHECK(report.max_rel_err <= 1e-5);
  CHECK(!report.note.empty());
}

TEST_CASE("word-level single frame scales the marked unit") {
  TokenInventory inv({"a", "b", "<blank>"}, 2);
  Mat m(3, 1);
  m(0, 0) = 0.6;
  m(1, 0) = 0.1;
  m(2, 0) = 0.3;
  const auto post = FramePosteriors::Checked(std::move(m));
  auto ext = ExtendLabels(std::vector<int>{0}, inv);
  ext.oov_mark[1] = true;

  RescaleConfig cfg;
  cfg.level = RescaleLevel::kWord;
  cfg.mu = 5.0;
  const auto lat = Lattice::Compute(ext, post);
  const auto g = WordRescaledGradient(lat, ext, post, cfg);
  CHECK(g(0, 0) == doctest::Approx(-5.0 / 0.6).epsilon(1e-12));
  CHECK(g(1, 0) == 0.0);
  CHECK(g(2, 0) == 0.0);
}

TEST_CASE("unreachable instances throw instead of returning garbage") {
  TokenInventory inv({"o", "<blank>"}, 1);
  const auto ext = ExtendLabels(std::vector<int>{0, 0}, inv);
  Mat logits(2, 2, 0.0);
  CHECK_THROWS_WITH_AS(LogitsGradient(ext, logits),
                       doctest::Contains("UnreachableTarget"), Error);
}
