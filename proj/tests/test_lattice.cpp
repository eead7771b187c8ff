// tests/test_lattice.cpp

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

#include "octl/lattice.hpp"
#include "octl/logmath.hpp"
#include "octl/rng.hpp"

using namespace octl;

namespace {

TokenInventory AbInventory() {
  // id 0 = a, 1 = b, 2 = blank
  return TokenInventory({"a", "b", "<blank>"}, 2);
}

Mat UniformPosteriors(int n, int t) {
  return Mat(n, t, 1.0 / n);
}

// Proper random posteriors via softmax of bounded logits; strictly positive.
FramePosteriors RandomPosteriors(int n, int t, Rng& rng) {
  Mat m(n, t);
  for (int j = 0; j < t; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      m(i, j) = std::exp(rng.Uniform(-2.0, 2.0));
      sum += m(i, j);
    }
    for (int i = 0; i < n; ++i) m(i, j) /= sum;
  }
  return FramePosteriors::Checked(std::move(m));
}

std::vector<int> RandomTarget(int n_labels, int u, Rng& rng) {
  std::vector<int> y(u);
  for (int i = 0; i < u; ++i) {
    y[i] = static_cast<int>(rng.UniformInt(n_labels));
  }
  return y;
}

}  // namespace

TEST_CASE("extend_labels interleaves blanks") {
  const auto inv = AbInventory();

  auto ext = ExtendLabels(std::vector<int>{0}, inv);
  CHECK(ext.units == std::vector<int>{2, 0, 2});
  CHECK(ext.source == std::vector<int>{0});
  CHECK(ext.oov_mark == std::vector<bool>{false, false, false});

  ext = ExtendLabels(std::vector<int>{0, 1}, inv);
  CHECK(ext.units == std::vector<int>{2, 0, 2, 1, 2});
}

TEST_CASE("extend_labels matches the subword lattice layout") {
  TokenInventory inv({"<blank>", "bre_", "xi_", "t"}, 0);
  auto ext = ExtendLabels(std::vector<std::string>{"bre_", "xi_", "t"}, inv);
  CHECK(ext.units == std::vector<int>{0, 1, 0, 2, 0, 3, 0});
  CHECK(ext.length() == 7);
}

TEST_CASE("extend_labels rejects bad targets") {
  const auto inv = AbInventory();
  CHECK_THROWS_WITH_AS(ExtendLabels(std::vector<int>{}, inv),
                       doctest::Contains("EmptyTarget"), Error);
  CHECK_THROWS_AS(ExtendLabels(std::vector<int>{5}, inv), Error);
  CHECK_THROWS_AS(ExtendLabels(std::vector<int>{2}, inv), Error);  // blank
  CHECK_THROWS_AS(
      ExtendLabels(std::vector<std::string>{"nope"}, inv), Error);
}

TEST_CASE("single frame, single label") {
  const auto inv = AbInventory();
  Mat m(3, 1);
  m(0, 0) = 0.6;  // a
  m(1, 0) = 0.0;  // b
  m(2, 0) = 0.4;  // blank
  const auto post = FramePosteriors::Checked(std::move(m));
  const auto ext = ExtendLabels(std::vector<int>{0}, inv);

  const auto lat = Lattice::Compute(ext, post);
  CHECK(lat.log_total == doctest::Approx(std::log(0.6)).epsilon(1e-12));
  CHECK(CtcLoss(ext, post) == doctest::Approx(-std::log(0.6)).epsilon(1e-12));
  CHECK(BruteForceLoss(ext, post) ==
        doctest::Approx(-std::log(0.6)).epsilon(1e-12));

  // Only the label node is occupied.
  const auto occ = NodeOccupancy(lat);
  CHECK(occ(1, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(occ(0, 0) == 0.0);
  CHECK(occ(2, 0) == 0.0);
}

TEST_CASE("T=3 uniform thirds gives 5/27") {
  // Valid frame paths for (a,b): aab, abb, a.b, ab., .ab -> 5 * (1/27).
  const auto inv = AbInventory();
  const auto post = FramePosteriors::Checked(UniformPosteriors(3, 3));
  const auto ext = ExtendLabels(std::vector<int>{0, 1}, inv);

  const double expected = -std::log(5.0 / 27.0);
  CHECK(BruteForceLoss(ext, post) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(CtcLoss(ext, post) == doctest::Approx(expected).epsilon(1e-12));

  const auto lat = Lattice::Compute(ext, post);
  const auto occ = NodeOccupancy(lat);
  for (std::size_t t = 0; t < occ.cols; ++t) {
    double sum = 0.0;
    for (std::size_t u = 0; u < occ.rows; ++u) sum += occ(u, t);
    CHECK(sum == doctest::Approx(5.0 / 27.0).epsilon(1e-12));
  }
}

TEST_CASE("T=2 single label over uniform thirds") {
  // Paths aa, a., .a -> 3/9.
  const auto inv = AbInventory();
  const auto post = FramePosteriors::Checked(UniformPosteriors(3, 2));
  const auto ext = ExtendLabels(std::vector<int>{0}, inv);
  CHECK(CtcLoss(ext, post) == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(BruteForceLoss(ext, post) ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
}

TEST_CASE("repeated label needs a separating blank") {
  TokenInventory inv({"o", "<blank>"}, 1);
  const auto ext = ExtendLabels(std::vector<int>{0, 0}, inv);
  CHECK(ext.min_frames() == 3);

  const auto post = FramePosteriors::Checked(UniformPosteriors(2, 2));
  CHECK_THROWS_WITH_AS(Forward(ext, post),
                       doctest::Contains("UnreachableTarget"), Error);
  CHECK(std::isinf(BruteForceLoss(ext, post)));

  // With three frames the only path is o.o.
  const auto post3 = FramePosteriors::Checked(UniformPosteriors(2, 3));
  CHECK(CtcLoss(ext, post3) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("beta convention: alpha*beta recovers the total at every frame") {
  const auto inv = AbInventory();
  const auto post = FramePosteriors::Checked(UniformPosteriors(3, 3));
  const auto ext = ExtendLabels(std::vector<int>{0, 1}, inv);
  const auto lat = Lattice::Compute(ext, post);
  for (std::size_t t = 0; t < lat.log_alpha.cols; ++t) {
    double acc = kLogZero;
    for (std::size_t u = 0; u < lat.log_alpha.rows; ++u) {
      acc = LogAdd(acc, lat.log_alpha(u, t) + lat.log_beta(u, t));
    }
    CHECK(acc == doctest::Approx(lat.log_total).epsilon(1e-12));
  }
}

TEST_CASE("oracle equivalence on random instances") {
  Rng rng(20260101);
  int checked = 0;
  while (checked < 100) {
    const int n = 2 + static_cast<int>(rng.UniformInt(3));  // 2..4 incl blank
    const int t = 1 + static_cast<int>(rng.UniformInt(8));
    const int u = 1 + static_cast<int>(rng.UniformInt(3));
    std::vector<std::string> toks;
    for (int i = 0; i + 1 < n; ++i) toks.push_back(std::string(1, 'a' + i));
    toks.push_back("<blank>");
    const TokenInventory inv(toks, n - 1);

    const auto y = RandomTarget(n - 1, u, rng);
    const auto ext = ExtendLabels(y, inv);
    if (ext.min_frames() > t) continue;
    const auto post = RandomPosteriors(n, t, rng);

    const double loss = CtcLoss(ext, post);
    const double oracle = BruteForceLoss(ext, post);
    CHECK(std::fabs(loss - oracle) <= 1e-9 * (1.0 + std::fabs(loss)));
    CHECK(loss >= 0.0);

    // Per-frame occupancy conservation.
    const auto lat = Lattice::Compute(ext, post);
    const auto occ = NodeOccupancy(lat);
    const double total = std::exp(lat.log_total);
    for (std::size_t tt = 0; tt < occ.cols; ++tt) {
      double sum = 0.0;
      for (std::size_t uu = 0; uu < occ.rows; ++uu) sum += occ(uu, tt);
      CHECK(std::fabs(sum - total) <= 1e-9 * total);
    }
    ++checked;
  }
}

TEST_CASE("alpha/beta are -inf exactly off the reachable set") {
  Rng rng(7);
  for (int iter = 0; iter < 40; ++iter) {
    const int t = 2 + static_cast<int>(rng.UniformInt(6));
    const int u = 1 + static_cast<int>(rng.UniformInt(3));
    TokenInventory inv({"a", "b", "<blank>"}, 2);
    const auto y = RandomTarget(2, u, rng);
    const auto ext = ExtendLabels(y, inv);
    if (ext.min_frames() > t) continue;
    const auto post = RandomPosteriors(3, t, rng);

    const auto la = Forward(ext, post);
    const auto lb = Backward(ext, post);
    const auto fr = ForwardReachable(ext, t);
    const auto br = BackwardReachable(ext, t);
    for (std::size_t uu = 0; uu < la.rows; ++uu) {
      for (std::size_t tt = 0; tt < la.cols; ++tt) {
        CHECK((la(uu, tt) != kLogZero) == static_cast<bool>(fr(uu, tt)));
        CHECK((lb(uu, tt) != kLogZero) == static_cast<bool>(br(uu, tt)));
        // The generic frontier bound: u beyond 2t+1 is never reachable.
        if (uu > 2 * tt + 1) CHECK(la(uu, tt) == kLogZero);
      }
    }
  }
}

TEST_CASE("collapse merges repeats before dropping blanks") {
  const auto inv = AbInventory();
  CHECK(Collapse(std::vector<int>{0, 0, 2, 1, 1}, inv) ==
        std::vector<int>{0, 1});
  CHECK(Collapse(std::vector<int>{2, 2, 2}, inv) == std::vector<int>{});
  CHECK(Collapse(std::vector<int>{0, 2, 0}, inv) == std::vector<int>{0, 0});
}

TEST_CASE("collapse round-trips any valid alignment of a target") {
  Rng rng(99);
  const auto inv = AbInventory();
  for (int iter = 0; iter < 200; ++iter) {
    const int u = 1 + static_cast<int>(rng.UniformInt(4));
    const auto y = RandomTarget(2, u, rng);

    // Expand y into a frame path: stuttered labels with optional blank runs,
    // mandatory blank between equal neighbours.
    std::vector<int> path;
    for (int i = 0; i < u; ++i) {
      const bool forced = i > 0 && y[i - 1] == y[i];
      if ((i == 0 && rng.UniformInt(2)) || forced || rng.UniformInt(2)) {
        for (std::uint64_t r = 0; r <= rng.UniformInt(2); ++r) path.push_back(2);
      }
      for (std::uint64_t r = 0; r <= rng.UniformInt(3); ++r) path.push_back(y[i]);
    }
    if (rng.UniformInt(2)) path.push_back(2);

    CHECK(Collapse(path, inv) == y);
    // Output never contains the blank id.
    for (int unit : Collapse(path, inv)) CHECK(unit != 2);
  }
}

TEST_CASE("greedy decode") {
  const auto inv = AbInventory();

  Mat m(3, 4, 0.1);
  m(0, 0) = 0.8;  // a
  m(0, 1) = 0.8;  // a
  m(2, 2) = 0.8;  // blank
  m(1, 3) = 0.8;  // b
  for (std::size_t t = 0; t < 4; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += m(k, t);
    for (std::size_t k = 0; k < 3; ++k) m(k, t) /= sum;
  }
  CHECK(GreedyDecode(FramePosteriors::Checked(std::move(m)), inv) ==
        std::vector<int>{0, 1});

  // All-blank argmax decodes to the empty sequence.
  Mat blanks(3, 3, 0.1);
  for (std::size_t t = 0; t < 3; ++t) blanks(2, t) = 0.8;
  CHECK(GreedyDecode(FramePosteriors::Raw(std::move(blanks)), inv).empty());

  // Ties break toward the lowest unit id.
  Mat tie(3, 1, 1.0 / 3.0);
  CHECK(GreedyDecode(FramePosteriors::Checked(std::move(tie)), inv) ==
        std::vector<int>{0});
}

TEST_CASE("brute force refuses oversized instances") {
  const auto inv = AbInventory();
  const auto ext = ExtendLabels(std::vector<int>{0}, inv);
  const auto post = FramePosteriors::Checked(UniformPosteriors(3, 20));
  CHECK_THROWS_WITH_AS(BruteForceLoss(ext, post),
                       doctest::Contains("InstanceTooLarge"), Error);
}

TEST_CASE("posterior validation") {
  Mat bad(2, 1);
  bad(0, 0) = 0.7;
  bad(1, 0) = 0.7;
  CHECK_THROWS_AS(FramePosteriors::Checked(std::move(bad)), Error);

  Mat neg(2, 1);
  neg(0, 0) = -0.1;
  neg(1, 0) = 1.1;
  CHECK_THROWS_AS(FramePosteriors::Checked(std::move(neg)), Error);
}
