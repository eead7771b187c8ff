// core/src/lattice.cpp

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

#include "octl/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "octl/logmath.hpp"

namespace octl {

namespace {

// log of the posterior for the unit at extended position u, frame t.
Mat PositionLogProbs(const ExtendedLabels& ext, const FramePosteriors& post) {
  const int S = ext.length();
  const int T = post.num_frames();
  Mat lp(S, T);
  for (int u = 0; u < S; ++u) {
    const int unit = ext.units[u];
    for (int t = 0; t < T; ++t) {
      lp(u, t) = std::log(post.values(unit, t));
    }
  }
  return lp;
}

void CheckInstance(const ExtendedLabels& ext, const FramePosteriors& post) {
  const int T = post.num_frames();
  int max_unit = 0;
  for (int u : ext.units) max_unit = std::max(max_unit, u);
  if (max_unit >= post.num_units()) {
    Throw(ErrorCode::kShapeMismatch,
          "extended labels reference unit " + std::to_string(max_unit) +
              " but posteriors have " + std::to_string(post.num_units()) +
              " rows");
  }
  if (T < ext.min_frames()) {
    Throw(ErrorCode::kUnreachableTarget,
          "target needs at least " + std::to_string(ext.min_frames()) +
              " frames, got " + std::to_string(T));
  }
}

// Label nodes may be entered from two positions back unless the label there
// is the same; equal adjacent labels connect only through the blank between
// them.
inline bool SkipAllowed(const ExtendedLabels& ext, int u) {
  return (u % 2 == 1) && u >= 2 && ext.units[u] != ext.units[u - 2];
}

std::vector<int> CollapseWithBlank(std::span<const int> path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int unit : path) {
    if (unit != prev) out.push_back(unit);
    prev = unit;
  }
  std::erase(out, blank);
  return out;
}

}  // namespace

int ExtendedLabels::min_frames() const {
  int frames = target_length();
  for (std::size_t i = 1; i < source.size(); ++i) {
    if (source[i] == source[i - 1]) ++frames;
  }
  return frames;
}

ExtendedLabels ExtendLabels(std::span<const int> target,
                            const TokenInventory& inv) {
  if (target.empty()) {
    Throw(ErrorCode::kEmptyTarget, "target token sequence is empty");
  }
  ExtendedLabels ext;
  ext.source.assign(target.begin(), target.end());
  const int blank = inv.blank_id();
  for (int id : target) {
    if (id < 0 || id >= inv.size()) {
      Throw(ErrorCode::kInvalidLabel, "unit id " + std::to_string(id) +
                                          " outside inventory of size " +
                                          std::to_string(inv.size()));
    }
    if (id == blank) {
      Throw(ErrorCode::kInvalidLabel, "target may not contain the blank unit");
    }
  }
  ext.units.reserve(2 * target.size() + 1);
  ext.units.push_back(blank);
  for (int id : target) {
    ext.units.push_back(id);
    ext.units.push_back(blank);
  }
  ext.oov_mark.assign(ext.units.size(), false);
  return ext;
}

ExtendedLabels ExtendLabels(const std::vector<std::string>& target,
                            const TokenInventory& inv) {
  std::vector<int> ids;
  ids.reserve(target.size());
  for (const std::string& text : target) {
    const int id = inv.id(text);
    if (id < 0) {
      Throw(ErrorCode::kInvalidLabel, "unknown unit '" + text + "'");
    }
    ids.push_back(id);
  }
  return ExtendLabels(ids, inv);
}

Mat Forward(const ExtendedLabels& ext, const FramePosteriors& post) {
  CheckInstance(ext, post);
  const int S = ext.length();
  const int T = post.num_frames();
  const Mat lp = PositionLogProbs(ext, post);

  Mat la(S, T, kLogZero);
  la(0, 0) = 0.0;
  la(1, 0) = 0.0;
  for (int t = 1; t < T; ++t) {
    for (int u = 0; u < S; ++u) {
      double acc = la(u, t - 1) + lp(u, t - 1);
      if (u >= 1) acc = LogAdd(acc, la(u - 1, t - 1) + lp(u - 1, t - 1));
      if (SkipAllowed(ext, u)) {
        acc = LogAdd(acc, la(u - 2, t - 1) + lp(u - 2, t - 1));
      }
      la(u, t) = acc;
    }
  }
  return la;
}

Mat Backward(const ExtendedLabels& ext, const FramePosteriors& post) {
  CheckInstance(ext, post);
  const int S = ext.length();
  const int T = post.num_frames();
  const Mat lp = PositionLogProbs(ext, post);

  Mat lb(S, T, kLogZero);
  lb(S - 1, T - 1) = lp(S - 1, T - 1);
  lb(S - 2, T - 1) = lp(S - 2, T - 1);
  for (int t = T - 2; t >= 0; --t) {
    for (int u = 0; u < S; ++u) {
      double acc = lb(u, t + 1);
      if (u + 1 < S) acc = LogAdd(acc, lb(u + 1, t + 1));
      if (u + 2 < S && SkipAllowed(ext, u + 2)) {
        acc = LogAdd(acc, lb(u + 2, t + 1));
      }
      lb(u, t) = lp(u, t) + acc;
    }
  }
  return lb;
}

Lattice Lattice::Compute(const ExtendedLabels& ext,
                         const FramePosteriors& post) {
  Lattice lat;
  lat.log_alpha = Forward(ext, post);
  lat.log_beta = Backward(ext, post);
  double total = kLogZero;
  for (std::size_t u = 0; u < lat.log_alpha.rows; ++u) {
    total = LogAdd(total, lat.log_alpha(u, 0) + lat.log_beta(u, 0));
  }
  lat.log_total = total;
  return lat;
}

Mat NodeOccupancy(const Lattice& lat) {
  Mat occ(lat.log_alpha.rows, lat.log_alpha.cols);
  for (std::size_t i = 0; i < occ.size(); ++i) {
    occ.data[i] = std::exp(lat.log_alpha.data[i] + lat.log_beta.data[i]);
  }
  return occ;
}

double CtcLoss(const ExtendedLabels& ext, const FramePosteriors& post) {
  const Lattice lat = Lattice::Compute(ext, post);
  if (lat.log_total == kLogZero) {
    Throw(ErrorCode::kUnreachableTarget,
          "target has zero probability under these posteriors");
  }
  return -lat.log_total;
}

double BruteForceLoss(const ExtendedLabels& ext, const FramePosteriors& post) {
  const int N = post.num_units();
  const int T = post.num_frames();
  double paths = 1.0;
  for (int t = 0; t < T; ++t) {
    paths *= N;
    if (paths > 1e7) {
      Throw(ErrorCode::kInstanceTooLarge,
            "N^T exceeds 1e7, refusing to enumerate");
    }
  }
  const int blank = ext.units[0];

  std::vector<int> path(T, 0);
  double total = 0.0;
  while (true) {
    double prob = 1.0;
    for (int t = 0; t < T; ++t) prob *= post.values(path[t], t);
    if (prob > 0.0 && CollapseWithBlank(path, blank) == ext.source) {
      total += prob;
    }
    int t = T - 1;
    while (t >= 0 && path[t] == N - 1) path[t--] = 0;
    if (t < 0) break;
    ++path[t];
  }
  return -std::log(total);
}

std::vector<int> Collapse(std::span<const int> path,
                          const TokenInventory& inv) {
  return CollapseWithBlank(path, inv.blank_id());
}

std::vector<int> GreedyDecode(const FramePosteriors& post,
                              const TokenInventory& inv) {
  return GreedyDecodeLogits(post.values, inv);
}

std::vector<int> GreedyDecodeLogits(const Mat& scores,
                                    const TokenInventory& inv) {
  std::vector<int> best(scores.cols);
  for (std::size_t t = 0; t < scores.cols; ++t) {
    int arg = 0;
    double top = scores(0, t);
    for (std::size_t k = 1; k < scores.rows; ++k) {
      if (scores(k, t) > top) {
        top = scores(k, t);
        arg = static_cast<int>(k);
      }
    }
    best[t] = arg;
  }
  return Collapse(best, inv);
}

BasicMat<char> ForwardReachable(const ExtendedLabels& ext, int num_frames) {
  const int S = ext.length();
  BasicMat<char> reach(S, num_frames, 0);
  reach(0, 0) = 1;
  reach(1, 0) = 1;
  for (int t = 1; t < num_frames; ++t) {
    for (int u = 0; u < S; ++u) {
      char r = reach(u, t - 1);
      if (u >= 1) r |= reach(u - 1, t - 1);
      if (SkipAllowed(ext, u)) r |= reach(u - 2, t - 1);
      reach(u, t) = r;
    }
  }
  return reach;
}

BasicMat<char> BackwardReachable(const ExtendedLabels& ext, int num_frames) {
  const int S = ext.length();
  BasicMat<char> reach(S, num_frames, 0);
  reach(S - 1, num_frames - 1) = 1;
  reach(S - 2, num_frames - 1) = 1;
  for (int t = num_frames - 2; t >= 0; --t) {
    for (int u = 0; u < S; ++u) {
      char r = reach(u, t + 1);
      if (u + 1 < S) r |= reach(u + 1, t + 1);
      if (u + 2 < S && SkipAllowed(ext, u + 2)) r |= reach(u + 2, t + 1);
      reach(u, t) = r;
    }
  }
  return reach;
}

}  // namespace octl
