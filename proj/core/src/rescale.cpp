// core/src/rescale.cpp

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

#include "octl/rescale.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "octl/error.hpp"
#include "octl/logmath.hpp"

namespace octl {

namespace {

std::string Lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return out;
}

}  // namespace

bool RescaleConfig::IsOov(const std::string& word) const {
  return oov_words.count(Lowercase(word)) > 0;
}

ExtendedLabels MarkOovNodes(ExtendedLabels ext, std::span<const WordSpan> words,
                            const RescaleConfig& cfg) {
  const std::size_t num_tokens = ext.target_length();
  std::size_t expect = 0;
  for (const auto& span : words) {
    if (span.begin != expect || span.end <= span.begin ||
        span.end > num_tokens) {
      Throw(ErrorCode::kInvalidBoundaries,
            "word spans must partition the token range [0, " +
                std::to_string(num_tokens) + ")");
    }
    expect = span.end;
  }
  if (expect != num_tokens) {
    Throw(ErrorCode::kInvalidBoundaries, "word spans leave a gap at the end");
  }

  std::fill(ext.oov_mark.begin(), ext.oov_mark.end(), false);
  for (const auto& span : words) {
    if (!cfg.IsOov(span.word)) continue;
    // Token i sits at extended position 2i+1; the blank before it at 2i.
    for (std::size_t i = span.begin; i < span.end; ++i) {
      ext.oov_mark[2 * i + 1] = true;
      if (i > span.begin && cfg.blank_policy != BlankPolicy::kLabelsOnly) {
        ext.oov_mark[2 * i] = true;
      }
    }
    if (cfg.blank_policy == BlankPolicy::kLabelsInteriorAndTrailingBlank) {
      ext.oov_mark[2 * span.end] = true;
    }
  }
  return ext;
}

double SentenceRescaledLoss(double loss, bool contains_oov,
                            const RescaleConfig& cfg) {
  if (cfg.level == RescaleLevel::kSentence && contains_oov) {
    return cfg.mu * loss;
  }
  return loss;
}

Mat RescaleOccupancies(const Mat& occ, const ExtendedLabels& ext,
                       const RescaleConfig& cfg) {
  if (occ.rows != ext.length()) {
    Throw(ErrorCode::kShapeMismatch, "occupancy rows do not match the lattice");
  }
  Mat out = occ;
  for (std::size_t u = 0; u < out.rows; ++u) {
    if (!ext.oov_mark[u]) continue;
    for (std::size_t t = 0; t < out.cols; ++t) out(u, t) *= cfg.mu;
  }
  return out;
}

Mat WordRescaledGradient(const Lattice& lat, const ExtendedLabels& ext,
                         const FramePosteriors& post, const RescaleConfig& cfg) {
  const std::size_t n = post.num_units();
  const std::size_t T = post.num_frames();
  const std::size_t S = ext.length();
  if (lat.log_alpha.rows != S || lat.log_alpha.cols != T) {
    Throw(ErrorCode::kShapeMismatch, "lattice does not match the instance");
  }
  const double log_mu = std::log(cfg.mu);

  Mat grad(n, T, 0.0);
  // Accumulate log(alpha*beta*mu^mark) per unit in the log domain, then
  // normalize by the unrescaled total.
  std::vector<double> acc(n);
  for (std::size_t t = 0; t < T; ++t) {
    std::fill(acc.begin(), acc.end(), kLogZero);
    for (std::size_t u = 0; u < S; ++u) {
      double term = lat.log_alpha(u, t) + lat.log_beta(u, t);
      if (term == kLogZero) continue;
      if (ext.oov_mark[u]) term += log_mu;
      const int k = ext.units[u];
      acc[k] = LogAdd(acc[k], term);
    }
    for (std::size_t k = 0; k < n; ++k) {
      if (acc[k] == kLogZero) continue;
      grad(k, t) =
          -std::exp(acc[k] - lat.log_total) / post.values(k, t);
    }
  }
  return grad;
}

}  // namespace octl
