// core/src/gradients.cpp

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

#include "octl/gradients.hpp"

#include <algorithm>
#include <cmath>

#include "octl/error.hpp"
#include "octl/logmath.hpp"

namespace octl {

Mat SoftmaxColumns(const Mat& logits) {
  Mat post(logits.rows, logits.cols);
  for (std::size_t t = 0; t < logits.cols; ++t) {
    double hi = logits(0, t);
    for (std::size_t k = 1; k < logits.rows; ++k) {
      hi = std::max(hi, logits(k, t));
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < logits.rows; ++k) {
      post(k, t) = std::exp(logits(k, t) - hi);
      sum += post(k, t);
    }
    for (std::size_t k = 0; k < logits.rows; ++k) post(k, t) /= sum;
  }
  return post;
}

LossGradient PosteriorGradient(const ExtendedLabels& ext,
                               const FramePosteriors& post) {
  const auto lat = Lattice::Compute(ext, post);
  if (lat.log_total == kLogZero) {
    Throw(ErrorCode::kUnreachableTarget, "target has zero likelihood");
  }
  LossGradient out;
  out.loss = -lat.log_total;
  RescaleConfig identity;  // mu = 1, nothing marked
  out.d_posteriors = WordRescaledGradient(lat, ext, post, identity);
  return out;
}

namespace {

// d_logit(j) = post(j) * (d_post(j) - sum_k d_post(k) * post(k)), per column.
Mat ChainThroughSoftmax(const Mat& d_post, const Mat& post) {
  Mat d_logits(d_post.rows, d_post.cols);
  for (std::size_t t = 0; t < d_post.cols; ++t) {
    double dot = 0.0;
    for (std::size_t k = 0; k < d_post.rows; ++k) {
      dot += d_post(k, t) * post(k, t);
    }
    for (std::size_t j = 0; j < d_post.rows; ++j) {
      d_logits(j, t) = post(j, t) * (d_post(j, t) - dot);
    }
  }
  return d_logits;
}

}  // namespace

LossGradient LogitsGradient(const ExtendedLabels& ext, const Mat& logits,
                            const RescaleConfig* rescale, bool contains_oov) {
  auto post = FramePosteriors::Raw(SoftmaxColumns(logits));
  const auto lat = Lattice::Compute(ext, post);
  if (lat.log_total == kLogZero) {
    Throw(ErrorCode::kUnreachableTarget, "target has zero likelihood");
  }

  LossGradient out;
  out.loss = -lat.log_total;

  if (rescale != nullptr && rescale->level == RescaleLevel::kWord) {
    out.d_posteriors = WordRescaledGradient(lat, ext, post, *rescale);
  } else {
    RescaleConfig identity;
    out.d_posteriors = WordRescaledGradient(lat, ext, post, identity);
  }
  out.d_logits = ChainThroughSoftmax(out.d_posteriors, post.values);

  if (rescale != nullptr && rescale->level == RescaleLevel::kSentence &&
      contains_oov) {
    out.loss *= rescale->mu;
    for (double& g : out.d_posteriors.data) g *= rescale->mu;
    for (double& g : out.d_logits.data) g *= rescale->mu;
  }
  return out;
}

FdReport FiniteDiffCheck(const ExtendedLabels& ext, const Mat& logits,
                         const RescaleConfig* rescale, bool contains_oov,
                         double step) {
  // Reduce word-level mu != 1 to the mu = 1 identity: rescaled gradients
  // are not the derivative of any scalar there.
  RescaleConfig effective;
  const RescaleConfig* cfg = rescale;
  FdReport report;
  if (rescale != nullptr && rescale->level == RescaleLevel::kWord &&
      rescale->mu != 1.0) {
    effective = *rescale;
    effective.mu = 1.0;
    cfg = &effective;
    report.note = "word-level mu reset to 1 for the scalar objective";
  }

  const auto analytic = LogitsGradient(ext, logits, cfg, contains_oov);

  auto objective = [&](const Mat& x) {
    auto post = FramePosteriors::Raw(SoftmaxColumns(x));
    double loss = CtcLoss(ext, post);
    if (cfg != nullptr) loss = SentenceRescaledLoss(loss, contains_oov, *cfg);
    return loss;
  };

  Mat probe = logits;
  for (std::size_t i = 0; i < probe.data.size(); ++i) {
    const double saved = probe.data[i];
    probe.data[i] = saved + step;
    const double up = objective(probe);
    probe.data[i] = saved - step;
    const double down = objective(probe);
    probe.data[i] = saved;

    const double fd = (up - down) / (2.0 * step);
    const double an = analytic.d_logits.data[i];
    const double abs_err = std::fabs(an - fd);
    const double rel_err =
        abs_err / std::max({1.0, std::fabs(an), std::fabs(fd)});
    report.max_abs_err = std::max(report.max_abs_err, abs_err);
    report.max_rel_err = std::max(report.max_rel_err, rel_err);
  }
  return report;
}

}  // namespace octl
