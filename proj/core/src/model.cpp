// core/src/model.cpp

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

#include "octl/model.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "octl/error.hpp"
#include "octl/rng.hpp"

namespace octl {

namespace {

void CheckConfig(const ModelConfig& cfg) {
  if (cfg.feature_dim == 0 || cfg.hidden_size == 0 || cfg.num_units == 0) {
    Throw(ErrorCode::kConfigError, "model dimensions must be positive");
  }
}

void CheckFeatures(const FloatMat& features, const ModelConfig& cfg) {
  if (features.cols != cfg.feature_dim) {
    Throw(ErrorCode::kShapeMismatch,
          "feature width " + std::to_string(features.cols) +
              " does not match feature_dim " +
              std::to_string(cfg.feature_dim));
  }
  if (features.rows == 0) {
    Throw(ErrorCode::kShapeMismatch, "empty feature matrix");
  }
}

// Context window around frame t, edges clamped to the first/last frame.
void GatherContext(const FloatMat& features, const ModelConfig& cfg,
                   std::size_t t, std::vector<double>& out) {
  const std::ptrdiff_t T = static_cast<std::ptrdiff_t>(features.rows);
  const std::ptrdiff_t W = static_cast<std::ptrdiff_t>(cfg.context_window);
  std::size_t j = 0;
  for (std::ptrdiff_t off = -W; off <= W; ++off) {
    std::ptrdiff_t src = static_cast<std::ptrdiff_t>(t) + off;
    src = std::clamp<std::ptrdiff_t>(src, 0, T - 1);
    for (std::size_t k = 0; k < cfg.feature_dim; ++k) {
      out[j++] = features(static_cast<std::size_t>(src), k);
    }
  }
}

}  // namespace

ParamVector ZeroParams(const ModelConfig& cfg) {
  CheckConfig(cfg);
  const std::size_t in = cfg.input_dim();
  return ParamVector({{"w1", cfg.hidden_size * in},
                      {"b1", cfg.hidden_size},
                      {"w2", cfg.num_units * cfg.hidden_size},
                      {"b2", cfg.num_units}});
}

ParamVector InitParams(const ModelConfig& cfg) {
  ParamVector params = ZeroParams(cfg);
  Rng rng(cfg.seed);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(cfg.input_dim()));
  for (double& w : params.Segment("w1")) w = rng.Uniform(-s1, s1);
  const double s2 = 1.0 / std::sqrt(static_cast<double>(cfg.hidden_size));
  for (double& w : params.Segment("w2")) w = rng.Uniform(-s2, s2);
  return params;
}

Mat ModelForward(const ParamVector& params, const FloatMat& features,
                 const ModelConfig& cfg) {
  CheckConfig(cfg);
  CheckFeatures(features, cfg);
  CheckSameLayout(params, ZeroParams(cfg));

  const std::size_t T = features.rows;
  const std::size_t in = cfg.input_dim();
  const std::size_t H = cfg.hidden_size;
  const std::size_t N = cfg.num_units;
  const auto w1 = params.Segment("w1");
  const auto b1 = params.Segment("b1");
  const auto w2 = params.Segment("w2");
  const auto b2 = params.Segment("b2");

  Mat logits(N, T);
  std::vector<double> ctx(in), hidden(H);
  for (std::size_t t = 0; t < T; ++t) {
    GatherContext(features, cfg, t, ctx);
    for (std::size_t h = 0; h < H; ++h) {
      double acc = b1[h];
      const double* row = w1.data() + h * in;
      for (std::size_t j = 0; j < in; ++j) acc += row[j] * ctx[j];
      hidden[h] = std::tanh(acc);
    }
    for (std::size_t k = 0; k < N; ++k) {
      double acc = b2[k];
      const double* row = w2.data() + k * H;
      for (std::size_t h = 0; h < H; ++h) acc += row[h] * hidden[h];
      logits(k, t) = acc;
    }
  }
  return logits;
}

ParamVector ModelBackward(const ParamVector& params, const FloatMat& features,
                          const Mat& d_logits, const ModelConfig& cfg) {
  CheckConfig(cfg);
  CheckFeatures(features, cfg);
  CheckSameLayout(params, ZeroParams(cfg));
  if (d_logits.rows != cfg.num_units || d_logits.cols != features.rows) {
    Throw(ErrorCode::kShapeMismatch, "d_logits shape does not match");
  }

  const std::size_t T = features.rows;
  const std::size_t in = cfg.input_dim();
  const std::size_t H = cfg.hidden_size;
  const std::size_t N = cfg.num_units;
  const auto w1 = params.Segment("w1");
  const auto b1 = params.Segment("b1");
  const auto w2 = params.Segment("w2");

  ParamVector grad = ZeroParams(cfg);
  auto g_w1 = grad.Segment("w1");
  auto g_b1 = grad.Segment("b1");
  auto g_w2 = grad.Segment("w2");
  auto g_b2 = grad.Segment("b2");

  std::vector<double> ctx(in), hidden(H), d_hidden(H);
  for (std::size_t t = 0; t < T; ++t) {
    GatherContext(features, cfg, t, ctx);
    for (std::size_t h = 0; h < H; ++h) {
      double acc = b1[h];
      const double* row = w1.data() + h * in;
      for (std::size_t j = 0; j < in; ++j) acc += row[j] * ctx[j];
      hidden[h] = std::tanh(acc);
    }

    std::fill(d_hidden.begin(), d_hidden.end(), 0.0);
    for (std::size_t k = 0; k < N; ++k) {
      const double dk = d_logits(k, t);
      if (dk == 0.0) continue;
      g_b2[k] += dk;
      double* grow = g_w2.data() + k * H;
      const double* wrow = w2.data() + k * H;
      for (std::size_t h = 0; h < H; ++h) {
        grow[h] += dk * hidden[h];
        d_hidden[h] += dk * wrow[h];
      }
    }
    for (std::size_t h = 0; h < H; ++h) {
      const double d_pre = d_hidden[h] * (1.0 - hidden[h] * hidden[h]);
      if (d_pre == 0.0) continue;
      g_b1[h] += d_pre;
      double* grow = g_w1.data() + h * in;
      for (std::size_t j = 0; j < in; ++j) grow[j] += d_pre * ctx[j];
    }
  }
  return grad;
}

std::size_t TargetPerBatch(const TrainConfig& cfg) {
  const double s = static_cast<double>(cfg.mix_source);
  const double t = static_cast<double>(cfg.mix_target);
  if (s + t <= 0.0) {
    Throw(ErrorCode::kConfigError, "mix ratio must have a positive side");
  }
  const double frac = t / (s + t);
  auto n = static_cast<std::size_t>(
      std::llround(frac * static_cast<double>(cfg.batch_size)));
  return std::min(n, cfg.batch_size);
}

double EffectiveLr(const TrainConfig& cfg, std::size_t step_index) {
  const auto periods = cfg.anneal_every_steps == 0
                           ? 0
                           : step_index / cfg.anneal_every_steps;
  return cfg.lr_initial /
         std::pow(cfg.anneal_factor, static_cast<double>(periods));
}

double SgdStep(ParamVector& params, ParamVector grad, std::size_t step_index,
               const TrainConfig& cfg) {
  CheckSameLayout(params, grad);
  double sq = 0.0;
  for (double g : grad.values) sq += g * g;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    Throw(ErrorCode::kGradientExplosion,
          "non-finite gradient norm at step " + std::to_string(step_index));
  }
  if (norm > cfg.grad_clip_norm && norm > 0.0) {
    const double scale = cfg.grad_clip_norm / norm;
    for (double& g : grad.values) g *= scale;
  }
  const double lr = EffectiveLr(cfg, step_index);
  for (std::size_t i = 0; i < params.size(); ++i) {
    params.values[i] -= lr * grad.values[i];
  }
  return lr;
}

}  // namespace octl
