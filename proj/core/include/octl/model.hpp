// core/include/octl/model.hpp

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

#ifndef OCTL_MODEL_HPP_
#define OCTL_MODEL_HPP_

#include <cstdint>
#include <string>

#include "octl/mat.hpp"
#include "octl/params.hpp"

namespace octl {

// Per-frame context-window classifier standing in for an acoustic encoder:
// concatenate the (2W+1)-frame window around each frame (edges padded by
// repetition), then affine -> tanh -> affine to one logit per unit.

struct ModelConfig {
  std::size_t feature_dim = 16;    // d
  std::size_t context_window = 1;  // W, frames on each side
  std::size_t hidden_size = 32;    // H
  std::size_t num_units = 0;       // N, inventory size incl. blank
  std::uint64_t seed = 0;

  std::size_t input_dim() const {
    return (2 * context_window + 1) * feature_dim;
  }
};

// Segments: w1 [H x (2W+1)d] row-major, b1 [H], w2 [N x H] row-major,
// b2 [N].
ParamVector ZeroParams(const ModelConfig& cfg);

// Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)] per layer, drawn from the
// config seed.  Biases start at zero.
ParamVector InitParams(const ModelConfig& cfg);

// features is [T x d], one row per frame.  Returns logits [N x T].
Mat ModelForward(const ParamVector& params, const FloatMat& features,
                 const ModelConfig& cfg);

// Exact chain rule through both affine layers and the tanh.  d_logits is
// [N x T]; the result has the parameter layout of the model.
ParamVector ModelBackward(const ParamVector& params, const FloatMat& features,
                          const Mat& d_logits, const ModelConfig& cfg);

struct TrainConfig {
  std::size_t batch_size = 20;
  double lr_initial = 1e-2;
  double anneal_factor = 1.1;
  std::size_t anneal_every_steps = 3000;
  double grad_clip_norm = 2.0;
  std::size_t mix_source = 1;  // utterances drawn per mix unit, source
  std::size_t mix_target = 1;  // and target side of the ratio
  std::size_t max_steps = 20000;
  std::size_t patience = 10;   // validation rounds without improvement
  std::size_t validate_every_steps = 50;
  std::uint64_t seed = 0;
};

// Number of target-domain utterances in a batch under the s:t mix ratio;
// the source side takes the remainder.  A 2:1 ratio with batch 20 gives
// 13 source + 7 target.
std::size_t TargetPerBatch(const TrainConfig& cfg);

// Learning rate after annealing: lr_initial / factor^floor(step / every).
double EffectiveLr(const TrainConfig& cfg, std::size_t step_index);

// Scales grad down to grad_clip_norm when its global norm exceeds it,
// then applies theta -= lr * grad.  Returns the lr used.  A non-finite
// gradient norm throws GradientExplosion.
double SgdStep(ParamVector& params, ParamVector grad, std::size_t step_index,
               const TrainConfig& cfg);

struct Checkpoint {
  ModelConfig model;
  ParamVector params;
  std::uint64_t step = 0;
  double validation_loss = 0.0;
  std::string rng_state;
};

}  // namespace octl

#endif  // OCTL_MODEL_HPP_
