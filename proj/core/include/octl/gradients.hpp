// core/include/octl/gradients.hpp

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

#ifndef OCTL_GRADIENTS_HPP_
#define OCTL_GRADIENTS_HPP_

#include <string>

#include "octl/lattice.hpp"
#include "octl/rescale.hpp"

namespace octl {

// Column-wise softmax, max-subtracted. logits and result are [N x T].
Mat SoftmaxColumns(const Mat& logits);

struct LossGradient {
  double loss = 0.0;      // unrescaled for word-level configs
  Mat d_posteriors;       // [N x T]
  Mat d_logits;           // [N x T]; empty unless produced from logits
};

// Exact derivative of -ln P(y~|x) w.r.t. each posterior entry.
// Entries whose unit/time pair carries no occupancy are exactly 0.
LossGradient PosteriorGradient(const ExtendedLabels& ext,
                               const FramePosteriors& post);

// Softmaxes the logits per column, then chains d_posteriors through the
// softmax Jacobian.  With a rescale config the behaviour follows its
// level: word-level multiplies marked node contributions by mu inside the
// accumulation; sentence-level multiplies loss and gradient by mu when
// contains_oov is set.
LossGradient LogitsGradient(const ExtendedLabels& ext, const Mat& logits,
                            const RescaleConfig* rescale = nullptr,
                            bool contains_oov = false);

struct FdReport {
  double max_rel_err = 0.0;
  double max_abs_err = 0.0;
  std::string note;
};

// Central finite differences over every logit entry against the analytic
// d_logits.  Word-level configs with mu != 1 define no scalar objective,
// so the check runs the mu = 1 identity instead and says so in the note.
FdReport FiniteDiffCheck(const ExtendedLabels& ext, const Mat& logits,
                         const RescaleConfig* rescale = nullptr,
                         bool contains_oov = false, double step = 1e-6);

}  // namespace octl

#endif  // OCTL_GRADIENTS_HPP_
