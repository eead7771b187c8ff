// core/include/octl/regularizers.hpp

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

#ifndef OCTL_REGULARIZERS_HPP_
#define OCTL_REGULARIZERS_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "octl/params.hpp"

namespace octl {

// Anchored penalties that hold fine-tuned parameters near a source model:
// plain L2 pulls every parameter back equally, EWC weights each parameter
// by a diagonal Fisher estimate of how much the source loss cares about it
// (Kirkpatrick et al., 2017).

struct Penalty {
  double value = 0.0;
  std::vector<double> gradient;
};

// Diagonal Fisher estimate at the anchor: mean squared per-example
// gradient of the training loss, taken at the given labels.
struct FisherSnapshot {
  ParamVector anchor;
  std::vector<double> fisher;
  std::uint64_t dataset_size = 0;
};

// Throws CorruptSnapshot on length mismatch or a negative Fisher entry.
void ValidateSnapshot(const FisherSnapshot& snap);

// (lambda/2) * sum_i (theta_i - anchor_i)^2 and its gradient.
Penalty L2Penalty(const ParamVector& theta, const ParamVector& anchor,
                  double lambda);

// (lambda/2) * sum_i F_i * (theta_i - anchor_i)^2 and its gradient.
Penalty EwcPenalty(const ParamVector& theta, const FisherSnapshot& snap,
                   double lambda);

// grad_fn(i) evaluates the per-example loss gradient at the anchor for
// example i; entries are squared and averaged in index order so the result
// is reproducible for a fixed corpus order.
FisherSnapshot EstimateFisher(
    const ParamVector& anchor,
    const std::function<std::vector<double>(std::size_t)>& grad_fn,
    std::size_t count);

}  // namespace octl

#endif  // OCTL_REGULARIZERS_HPP_
