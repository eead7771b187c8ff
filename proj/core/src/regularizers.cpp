// core/src/regularizers.cpp

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

#include "octl/regularizers.hpp"

#include "octl/error.hpp"

namespace octl {

namespace {

void CheckLambda(double lambda) {
  if (lambda < 0.0) {
    Throw(ErrorCode::kConfigError, "regularizer weight must be >= 0");
  }
}

}  // namespace

void ValidateSnapshot(const FisherSnapshot& snap) {
  if (snap.fisher.size() != snap.anchor.size()) {
    Throw(ErrorCode::kCorruptSnapshot,
          "fisher length does not match the anchor");
  }
  for (double f : snap.fisher) {
    if (!(f >= 0.0)) {
      Throw(ErrorCode::kCorruptSnapshot, "negative fisher entry");
    }
  }
}

Penalty L2Penalty(const ParamVector& theta, const ParamVector& anchor,
                  double lambda) {
  CheckSameLayout(theta, anchor);
  CheckLambda(lambda);
  Penalty out;
  out.gradient.resize(theta.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = theta.values[i] - anchor.values[i];
    sum += diff * diff;
    out.gradient[i] = lambda * diff;
  }
  out.value = 0.5 * lambda * sum;
  return out;
}

Penalty EwcPenalty(const ParamVector& theta, const FisherSnapshot& snap,
                   double lambda) {
  CheckSameLayout(theta, snap.anchor);
  CheckLambda(lambda);
  ValidateSnapshot(snap);
  Penalty out;
  out.gradient.resize(theta.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const double diff = theta.values[i] - snap.anchor.values[i];
    sum += snap.fisher[i] * diff * diff;
    out.gradient[i] = lambda * snap.fisher[i] * diff;
  }
  out.value = 0.5 * lambda * sum;
  return out;
}

FisherSnapshot EstimateFisher(
    const ParamVector& anchor,
    const std::function<std::vector<double>(std::size_t)>& grad_fn,
    std::size_t count) {
  if (count == 0) {
    Throw(ErrorCode::kEmptyDataset, "fisher estimation needs data");
  }
  FisherSnapshot snap;
  snap.anchor = anchor;
  snap.fisher.assign(anchor.size(), 0.0);
  snap.dataset_size = count;
  for (std::size_t i = 0; i < count; ++i) {
    const auto grad = grad_fn(i);
    if (grad.size() != anchor.size()) {
      Throw(ErrorCode::kLayoutMismatch,
            "per-example gradient length does not match the anchor");
    }
    for (std::size_t j = 0; j < grad.size(); ++j) {
      snap.fisher[j] += grad[j] * grad[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(count);
  for (double& f : snap.fisher) f *= inv;
  return snap;
}

}  // namespace octl
