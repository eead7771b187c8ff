// core/src/inventory.cpp

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

#include "octl/inventory.hpp"

#include <cmath>
#include <utility>

namespace octl {

TokenInventory::TokenInventory(std::vector<std::string> tokens, int blank_id)
    : tokens_(std::move(tokens)), blank_id_(blank_id) {
  if (tokens_.size() < 2) {
    Throw(ErrorCode::kInvalidInventory, "need at least blank plus one unit");
  }
  if (blank_id_ < 0 || blank_id_ >= static_cast<int>(tokens_.size())) {
    Throw(ErrorCode::kInvalidInventory, "blank id out of range");
  }
  for (int i = 0; i < static_cast<int>(tokens_.size()); ++i) {
    if (tokens_[i].empty()) {
      Throw(ErrorCode::kInvalidInventory, "empty unit string");
    }
    auto [it, inserted] = index_.emplace(tokens_[i], i);
    if (!inserted) {
      Throw(ErrorCode::kInvalidInventory, "duplicate unit '" + tokens_[i] + "'");
    }
  }
}

int TokenInventory::id(const std::string& text) const {
  auto it = index_.find(text);
  return it == index_.end() ? -1 : it->second;
}

FramePosteriors FramePosteriors::Checked(Mat values) {
  for (std::size_t t = 0; t < values.cols; ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < values.rows; ++k) {
      const double p = values(k, t);
      if (!(p >= 0.0 && p <= 1.0)) {
        Throw(ErrorCode::kShapeMismatch,
              "posterior entry outside [0,1] at frame " + std::to_string(t));
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0) > kColumnSumTol) {
      Throw(ErrorCode::kShapeMismatch,
            "posterior column " + std::to_string(t) + " sums to " +
                std::to_string(sum));
    }
  }
  FramePosteriors post;
  post.values = std::move(values);
  return post;
}

FramePosteriors FramePosteriors::Raw(Mat values) {
  FramePosteriors post;
  post.values = std::move(values);
  return post;
}

}  // namespace octl
