// core/include/octl/inventory.hpp

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

#ifndef OCTL_INVENTORY_HPP_
#define OCTL_INVENTORY_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "octl/error.hpp"
#include "octl/mat.hpp"

namespace octl {

// The set of modeling units the classifier emits per frame, including the
// blank unit. Unit ids index rows of logit/posterior matrices.
class TokenInventory {
 public:
  TokenInventory() = default;
  TokenInventory(std::vector<std::string> tokens, int blank_id);

  int size() const { return static_cast<int>(tokens_.size()); }
  int blank_id() const { return blank_id_; }

  const std::string& token(int id) const { return tokens_.at(id); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // -1 when the text is not a unit.
  int id(const std::string& text) const;
  bool has(const std::string& text) const { return id(text) >= 0; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
  int blank_id_ = 0;
};

// Per-frame distributions over units, one column per frame.
// Shape [N x T]; every column must sum to 1 within kColumnSumTol.
struct FramePosteriors {
  Mat values;  // [N x T]

  static constexpr double kColumnSumTol = 1e-9;

  int num_units() const { return static_cast<int>(values.rows); }
  int num_frames() const { return static_cast<int>(values.cols); }

  // Validates the distribution invariants; throws kShapeMismatch.
  static FramePosteriors Checked(Mat values);

  // No validation. For perturbed matrices (finite differences) and other
  // callers that are correct by construction.
  static FramePosteriors Raw(Mat values);
};

}  // namespace octl

#endif  // OCTL_INVENTORY_HPP_
