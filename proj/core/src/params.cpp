// core/src/params.cpp

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

#include "octl/params.hpp"

#include <numeric>

#include "octl/error.hpp"

namespace octl {

ParamVector::ParamVector(std::vector<std::pair<std::string, std::size_t>> lay)
    : layout(std::move(lay)) {
  std::size_t total = 0;
  for (const auto& [name, len] : layout) total += len;
  values.assign(total, 0.0);
}

std::span<double> ParamVector::Segment(std::string_view name) {
  std::size_t offset = 0;
  for (const auto& [seg, len] : layout) {
    if (seg == name) return {values.data() + offset, len};
    offset += len;
  }
  Throw(ErrorCode::kLayoutMismatch, "no segment named " + std::string(name));
}

std::span<const double> ParamVector::Segment(std::string_view name) const {
  std::size_t offset = 0;
  for (const auto& [seg, len] : layout) {
    if (seg == name) return {values.data() + offset, len};
    offset += len;
  }
  Throw(ErrorCode::kLayoutMismatch, "no segment named " + std::string(name));
}

bool ParamVector::SameLayout(const ParamVector& other) const {
  return layout == other.layout && values.size() == other.values.size();
}

void CheckSameLayout(const ParamVector& a, const ParamVector& b) {
  if (!a.SameLayout(b)) {
    Throw(ErrorCode::kLayoutMismatch, "parameter layouts differ");
  }
}

}  // namespace octl
