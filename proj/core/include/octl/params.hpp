// core/include/octl/params.hpp

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

#ifndef OCTL_PARAMS_HPP_
#define OCTL_PARAMS_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace octl {

// Flat parameter array with a named segment layout.  Segment order is the
// storage order; lookups are by name.
struct ParamVector {
  std::vector<std::pair<std::string, std::size_t>> layout;
  std::vector<double> values;

  ParamVector() = default;
  explicit ParamVector(std::vector<std::pair<std::string, std::size_t>> lay);

  std::size_t size() const { return values.size(); }

  std::span<double> Segment(std::string_view name);
  std::span<const double> Segment(std::string_view name) const;
  bool SameLayout(const ParamVector& other) const;
};

// Throws LayoutMismatch unless both vectors share segment names, lengths
// and order.
void CheckSameLayout(const ParamVector& a, const ParamVector& b);

}  // namespace octl

#endif  // OCTL_PARAMS_HPP_
