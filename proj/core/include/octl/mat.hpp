// core/include/octl/mat.hpp

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

#ifndef OCTL_MAT_HPP_
#define OCTL_MAT_HPP_

#include <cstddef>
#include <vector>

namespace octl {

// Dense row-major matrix. Deliberately minimal: the lattices and the toy
// classifier only need element access and a contiguous store.
template <typename T>
struct BasicMat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<T> data;

  BasicMat() = default;
  BasicMat(std::size_t r, std::size_t c, T fill = T{})
      : rows(r), cols(c), data(r * c, fill) {}

  T& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }

  T* row(std::size_t r) { return data.data() + r * cols; }
  const T* row(std::size_t r) const { return data.data() + r * cols; }

  std::size_t size() const { return data.size(); }

  bool same_shape(const BasicMat& other) const {
    return rows == other.rows && cols == other.cols;
  }
};

using Mat = BasicMat<double>;
using FloatMat = BasicMat<float>;

}  // namespace octl

#endif  // OCTL_MAT_HPP_
