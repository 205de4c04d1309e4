// sarlab/nn/tensor.hpp

// Copyright 2026  The sarlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace sarlab::nn {

/// Sequence-major feature matrix: one row per time step (or per (t, b) pair
/// for batches), one column per feature.
template <typename S>
using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using FeatureMatrix = Matrix<float>;

/// Row arrangement of a packed batch. Row index is t * batch + b (time-major),
/// so the rows of one time step are contiguous. `valid` marks real frames;
/// padded frames carry zero recurrent state and are excluded from losses.
struct BatchLayout {
  std::size_t steps = 0;
  std::size_t batch = 1;
  std::vector<std::uint8_t> valid;  // empty means every row is valid

  static BatchLayout single(std::size_t steps) { return BatchLayout{steps, 1, {}}; }

  std::size_t rows() const { return steps * batch; }
  bool row_valid(std::size_t row) const { return valid.empty() || valid[row] != 0; }
  std::size_t valid_rows() const {
    if (valid.empty()) return rows();
    std::size_t n = 0;
    for (auto v : valid) n += v != 0;
    return n;
  }
};

/// Non-owning handle to one trainable tensor and its gradient accumulator.
template <typename S>
struct ParamRef {
  std::string name;
  Matrix<S>* value = nullptr;
  Matrix<S>* grad = nullptr;
};

template <typename S>
bool all_finite(const Matrix<S>& m) {
  return m.allFinite();
}

}  // namespace sarlab::nn
