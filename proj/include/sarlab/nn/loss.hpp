// sarlab/nn/loss.hpp

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

#include "sarlab/error.hpp"
#include "sarlab/nn/tensor.hpp"

namespace sarlab::nn {

namespace detail {
template <typename S>
void check_same_shape(const Matrix<S>& pred, const Matrix<S>& target, const char* what) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw InvalidArgument(std::string(what) + ": shape mismatch (" + std::to_string(pred.rows()) +
                          "x" + std::to_string(pred.cols()) + " vs " +
                          std::to_string(target.rows()) + "x" + std::to_string(target.cols()) +
                          ")");
  }
  if (pred.size() == 0) throw InvalidArgument(std::string(what) + ": empty input");
}
}  // namespace detail

/// Mean of squared differences over all entries. Accumulates in double.
template <typename S>
double mse(const Matrix<S>& pred, const Matrix<S>& target) {
  detail::check_same_shape(pred, target, "mse");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double d = static_cast<double>(pred.data()[i]) - static_cast<double>(target.data()[i]);
    acc += d * d;
  }
  return acc / static_cast<double>(pred.size());
}

/// MSE over the valid rows of a packed batch. When `grad` is given it is
/// set to dL/dpred (zero on padded rows).
template <typename S>
double masked_mse(const Matrix<S>& pred, const Matrix<S>& target, const BatchLayout& layout,
                  Matrix<S>* grad = nullptr) {
  detail::check_same_shape(pred, target, "mse");
  if (static_cast<std::size_t>(pred.rows()) != layout.rows()) {
    throw InvalidArgument("mse: row count does not match batch layout");
  }
  const std::size_t valid = layout.valid_rows();
  if (valid == 0) throw InvalidArgument("mse: no valid frames");
  const double denom = static_cast<double>(valid) * static_cast<double>(pred.cols());
  if (grad) grad->setZero(pred.rows(), pred.cols());
  double acc = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    if (!layout.row_valid(static_cast<std::size_t>(r))) continue;
    for (Eigen::Index c = 0; c < pred.cols(); ++c) {
      const double d = static_cast<double>(pred(r, c)) - static_cast<double>(target(r, c));
      acc += d * d;
      if (grad) (*grad)(r, c) = static_cast<S>(2.0 * d / denom);
    }
  }
  return acc / denom;
}

/// Plain MSE plus its gradient.
template <typename S>
double mse_with_grad(const Matrix<S>& pred, const Matrix<S>& target, Matrix<S>& grad) {
  return masked_mse(pred, target, BatchLayout::single(static_cast<std::size_t>(pred.rows())),
                    &grad);
}

}  // namespace sarlab::nn
