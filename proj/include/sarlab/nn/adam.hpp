// sarlab/nn/adam.hpp

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

#include <cmath>
#include <string>
#include <vector>

#include "sarlab/error.hpp"
#include "sarlab/nn/tensor.hpp"

namespace sarlab::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

template <typename S>
struct AdamState {
  AdamConfig config;
  std::vector<Matrix<S>> m;
  std::vector<Matrix<S>> v;
  long long step = 0;
};

enum class StepStatus { kApplied, kSkippedNonFinite };

template <typename S>
AdamState<S> make_adam_state(const std::vector<ParamRef<S>>& params, const AdamConfig& config) {
  AdamState<S> st;
  st.config = config;
  for (const auto& p : params) {
    st.m.push_back(Matrix<S>::Zero(p.value->rows(), p.value->cols()));
    st.v.push_back(Matrix<S>::Zero(p.value->rows(), p.value->cols()));
  }
  return st;
}

/// One bias-corrected Adam update. If any gradient is non-finite the update
/// is skipped and the state is left untouched.
template <typename S>
StepStatus adam_step(const std::vector<ParamRef<S>>& params, AdamState<S>& st) {
  if (st.m.size() != params.size() || st.v.size() != params.size()) {
    throw InvalidArgument("adam: optimizer state does not match parameter list");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& p = params[i];
    if (p.value->rows() != p.grad->rows() || p.value->cols() != p.grad->cols() ||
        st.m[i].rows() != p.value->rows() || st.m[i].cols() != p.value->cols()) {
      throw InvalidArgument("adam: shape mismatch for " + p.name);
    }
    if (!p.grad->allFinite()) return StepStatus::kSkippedNonFinite;
  }
  ++st.step;
  const AdamConfig& c = st.config;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(st.step));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(st.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    S* w = params[i].value->data();
    const S* g = params[i].grad->data();
    S* m = st.m[i].data();
    S* v = st.v[i].data();
    const Eigen::Index n = params[i].value->size();
    for (Eigen::Index k = 0; k < n; ++k) {
      const double gk = static_cast<double>(g[k]);
      const double mk = c.beta1 * static_cast<double>(m[k]) + (1.0 - c.beta1) * gk;
      const double vk = c.beta2 * static_cast<double>(v[k]) + (1.0 - c.beta2) * gk * gk;
      m[k] = static_cast<S>(mk);
      v[k] = static_cast<S>(vk);
      const double update = c.lr * (mk / bc1) / (std::sqrt(vk / bc2) + c.epsilon);
      w[k] = static_cast<S>(static_cast<double>(w[k]) - update);
    }
  }
  return StepStatus::kApplied;
}

template <typename S>
double global_grad_norm(const std::vector<ParamRef<S>>& params) {
  double sq = 0.0;
  for (const auto& p : params) sq += p.grad->template cast<double>().squaredNorm();
  return std::sqrt(sq);
}

/// Scales all gradients so their joint L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
template <typename S>
double clip_grad_norm(const std::vector<ParamRef<S>>& params, double max_norm) {
  const double norm = global_grad_norm(params);
  if (std::isfinite(norm) && norm > max_norm && norm > 0.0) {
    const S scale = static_cast<S>(max_norm / norm);
    for (const auto& p : params) *p.grad *= scale;
  }
  return norm;
}

template <typename S>
void zero_grads(const std::vector<ParamRef<S>>& params) {
  for (const auto& p : params) p.grad->setZero();
}

}  // namespace sarlab::nn
