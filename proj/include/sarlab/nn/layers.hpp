// sarlab/nn/layers.hpp

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

// Trainable layers: fully connected, PReLU, tanh, bidirectional LSTM, and a
// fixed multiplicative mask. Each has a pure forward function over parameter
// structs and a Layer wrapper that caches activations for reverse mode.

#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "sarlab/error.hpp"
#include "sarlab/nn/rng.hpp"
#include "sarlab/nn/tensor.hpp"

namespace sarlab::nn {

// ---------------------------------------------------------------- params

template <typename S>
struct FcParams {
  Matrix<S> weight;  // out x in
  Matrix<S> bias;    // 1 x out

  Eigen::Index in_dim() const { return weight.cols(); }
  Eigen::Index out_dim() const { return weight.rows(); }
};

template <typename S>
struct PreluParams {
  Matrix<S> slope;  // 1 x D
};

/// One LSTM direction. Gate blocks are stacked [input, forget, cell, output].
template <typename S>
struct LstmDirection {
  Matrix<S> input_weight;      // 4H x D_in
  Matrix<S> recurrent_weight;  // 4H x H
  Matrix<S> bias;              // 1 x 4H

  Eigen::Index hidden() const { return recurrent_weight.cols(); }
};

template <typename S>
struct BlstmParams {
  LstmDirection<S> forward;
  LstmDirection<S> backward;

  Eigen::Index hidden() const { return forward.hidden(); }
  Eigen::Index in_dim() const { return forward.input_weight.cols(); }
};

template <typename S>
FcParams<S> zeros_like(const FcParams<S>& p) {
  return {Matrix<S>::Zero(p.weight.rows(), p.weight.cols()), Matrix<S>::Zero(1, p.bias.cols())};
}
template <typename S>
PreluParams<S> zeros_like(const PreluParams<S>& p) {
  return {Matrix<S>::Zero(1, p.slope.cols())};
}
template <typename S>
LstmDirection<S> zeros_like(const LstmDirection<S>& p) {
  return {Matrix<S>::Zero(p.input_weight.rows(), p.input_weight.cols()),
          Matrix<S>::Zero(p.recurrent_weight.rows(), p.recurrent_weight.cols()),
          Matrix<S>::Zero(1, p.bias.cols())};
}
template <typename S>
BlstmParams<S> zeros_like(const BlstmParams<S>& p) {
  return {zeros_like(p.forward), zeros_like(p.backward)};
}

// ---------------------------------------------------------------- init

/// Glorot-uniform weights, zero bias.
template <typename S>
FcParams<S> init_fc(Eigen::Index in, Eigen::Index out, SeedableRng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  FcParams<S> p{Matrix<S>(out, in), Matrix<S>::Zero(1, out)};
  for (Eigen::Index i = 0; i < p.weight.size(); ++i) {
    p.weight.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
  }
  return p;
}

template <typename S>
PreluParams<S> init_prelu(Eigen::Index dim, double slope = 0.25) {
  return {Matrix<S>::Constant(1, dim, static_cast<S>(slope))};
}

/// Uniform(-1/sqrt(H), 1/sqrt(H)) weights; biases zero except forget gate = 1.
template <typename S>
BlstmParams<S> init_blstm(Eigen::Index in, Eigen::Index hidden, SeedableRng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  auto direction = [&] {
    LstmDirection<S> d{Matrix<S>(4 * hidden, in), Matrix<S>(4 * hidden, hidden),
                       Matrix<S>::Zero(1, 4 * hidden)};
    for (Eigen::Index i = 0; i < d.input_weight.size(); ++i) {
      d.input_weight.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
    }
    for (Eigen::Index i = 0; i < d.recurrent_weight.size(); ++i) {
      d.recurrent_weight.data()[i] = static_cast<S>(rng.uniform(-bound, bound));
    }
    d.bias.middleCols(hidden, hidden).setOnes();
    return d;
  };
  BlstmParams<S> p;
  p.forward = direction();
  p.backward = direction();
  return p;
}

// ---------------------------------------------------------------- forward

template <typename S>
Matrix<S> fc_forward(const Matrix<S>& x, const FcParams<S>& p) {
  if (x.cols() != p.in_dim()) {
    throw InvalidArgument("fc: input width " + std::to_string(x.cols()) + " != " +
                          std::to_string(p.in_dim()));
  }
  Matrix<S> y = x * p.weight.transpose();
  y.rowwise() += p.bias.row(0);
  return y;
}

template <typename S>
Matrix<S> prelu(const Matrix<S>& x, const PreluParams<S>& p) {
  if (x.cols() != p.slope.cols()) {
    throw InvalidArgument("prelu: input width " + std::to_string(x.cols()) + " != " +
                          std::to_string(p.slope.cols()));
  }
  Matrix<S> y = x;
  for (Eigen::Index r = 0; r < y.rows(); ++r) {
    for (Eigen::Index c = 0; c < y.cols(); ++c) {
      if (y(r, c) < S(0)) y(r, c) *= p.slope(0, c);
    }
  }
  return y;
}

template <typename S>
Matrix<S> tanh_forward(const Matrix<S>& x) {
  return x.array().tanh().matrix();
}

/// Activations kept for one LSTM direction's backward pass.
template <typename S>
struct LstmCache {
  Matrix<S> gates;      // rows x 4H, post-activation [i f g o]
  Matrix<S> cell;       // rows x H, stored (masked) cell state
  Matrix<S> tanh_cell;  // rows x H, tanh of the raw cell state
  Matrix<S> hidden;     // rows x H, stored (masked) output
};

namespace detail {

template <typename S>
Matrix<S> sigmoid(const Matrix<S>& x) {
  return (S(1) / (S(1) + (-x.array()).exp())).matrix();
}

template <typename S>
void zero_invalid_rows(Matrix<S>& m, const BatchLayout& layout, std::size_t t) {
  if (layout.valid.empty()) return;
  for (std::size_t b = 0; b < layout.batch; ++b) {
    if (!layout.row_valid(t * layout.batch + b)) m.row(static_cast<Eigen::Index>(b)).setZero();
  }
}

template <typename S>
Matrix<S> lstm_direction_forward(const Matrix<S>& x, const LstmDirection<S>& d,
                                 const BatchLayout& layout, bool reverse, LstmCache<S>* cache) {
  const Eigen::Index h = d.hidden();
  const auto B = static_cast<Eigen::Index>(layout.batch);
  const std::size_t steps = layout.steps;
  Matrix<S> xp = x * d.input_weight.transpose();
  xp.rowwise() += d.bias.row(0);

  Matrix<S> out(x.rows(), h);
  if (cache) {
    cache->gates.resize(x.rows(), 4 * h);
    cache->cell.resize(x.rows(), h);
    cache->tanh_cell.resize(x.rows(), h);
  }
  Matrix<S> h_prev = Matrix<S>::Zero(B, h);
  Matrix<S> c_prev = Matrix<S>::Zero(B, h);
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const auto row0 = static_cast<Eigen::Index>(t) * B;
    Matrix<S> pre = xp.middleRows(row0, B) + h_prev * d.recurrent_weight.transpose();
    Matrix<S> gi = sigmoid<S>(pre.leftCols(h));
    Matrix<S> gf = sigmoid<S>(pre.middleCols(h, h));
    Matrix<S> gg = pre.middleCols(2 * h, h).array().tanh().matrix();
    Matrix<S> go = sigmoid<S>(pre.rightCols(h));
    Matrix<S> c = (gf.array() * c_prev.array() + gi.array() * gg.array()).matrix();
    Matrix<S> tc = c.array().tanh().matrix();
    Matrix<S> hcur = (go.array() * tc.array()).matrix();
    zero_invalid_rows(c, layout, t);
    zero_invalid_rows(hcur, layout, t);
    if (cache) {
      cache->gates.middleRows(row0, B) << gi, gf, gg, go;
      cache->cell.middleRows(row0, B) = c;
      cache->tanh_cell.middleRows(row0, B) = tc;
    }
    out.middleRows(row0, B) = hcur;
    h_prev = std::move(hcur);
    c_prev = std::move(c);
  }
  if (cache) cache->hidden = out;
  return out;
}

/// Accumulates parameter gradients into `grad`; returns dL/dx.
template <typename S>
Matrix<S> lstm_direction_backward(const Matrix<S>& x, const LstmDirection<S>& d,
                                  const LstmCache<S>& cache, const Matrix<S>& dy,
                                  const BatchLayout& layout, bool reverse, LstmDirection<S>& grad) {
  const Eigen::Index h = d.hidden();
  const auto B = static_cast<Eigen::Index>(layout.batch);
  const std::size_t steps = layout.steps;
  Matrix<S> dxp(x.rows(), 4 * h);
  Matrix<S> dh_next = Matrix<S>::Zero(B, h);
  Matrix<S> dc_next = Matrix<S>::Zero(B, h);
  const Matrix<S> zeros = Matrix<S>::Zero(B, h);

  for (std::size_t s = steps; s-- > 0;) {
    const std::size_t t = reverse ? steps - 1 - s : s;
    const auto row0 = static_cast<Eigen::Index>(t) * B;
    const bool first = s == 0;
    const std::size_t t_prev = reverse ? t + 1 : t - 1;
    const auto prev0 = static_cast<Eigen::Index>(t_prev) * B;

    Matrix<S> dh = dy.middleRows(row0, B) + dh_next;
    Matrix<S> dc_in = dc_next;
    zero_invalid_rows(dh, layout, t);
    zero_invalid_rows(dc_in, layout, t);

    const auto gates = cache.gates.middleRows(row0, B);
    const auto gi = gates.leftCols(h).array();
    const auto gf = gates.middleCols(h, h).array();
    const auto gg = gates.middleCols(2 * h, h).array();
    const auto go = gates.rightCols(h).array();
    const auto tc = cache.tanh_cell.middleRows(row0, B).array();
    const Matrix<S> c_prev = first ? zeros : Matrix<S>(cache.cell.middleRows(prev0, B));
    const Matrix<S> h_prev = first ? zeros : Matrix<S>(cache.hidden.middleRows(prev0, B));

    Matrix<S> dc = (dc_in.array() + dh.array() * go * (S(1) - tc * tc)).matrix();
    Matrix<S> dpre(B, 4 * h);
    dpre.leftCols(h) = (dc.array() * gg * gi * (S(1) - gi)).matrix();
    dpre.middleCols(h, h) = (dc.array() * c_prev.array() * gf * (S(1) - gf)).matrix();
    dpre.middleCols(2 * h, h) = (dc.array() * gi * (S(1) - gg * gg)).matrix();
    dpre.rightCols(h) = (dh.array() * tc * go * (S(1) - go)).matrix();

    dxp.middleRows(row0, B) = dpre;
    grad.recurrent_weight.noalias() += dpre.transpose() * h_prev;
    dh_next = dpre * d.recurrent_weight;
    dc_next = (dc.array() * gf).matrix();
  }
  grad.input_weight.noalias() += dxp.transpose() * x;
  grad.bias += dxp.colwise().sum();
  return dxp * d.input_weight;
}

}  // namespace detail

/// Rows x 2H: forward-direction states then backward-direction states, both
/// in natural time order. Zero initial state; padded rows output zeros.
template <typename S>
Matrix<S> blstm_forward(const Matrix<S>& x, const BlstmParams<S>& p, const BatchLayout& layout,
                        LstmCache<S>* fwd_cache = nullptr, LstmCache<S>* bwd_cache = nullptr) {
  if (layout.steps == 0) throw InvalidArgument("blstm: empty sequence");
  if (x.cols() != p.in_dim()) {
    throw InvalidArgument("blstm: input width " + std::to_string(x.cols()) + " != " +
                          std::to_string(p.in_dim()));
  }
  if (static_cast<std::size_t>(x.rows()) != layout.rows()) {
    throw InvalidArgument("blstm: row count does not match batch layout");
  }
  const Eigen::Index h = p.hidden();
  Matrix<S> y(x.rows(), 2 * h);
  y.leftCols(h) = detail::lstm_direction_forward(x, p.forward, layout, false, fwd_cache);
  y.rightCols(h) = detail::lstm_direction_forward(x, p.backward, layout, true, bwd_cache);
  return y;
}

template <typename S>
Matrix<S> blstm_forward(const Matrix<S>& x, const BlstmParams<S>& p) {
  return blstm_forward(x, p, BatchLayout::single(static_cast<std::size_t>(x.rows())));
}

// ---------------------------------------------------------------- graph

/// A differentiable node. `backward` must follow a `forward` call; it
/// accumulates parameter gradients and returns the gradient w.r.t. the input.
template <typename S>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual Matrix<S> forward(const Matrix<S>& x, const BatchLayout& layout) = 0;
  virtual Matrix<S> backward(const Matrix<S>& dy) = 0;
  virtual std::string kind() const = 0;

 protected:
  void require_forward(bool evaluated) const {
    if (!evaluated) throw InvalidArgument(kind() + ": backward called before forward");
  }
};

template <typename S>
class LinearLayer final : public Layer<S> {
 public:
  LinearLayer(const FcParams<S>& params, FcParams<S>& grads) : p_(params), g_(grads) {}
  Matrix<S> forward(const Matrix<S>& x, const BatchLayout&) override {
    x_ = x;
    done_ = true;
    return fc_forward(x, p_);
  }
  Matrix<S> backward(const Matrix<S>& dy) override {
    this->require_forward(done_);
    g_.weight.noalias() += dy.transpose() * x_;
    g_.bias += dy.colwise().sum();
    return dy * p_.weight;
  }
  std::string kind() const override { return "fc"; }

 private:
  const FcParams<S>& p_;
  FcParams<S>& g_;
  Matrix<S> x_;
  bool done_ = false;
};

template <typename S>
class PreluLayer final : public Layer<S> {
 public:
  PreluLayer(const PreluParams<S>& params, PreluParams<S>& grads) : p_(params), g_(grads) {}
  Matrix<S> forward(const Matrix<S>& x, const BatchLayout&) override {
    x_ = x;
    done_ = true;
    return prelu(x, p_);
  }
  Matrix<S> backward(const Matrix<S>& dy) override {
    this->require_forward(done_);
    Matrix<S> dx = dy;
    for (Eigen::Index r = 0; r < dx.rows(); ++r) {
      for (Eigen::Index c = 0; c < dx.cols(); ++c) {
        if (x_(r, c) < S(0)) {
          g_.slope(0, c) += dy(r, c) * x_(r, c);
          dx(r, c) *= p_.slope(0, c);
        }
      }
    }
    return dx;
  }
  std::string kind() const override { return "prelu"; }

 private:
  const PreluParams<S>& p_;
  PreluParams<S>& g_;
  Matrix<S> x_;
  bool done_ = false;
};

template <typename S>
class TanhLayer final : public Layer<S> {
 public:
  Matrix<S> forward(const Matrix<S>& x, const BatchLayout&) override {
    y_ = tanh_forward(x);
    done_ = true;
    return y_;
  }
  Matrix<S> backward(const Matrix<S>& dy) override {
    this->require_forward(done_);
    return (dy.array() * (S(1) - y_.array() * y_.array())).matrix();
  }
  std::string kind() const override { return "tanh"; }

 private:
  Matrix<S> y_;
  bool done_ = false;
};

template <typename S>
class BlstmLayer final : public Layer<S> {
 public:
  BlstmLayer(const BlstmParams<S>& params, BlstmParams<S>& grads) : p_(params), g_(grads) {}
  Matrix<S> forward(const Matrix<S>& x, const BatchLayout& layout) override {
    x_ = x;
    layout_ = layout;
    done_ = true;
    return blstm_forward(x, p_, layout, &fwd_, &bwd_);
  }
  Matrix<S> backward(const Matrix<S>& dy) override {
    this->require_forward(done_);
    const Eigen::Index h = p_.hidden();
    Matrix<S> dx = detail::lstm_direction_backward<S>(x_, p_.forward, fwd_, dy.leftCols(h), layout_,
                                                      false, g_.forward);
    dx += detail::lstm_direction_backward<S>(x_, p_.backward, bwd_, dy.rightCols(h), layout_, true,
                                             g_.backward);
    return dx;
  }
  std::string kind() const override { return "blstm"; }

 private:
  const BlstmParams<S>& p_;
  BlstmParams<S>& g_;
  Matrix<S> x_;
  BatchLayout layout_;
  LstmCache<S> fwd_;
  LstmCache<S> bwd_;
  bool done_ = false;
};

/// Elementwise multiplication by a constant mask (identity when unset).
/// The mask is not differentiated.
template <typename S>
class FixedMaskLayer final : public Layer<S> {
 public:
  void set_mask(Matrix<S> mask) { mask_ = std::move(mask); }
  void clear_mask() { mask_.resize(0, 0); }
  const Matrix<S>& mask() const { return mask_; }

  Matrix<S> forward(const Matrix<S>& x, const BatchLayout&) override {
    done_ = true;
    if (mask_.size() == 0) return x;
    if (mask_.rows() != x.rows() || mask_.cols() != x.cols()) {
      throw InvalidArgument("mask shape does not match its input");
    }
    return (x.array() * mask_.array()).matrix();
  }
  Matrix<S> backward(const Matrix<S>& dy) override {
    this->require_forward(done_);
    if (mask_.size() == 0) return dy;
    return (dy.array() * mask_.array()).matrix();
  }
  std::string kind() const override { return "mask"; }

 private:
  Matrix<S> mask_;
  bool done_ = false;
};

/// y = x * scale + shift per column, with constant scale and shift.
template <typename S>
class ColumnAffineLayer final : public Layer<S> {
 public:
  ColumnAffineLayer(Matrix<S> scale, Matrix<S> shift)
      : scale_(std::move(scale)), shift_(std::move(shift)) {}
  Matrix<S> forward(const Matrix<S>& x, const BatchLayout&) override {
    if (x.cols() != scale_.cols()) throw InvalidArgument("affine: input width mismatch");
    done_ = true;
    Matrix<S> y = x.array().rowwise() * scale_.row(0).array();
    y.rowwise() += shift_.row(0);
    return y;
  }
  Matrix<S> backward(const Matrix<S>& dy) override {
    this->require_forward(done_);
    return dy.array().rowwise() * scale_.row(0).array();
  }
  std::string kind() const override { return "affine"; }

 private:
  Matrix<S> scale_;
  Matrix<S> shift_;
  bool done_ = false;
};

/// Chain of layers evaluated in order, differentiated in reverse.
template <typename S>
class Sequential {
 public:
  template <typename L, typename... Args>
  L& add(Args&&... args) {
    auto layer = std::make_unique<L>(std::forward<Args>(args)...);
    L& ref = *layer;
    layers_.push_back(std::move(layer));
    return ref;
  }

  Matrix<S> forward(const Matrix<S>& x, const BatchLayout& layout) {
    Matrix<S> h = x;
    for (auto& layer : layers_) h = layer->forward(h, layout);
    return h;
  }

  Matrix<S> backward(const Matrix<S>& dy) {
    Matrix<S> g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
  }

  std::size_t size() const { return layers_.size(); }

 private:
  std::vector<std::unique_ptr<Layer<S>>> layers_;
};

}  // namespace sarlab::nn
