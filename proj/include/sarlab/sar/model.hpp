// sarlab/sar/model.hpp

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

// Masked auto-encoder over log-mel frames. The encoder is
//   FC+PReLU (x n_fc_enc) -> BLSTM (x n_blstm) -> FC+tanh
// and the decoder is the frame-local FC+PReLU -> FC. Inputs are
// standardised per mel bin with statistics stored next to the weights, and
// decoder outputs are mapped back to the log-mel domain, so every public
// function takes and returns plain log-mel matrices.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarlab/dsp/mel.hpp"
#include "sarlab/nn/layers.hpp"
#include "sarlab/nn/rng.hpp"
#include "sarlab/nn/tensor.hpp"

namespace sarlab::sar {

using nn::FeatureMatrix;
using nn::Matrix;

struct SarConfig {
  int n_mels = 80;
  int fc_hidden = 256;
  int n_fc_enc = 2;
  int blstm_hidden = 256;
  int n_blstm = 2;
  int latent_dim = 256;
  int dec_hidden = 128;
  double alpha_max = 0.2;

  void validate() const;
  bool operator==(const SarConfig&) const = default;
};

void to_json(nlohmann::json& j, const SarConfig& c);
void from_json(const nlohmann::json& j, SarConfig& c);

/// Desk-scale configuration (128-wide hidden layers and latent).
SarConfig reduced_config();

template <typename S>
struct SarParams {
  std::vector<nn::FcParams<S>> enc_fc;
  std::vector<nn::PreluParams<S>> enc_prelu;
  std::vector<nn::BlstmParams<S>> enc_blstm;
  nn::FcParams<S> enc_head;
  nn::FcParams<S> dec_fc;
  nn::PreluParams<S> dec_prelu;
  nn::FcParams<S> dec_out;

  /// Calls fn(name, matrix) for every trainable tensor in declaration order.
  template <typename F>
  void visit(F&& fn) {
    visit_impl(*this, fn);
  }
  template <typename F>
  void visit(F&& fn) const {
    visit_impl(*this, fn);
  }

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& p, F& fn) {
    auto fc = [&](const std::string& n, auto& f) {
      fn(n + ".weight", f.weight);
      fn(n + ".bias", f.bias);
    };
    auto lstm = [&](const std::string& n, auto& d) {
      fn(n + ".input_weight", d.input_weight);
      fn(n + ".recurrent_weight", d.recurrent_weight);
      fn(n + ".bias", d.bias);
    };
    for (std::size_t i = 0; i < p.enc_fc.size(); ++i) {
      fc("enc.fc" + std::to_string(i), p.enc_fc[i]);
      fn("enc.prelu" + std::to_string(i) + ".slope", p.enc_prelu[i].slope);
    }
    for (std::size_t i = 0; i < p.enc_blstm.size(); ++i) {
      lstm("enc.blstm" + std::to_string(i) + ".fwd", p.enc_blstm[i].forward);
      lstm("enc.blstm" + std::to_string(i) + ".bwd", p.enc_blstm[i].backward);
    }
    fc("enc.head", p.enc_head);
    fc("dec.fc", p.dec_fc);
    fn("dec.prelu.slope", p.dec_prelu.slope);
    fc("dec.out", p.dec_out);
  }
};

template <typename S>
SarParams<S> init_sar_params(const SarConfig& cfg, nn::SeedableRng& rng) {
  cfg.validate();
  SarParams<S> p;
  Eigen::Index width = cfg.n_mels;
  for (int i = 0; i < cfg.n_fc_enc; ++i) {
    p.enc_fc.push_back(nn::init_fc<S>(width, cfg.fc_hidden, rng));
    p.enc_prelu.push_back(nn::init_prelu<S>(cfg.fc_hidden));
    width = cfg.fc_hidden;
  }
  for (int i = 0; i < cfg.n_blstm; ++i) {
    p.enc_blstm.push_back(nn::init_blstm<S>(width, cfg.blstm_hidden, rng));
    width = 2 * cfg.blstm_hidden;
  }
  p.enc_head = nn::init_fc<S>(width, cfg.latent_dim, rng);
  p.dec_fc = nn::init_fc<S>(cfg.latent_dim, cfg.dec_hidden, rng);
  p.dec_prelu = nn::init_prelu<S>(cfg.dec_hidden);
  p.dec_out = nn::init_fc<S>(cfg.dec_hidden, cfg.n_mels, rng);
  return p;
}

template <typename S>
SarParams<S> zeros_like(const SarParams<S>& p) {
  SarParams<S> z = p;
  z.visit([](const std::string&, Matrix<S>& m) { m.setZero(); });
  return z;
}

template <typename S>
std::vector<nn::ParamRef<S>> param_refs(SarParams<S>& params, SarParams<S>& grads) {
  std::vector<nn::ParamRef<S>> refs;
  params.visit([&](const std::string& name, Matrix<S>& m) { refs.push_back({name, &m, nullptr}); });
  std::size_t i = 0;
  grads.visit([&](const std::string&, Matrix<S>& m) { refs[i++].grad = &m; });
  return refs;
}

/// Per-bin standardisation: x_std = (x - mean) / stddev.
template <typename S>
struct FeatureNorm {
  Matrix<S> mean;    // 1 x n_mels
  Matrix<S> stddev;  // 1 x n_mels
};

template <typename S>
FeatureNorm<S> identity_norm(int n_mels) {
  return {Matrix<S>::Zero(1, n_mels), Matrix<S>::Ones(1, n_mels)};
}

/// Statistics over every frame of every sequence; the deviation is floored
/// at 1e-3 so constant bins stay finite.
FeatureNorm<float> compute_norm(const std::vector<FeatureMatrix>& mels);

/// Differentiable graph bound to a parameter set and its gradient buffers:
/// normalise -> encoder -> fixed mask -> decoder -> denormalise.
template <typename S>
class SarGraph {
 public:
  SarGraph(const SarParams<S>& params, SarParams<S>& grads, const FeatureNorm<S>& norm) {
    Matrix<S> inv = norm.stddev.cwiseInverse();
    Matrix<S> shift = -(norm.mean.array() * inv.array()).matrix();
    encoder_.template add<nn::ColumnAffineLayer<S>>(inv, shift);
    for (std::size_t i = 0; i < params.enc_fc.size(); ++i) {
      encoder_.template add<nn::LinearLayer<S>>(params.enc_fc[i], grads.enc_fc[i]);
      encoder_.template add<nn::PreluLayer<S>>(params.enc_prelu[i], grads.enc_prelu[i]);
    }
    for (std::size_t i = 0; i < params.enc_blstm.size(); ++i) {
      encoder_.template add<nn::BlstmLayer<S>>(params.enc_blstm[i], grads.enc_blstm[i]);
    }
    encoder_.template add<nn::LinearLayer<S>>(params.enc_head, grads.enc_head);
    encoder_.template add<nn::TanhLayer<S>>();
    mask_ = &decoder_.template add<nn::FixedMaskLayer<S>>();
    decoder_.template add<nn::LinearLayer<S>>(params.dec_fc, grads.dec_fc);
    decoder_.template add<nn::PreluLayer<S>>(params.dec_prelu, grads.dec_prelu);
    decoder_.template add<nn::LinearLayer<S>>(params.dec_out, grads.dec_out);
    decoder_.template add<nn::ColumnAffineLayer<S>>(norm.stddev, norm.mean);
  }

  /// Mask applied to the latent before decoding; empty means none.
  void set_mask(Matrix<S> mask) { mask_->set_mask(std::move(mask)); }

  Matrix<S> forward(const Matrix<S>& mel, const nn::BatchLayout& layout) {
    return decoder_.forward(encoder_.forward(mel, layout), layout);
  }
  Matrix<S> encode(const Matrix<S>& mel, const nn::BatchLayout& layout) {
    return encoder_.forward(mel, layout);
  }
  void backward(const Matrix<S>& d_out) { encoder_.backward(decoder_.backward(d_out)); }

 private:
  nn::Sequential<S> encoder_;
  nn::Sequential<S> decoder_;
  nn::FixedMaskLayer<S>* mask_ = nullptr;
};

/// Trained model: configuration, weights, and input statistics.
struct SarModel {
  SarConfig config;
  SarParams<float> params;
  FeatureNorm<float> norm;

  static SarModel initialise(const SarConfig& config, std::uint64_t seed);
};

enum class MaskMode { kTrain, kInference };

/// T x latent_dim latent sequence, every entry strictly inside (-1, 1).
FeatureMatrix encode(const FeatureMatrix& mel, const SarModel& model);
FeatureMatrix encode(const dsp::MelSpectrogram& mel, const SarModel& model);

/// Frame-local decoder back to T x n_mels log-mel.
FeatureMatrix decode(const FeatureMatrix& z, const SarModel& model);

/// Training-time latent dropout: each element zeroed with probability alpha,
/// survivors scaled by 1/(1 - alpha). Inference mode returns z unchanged.
FeatureMatrix apply_mask(const FeatureMatrix& z, double alpha, nn::SeedableRng& rng,
                         MaskMode mode);

/// Draws alpha ~ U(0, alpha_max).
double sample_mask_ratio(nn::SeedableRng& rng, double alpha_max);

/// Mean squared error over all entries.
double reconstruction_loss(const FeatureMatrix& reconstructed, const FeatureMatrix& target);

FeatureMatrix to_features(const dsp::MelSpectrogram& mel);
dsp::MelSpectrogram to_mel(const FeatureMatrix& frames, int sample_rate, std::size_t hop);

}  // namespace sarlab::sar
