// sar/model.cpp

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

#include "sarlab/sar/model.hpp"

#include <algorithm>
#include <cmath>

#include "sarlab/error.hpp"
#include "sarlab/nn/loss.hpp"

namespace sarlab::sar {

void SarConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v < 1) throw InvalidArgument(std::string("sar config: ") + name + " must be >= 1");
  };
  positive(n_mels, "n_mels");
  positive(fc_hidden, "fc_hidden");
  positive(n_fc_enc, "n_fc_enc");
  positive(blstm_hidden, "blstm_hidden");
  positive(n_blstm, "n_blstm");
  positive(latent_dim, "latent_dim");
  positive(dec_hidden, "dec_hidden");
  if (!(alpha_max >= 0.0 && alpha_max < 1.0)) {
    throw InvalidArgument("sar config: alpha_max must be in [0, 1)");
  }
}

void to_json(nlohmann::json& j, const SarConfig& c) {
  j = {{"n_mels", c.n_mels},       {"fc_hidden", c.fc_hidden},   {"n_fc_enc", c.n_fc_enc},
       {"blstm_hidden", c.blstm_hidden}, {"n_blstm", c.n_blstm}, {"latent_dim", c.latent_dim},
       {"dec_hidden", c.dec_hidden}, {"alpha_max", c.alpha_max}};
}

void from_json(const nlohmann::json& j, SarConfig& c) {
  if (!j.is_object()) throw InvalidArgument("sar config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    try {
      if (k == "n_mels") c.n_mels = it->get<int>();
      else if (k == "fc_hidden") c.fc_hidden = it->get<int>();
      else if (k == "n_fc_enc") c.n_fc_enc = it->get<int>();
      else if (k == "blstm_hidden") c.blstm_hidden = it->get<int>();
      else if (k == "n_blstm") c.n_blstm = it->get<int>();
      else if (k == "latent_dim") c.latent_dim = it->get<int>();
      else if (k == "dec_hidden") c.dec_hidden = it->get<int>();
      else if (k == "alpha_max") c.alpha_max = it->get<double>();
      else throw InvalidArgument("sar config: unknown key '" + k + "'");
    } catch (const nlohmann::json::exception&) {
      throw InvalidArgument("sar config: bad value for '" + k + "'");
    }
  }
}

SarConfig reduced_config() {
  SarConfig c;
  c.fc_hidden = 128;
  c.blstm_hidden = 128;
  c.latent_dim = 128;
  return c;
}

FeatureNorm<float> compute_norm(const std::vector<FeatureMatrix>& mels) {
  if (mels.empty()) throw InvalidArgument("compute_norm: empty set");
  const Eigen::Index d = mels.front().cols();
  Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(d), sq = Eigen::ArrayXd::Zero(d);
  double n = 0.0;
  for (const auto& m : mels) {
    if (m.cols() != d) throw InvalidArgument("compute_norm: inconsistent feature width");
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      const Eigen::ArrayXd row = m.row(r).cast<double>().transpose().array();
      sum += row;
      sq += row * row;
    }
    n += static_cast<double>(m.rows());
  }
  if (n == 0.0) throw InvalidArgument("compute_norm: no frames");
  const Eigen::ArrayXd mean = sum / n;
  const Eigen::ArrayXd var = (sq / n - mean * mean).max(0.0);
  FeatureNorm<float> norm;
  norm.mean = mean.transpose().cast<float>().matrix();
  norm.stddev = var.sqrt().max(1e-3).transpose().cast<float>().matrix();
  return norm;
}

SarModel SarModel::initialise(const SarConfig& config, std::uint64_t seed) {
  nn::SeedableRng rng(seed);
  SarModel m;
  m.config = config;
  m.params = init_sar_params<float>(config, rng);
  m.norm = identity_norm<float>(config.n_mels);
  return m;
}

namespace {

FeatureMatrix normalise(const FeatureMatrix& mel, const FeatureNorm<float>& norm) {
  FeatureMatrix x = mel.rowwise() - norm.mean.row(0);
  return x.array().rowwise() / norm.stddev.row(0).array();
}

}  // namespace

FeatureMatrix encode(const FeatureMatrix& mel, const SarModel& model) {
  if (mel.cols() != model.config.n_mels) {
    throw InvalidArgument("encode: expected " + std::to_string(model.config.n_mels) +
                          " mel bins, got " + std::to_string(mel.cols()));
  }
  if (mel.rows() == 0) throw InvalidArgument("encode: empty sequence");
  const auto& p = model.params;
  FeatureMatrix h = normalise(mel, model.norm);
  for (std::size_t i = 0; i < p.enc_fc.size(); ++i) {
    h = nn::prelu(nn::fc_forward(h, p.enc_fc[i]), p.enc_prelu[i]);
  }
  for (const auto& b : p.enc_blstm) h = nn::blstm_forward(h, b);
  return nn::tanh_forward(nn::fc_forward(h, p.enc_head));
}

FeatureMatrix encode(const dsp::MelSpectrogram& mel, const SarModel& model) {
  return encode(to_features(mel), model);
}

FeatureMatrix decode(const FeatureMatrix& z, const SarModel& model) {
  if (z.cols() != model.config.latent_dim) {
    throw InvalidArgument("decode: expected latent width " +
                          std::to_string(model.config.latent_dim) + ", got " +
                          std::to_string(z.cols()));
  }
  const auto& p = model.params;
  FeatureMatrix h = nn::prelu(nn::fc_forward(z, p.dec_fc), p.dec_prelu);
  FeatureMatrix y = nn::fc_forward(h, p.dec_out);
  y = y.array().rowwise() * model.norm.stddev.row(0).array();
  y.rowwise() += model.norm.mean.row(0);
  return y;
}

FeatureMatrix apply_mask(const FeatureMatrix& z, double alpha, nn::SeedableRng& rng,
                         MaskMode mode) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw InvalidArgument("apply_mask: alpha must be in [0, 1)");
  if (mode == MaskMode::kInference || alpha == 0.0) return z;
  const float keep_scale = static_cast<float>(1.0 / (1.0 - alpha));
  FeatureMatrix out = z;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out.data()[i] = rng.uniform() < alpha ? 0.0f : out.data()[i] * keep_scale;
  }
  return out;
}

double sample_mask_ratio(nn::SeedableRng& rng, double alpha_max) {
  if (!(alpha_max >= 0.0 && alpha_max < 1.0)) {
    throw InvalidArgument("sample_mask_ratio: alpha_max must be in [0, 1)");
  }
  return alpha_max * rng.uniform();
}

double reconstruction_loss(const FeatureMatrix& reconstructed, const FeatureMatrix& target) {
  return nn::mse(reconstructed, target);
}

FeatureMatrix to_features(const dsp::MelSpectrogram& mel) { return mel.frames.cast<float>(); }

dsp::MelSpectrogram to_mel(const FeatureMatrix& frames, int sample_rate, std::size_t hop) {
  dsp::MelSpectrogram m;
  m.frames = frames.cast<double>();
  m.sample_rate = sample_rate;
  m.hop = hop;
  return m;
}

}  // namespace sarlab::sar
