// sarlab/corruption/corruption.hpp

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

// Distortions used in the evaluation: Gaussian noise at a target SNR and
// random element masking on feature matrices, and down/up resampling on
// audio.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include <json.hpp>

#include "sarlab/dsp/audio.hpp"
#include "sarlab/error.hpp"
#include "sarlab/nn/rng.hpp"
#include "sarlab/nn/tensor.hpp"

namespace sarlab::corruption {

enum class Kind { kNone, kWhiteNoise, kMask, kBandLimit };

struct CorruptionSpec {
  Kind kind = Kind::kNone;
  double snr_db = std::numeric_limits<double>::infinity();
  double alpha = 0.0;
  int intermediate_rate = 0;
  std::uint64_t seed = 0;

  static CorruptionSpec none() { return {}; }
  static CorruptionSpec white_noise(double snr_db, std::uint64_t seed = 0) {
    return {Kind::kWhiteNoise, snr_db, 0.0, 0, seed};
  }
  static CorruptionSpec mask(double alpha, std::uint64_t seed = 0) {
    return {Kind::kMask, std::numeric_limits<double>::infinity(), alpha, 0, seed};
  }
  static CorruptionSpec band_limit(int rate, std::uint64_t seed = 0) {
    return {Kind::kBandLimit, std::numeric_limits<double>::infinity(), 0.0, rate, seed};
  }

  bool applies_to_features() const { return kind != Kind::kBandLimit; }
  bool applies_to_audio() const { return kind == Kind::kNone || kind == Kind::kBandLimit; }
  void validate() const;
  /// Short condition label: "raw", "mask0.1", "snr15", "band8000".
  std::string label() const;
};

/// {"kind": "white_noise"|"mask"|"band_limit"|"none", <param>, "seed"}.
void to_json(nlohmann::json& j, const CorruptionSpec& s);
void from_json(const nlohmann::json& j, CorruptionSpec& s);

std::string kind_name(Kind kind);

/// Mean square over all entries.
template <typename S>
double mean_power(const nn::Matrix<S>& m) {
  if (m.size() == 0) return 0.0;
  return m.template cast<double>().squaredNorm() / static_cast<double>(m.size());
}

/// 10 log10(P(clean) / P(corrupted - clean)).
template <typename S>
double realized_snr_db(const nn::Matrix<S>& clean, const nn::Matrix<S>& corrupted) {
  const nn::Matrix<double> noise = corrupted.template cast<double>() - clean.template cast<double>();
  return 10.0 * std::log10(mean_power(clean) / mean_power(noise));
}

/// feat + N(0, sigma^2) with sigma^2 = P(feat) / 10^(snr_db / 10). An
/// infinite SNR returns the input unchanged.
template <typename S>
nn::Matrix<S> add_feature_noise(const nn::Matrix<S>& feat, double snr_db, nn::SeedableRng& rng) {
  if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
    throw InvalidArgument("add_feature_noise: snr_db must be finite or +inf");
  }
  if (snr_db == std::numeric_limits<double>::infinity()) return feat;
  const double power = mean_power(feat);
  if (!(power > 0.0)) throw InvalidArgument("add_feature_noise: input has zero power");
  const double sigma = std::sqrt(power / std::pow(10.0, snr_db / 10.0));
  nn::Matrix<S> out = feat;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    out.data()[i] = static_cast<S>(static_cast<double>(out.data()[i]) + sigma * rng.normal());
  }
  return out;
}

/// Zeroes each element independently with probability alpha. Survivors are
/// left untouched.
template <typename S>
nn::Matrix<S> mask_features(const nn::Matrix<S>& feat, double alpha, nn::SeedableRng& rng) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("mask_features: alpha must be in [0, 1]");
  nn::Matrix<S> out = feat;
  if (alpha == 0.0) return out;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if (rng.uniform() < alpha) out.data()[i] = S(0);
  }
  return out;
}

/// Resamples to `intermediate_rate` and back; output has the input's rate
/// and length.
dsp::AudioClip degrade_bandwidth(const dsp::AudioClip& clip, int intermediate_rate);

/// Dispatches on spec.kind with a generator seeded from spec.seed.
template <typename S>
nn::Matrix<S> corrupt(const nn::Matrix<S>& feat, const CorruptionSpec& spec) {
  spec.validate();
  nn::SeedableRng rng(spec.seed);
  switch (spec.kind) {
    case Kind::kNone: return feat;
    case Kind::kWhiteNoise: return add_feature_noise(feat, spec.snr_db, rng);
    case Kind::kMask: return mask_features(feat, spec.alpha, rng);
    case Kind::kBandLimit: break;
  }
  throw InvalidArgument("band_limit corruption applies to audio, not feature matrices");
}

dsp::AudioClip corrupt(const dsp::AudioClip& clip, const CorruptionSpec& spec);

}  // namespace sarlab::corruption
