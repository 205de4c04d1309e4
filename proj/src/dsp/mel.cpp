// dsp/mel.cpp

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

#include "sarlab/dsp/mel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "sarlab/error.hpp"

namespace sarlab::dsp {
namespace {

constexpr double kLinearHzPerMel = 200.0 / 3.0;
constexpr double kBreakHz = 1000.0;
constexpr double kBreakMel = kBreakHz / kLinearHzPerMel;  // 15
const double kLogStep = std::log(6.4) / 27.0;

}  // namespace

double hz_to_mel(double hz) {
  if (hz < kBreakHz) return hz / kLinearHzPerMel;
  return kBreakMel + std::log(hz / kBreakHz) / kLogStep;
}

double mel_to_hz(double mel) {
  if (mel < kBreakMel) return mel * kLinearHzPerMel;
  return kBreakHz * std::exp(kLogStep * (mel - kBreakMel));
}

MelFilterBank mel_filterbank(int sample_rate, std::size_t fft_size, std::size_t n_mels,
                             double fmin, double fmax) {
  if (fmax < 0.0) fmax = sample_rate / 2.0;
  if (sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  if (n_mels < 1) throw InvalidArgument("n_mels must be >= 1");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0)) {
    throw InvalidArgument("invalid frequency range [" + std::to_string(fmin) + ", " +
                          std::to_string(fmax) + "] for sample rate " +
                          std::to_string(sample_rate));
  }
  StftConfig{fft_size, fft_size / 4, Window::Hann}.validate();

  const std::size_t bins = fft_size / 2 + 1;
  const double mel_lo = hz_to_mel(fmin);
  const double mel_hi = hz_to_mel(fmax);
  std::vector<double> edges(n_mels + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(n_mels + 1));
  }

  MelFilterBank bank;
  bank.sample_rate = sample_rate;
  bank.fft_size = fft_size;
  bank.fmin = fmin;
  bank.fmax = fmax;
  bank.center_hz.assign(edges.begin() + 1, edges.end() - 1);
  bank.weights = RealMatrix::Zero(static_cast<Eigen::Index>(n_mels), static_cast<Eigen::Index>(bins));
  for (std::size_t m = 0; m < n_mels; ++m) {
    const double lo = edges[m];
    const double mid = edges[m + 1];
    const double hi = edges[m + 2];
    const double area_norm = 2.0 / (hi - lo);
    bool any = false;
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(fft_size);
      const double rise = (f - lo) / (mid - lo);
      const double fall = (hi - f) / (hi - mid);
      const double w = std::max(0.0, std::min(rise, fall));
      if (w > 0.0) any = true;
      bank.weights(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) = w * area_norm;
    }
    if (!any) {
      throw InvalidArgument("mel filter " + std::to_string(m) +
                            " covers no FFT bin; use fewer mels or a larger fft_size");
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(bank.weights),
                                        Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double tol = 1e-10 * s(0);
  Eigen::VectorXd s_inv(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) s_inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
  bank.pseudo_inverse = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
  return bank;
}

MelSpectrogram mel_spectrogram(const AudioClip& clip, const StftConfig& config,
                               const MelFilterBank& bank) {
  if (bank.fft_size != config.fft_size || bank.sample_rate != clip.sample_rate) {
    throw InvalidArgument("mel filterbank was built for fft " + std::to_string(bank.fft_size) +
                          " @ " + std::to_string(bank.sample_rate) + " Hz, got fft " +
                          std::to_string(config.fft_size) + " @ " +
                          std::to_string(clip.sample_rate) + " Hz");
  }
  const ComplexSpectrogram spec = stft(clip, config);
  MelSpectrogram mel;
  mel.sample_rate = clip.sample_rate;
  mel.hop = config.hop;
  mel.frames = (magnitude(spec) * bank.weights.transpose()).array().max(kMelFloor).log().matrix();
  return mel;
}

const MelFilterBank& default_filterbank(int sample_rate, std::size_t fft_size) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::size_t>, MelFilterBank> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({sample_rate, fft_size});
  if (it == cache.end()) {
    it = cache.emplace(std::pair{sample_rate, fft_size}, mel_filterbank(sample_rate, fft_size)).first;
  }
  return it->second;
}

MelSpectrogram mel_spectrogram(const AudioClip& clip) {
  const StftConfig config = StftConfig::for_rate(clip.sample_rate);
  return mel_spectrogram(clip, config, default_filterbank(clip.sample_rate, config.fft_size));
}

}  // namespace sarlab::dsp
