// dsp/griffin_lim.cpp

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

#include "sarlab/dsp/griffin_lim.hpp"

#include <algorithm>
#include <cmath>

#include "sarlab/error.hpp"

namespace sarlab::dsp {
namespace {

// Squared norm of a one-sided spectrogram counted as if two-sided.
double two_sided_energy(const RealMatrix& m) {
  const Eigen::Index last = m.cols() - 1;
  double e = 2.0 * m.squaredNorm();
  e -= m.col(0).squaredNorm();
  if (last > 0) e -= m.col(last).squaredNorm();
  return e;
}

}  // namespace

RealMatrix mel_to_linear_magnitude(const MelSpectrogram& mel, const StftConfig& config,
                                   const MelFilterBank& bank) {
  if (mel.num_frames() == 0) throw InvalidArgument("empty mel spectrogram");
  if (mel.num_mels() != bank.num_mels()) throw InvalidArgument("mel/bank band count mismatch");
  if (bank.fft_size != config.fft_size) throw InvalidArgument("mel/bank fft size mismatch");
  const std::size_t feat_hop = mel.hop;
  const std::size_t synth_hop = config.fft_size / 4;
  const std::size_t t_feat = mel.num_frames();
  const std::size_t t_synth = 1 + ((t_feat - 1) * feat_hop) / synth_hop;

  RealMatrix expanded(static_cast<Eigen::Index>(t_synth), mel.frames.cols());
  for (std::size_t j = 0; j < t_synth; ++j) {
    const auto src = std::min<std::size_t>(
        t_feat - 1, static_cast<std::size_t>(std::lround(static_cast<double>(j * synth_hop) /
                                                         static_cast<double>(feat_hop))));
    expanded.row(static_cast<Eigen::Index>(j)) = mel.frames.row(static_cast<Eigen::Index>(src));
  }
  RealMatrix linear = expanded.array().exp().matrix() * bank.pseudo_inverse.transpose();
  return linear.cwiseMax(0.0);
}

GriffinLimResult griffin_lim_magnitude(const RealMatrix& target, const StftConfig& synthesis,
                                       int sample_rate, std::size_t iterations,
                                       std::size_t output_length) {
  synthesis.validate();
  if (iterations < 1) throw InvalidArgument("griffin_lim needs at least one iteration");
  if (target.rows() == 0) throw InvalidArgument("empty magnitude target");
  if (static_cast<std::size_t>(target.cols()) != synthesis.num_bins()) {
    throw InvalidArgument("magnitude bin count does not match fft size");
  }

  ComplexSpectrogram estimate;
  estimate.config = synthesis;
  estimate.sample_rate = sample_rate;
  estimate.frames = target.cast<std::complex<double>>();

  const double target_norm = std::sqrt(two_sided_energy(target));
  GriffinLimResult result;
  result.spectral_convergence.reserve(iterations);
  for (std::size_t it = 0; it < iterations; ++it) {
    const AudioClip signal = istft(estimate, /*center=*/false);
    const ComplexSpectrogram rebuilt = stft_unpadded(signal.samples, synthesis, sample_rate);
    const RealMatrix mag = rebuilt.frames.cwiseAbs();
    const double err = std::sqrt(two_sided_energy(mag - target));
    result.spectral_convergence.push_back(target_norm > 0.0 ? err / target_norm : err);
    for (Eigen::Index t = 0; t < target.rows(); ++t) {
      for (Eigen::Index k = 0; k < target.cols(); ++k) {
        const double m = mag(t, k);
        estimate.frames(t, k) = m > 1e-12 ? rebuilt.frames(t, k) * (target(t, k) / m)
                                          : std::complex<double>(target(t, k), 0.0);
      }
    }
  }

  const std::size_t frames = static_cast<std::size_t>(target.rows());
  estimate.signal_length = output_length > 0 ? output_length : (frames - 1) * synthesis.hop;
  result.clip = istft(estimate, /*center=*/true);
  return result;
}

GriffinLimResult griffin_lim_detailed(const MelSpectrogram& mel, const StftConfig& config,
                                      const MelFilterBank& bank, std::size_t iterations) {
  if (mel.num_frames() == 0) throw InvalidArgument("empty mel spectrogram");
  const StftConfig synthesis{config.fft_size, config.fft_size / 4, config.window};
  const RealMatrix target = mel_to_linear_magnitude(mel, config, bank);
  return griffin_lim_magnitude(target, synthesis, mel.sample_rate, iterations,
                               (mel.num_frames() - 1) * mel.hop);
}

AudioClip griffin_lim(const MelSpectrogram& mel, const StftConfig& config,
                      const MelFilterBank& bank, std::size_t iterations) {
  return griffin_lim_detailed(mel, config, bank, iterations).clip;
}

AudioClip griffin_lim(const MelSpectrogram& mel, std::size_t iterations) {
  const StftConfig config = StftConfig::for_rate(mel.sample_rate);
  return griffin_lim(mel, config, default_filterbank(mel.sample_rate, config.fft_size), iterations);
}

}  // namespace sarlab::dsp
