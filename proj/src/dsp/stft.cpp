// dsp/stft.cpp

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

#include "sarlab/dsp/stft.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sarlab/dsp/fft.hpp"
#include "sarlab/error.hpp"

namespace sarlab::dsp {
namespace {

// Index into a signal of length n extended by whole-sample symmetric
// reflection (no edge repeat), folded as often as needed.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t k = i % period;
  if (k < 0) k += period;
  const auto last = static_cast<std::ptrdiff_t>(n - 1);
  return static_cast<std::size_t>(k <= last ? k : period - k);
}

}  // namespace

StftConfig StftConfig::for_rate(int sample_rate) {
  StftConfig c;
  c.fft_size = 1024;
  c.hop = static_cast<std::size_t>(std::lround(0.016 * sample_rate));
  return c;
}

void StftConfig::validate() const {
  if (fft_size < 2 || (fft_size & (fft_size - 1)) != 0) {
    throw InvalidArgument("fft_size must be a power of two, got " + std::to_string(fft_size));
  }
  if (hop == 0 || hop > fft_size) {
    throw InvalidArgument("hop must satisfy 0 < hop <= fft_size, got " + std::to_string(hop));
  }
}

std::vector<double> make_window(Window window, std::size_t n) {
  std::vector<double> w(n);
  switch (window) {
    case Window::Hann:
      for (std::size_t i = 0; i < n; ++i) {
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(n));
      }
      break;
  }
  return w;
}

std::size_t centered_frame_count(std::size_t n, const StftConfig& config) {
  return 1 + n / config.hop;  // (n + fft - fft) / hop
}

ComplexSpectrogram stft_unpadded(const std::vector<double>& signal, const StftConfig& config,
                                 int sample_rate) {
  config.validate();
  if (signal.size() < config.fft_size) {
    throw InvalidArgument("signal shorter than one analysis frame");
  }
  const std::size_t frames = 1 + (signal.size() - config.fft_size) / config.hop;
  const auto window = make_window(config.window, config.fft_size);
  RealFft fft(config.fft_size);
  std::vector<double> buf(config.fft_size);

  ComplexSpectrogram spec;
  spec.config = config;
  spec.sample_rate = sample_rate;
  spec.frames.resize(static_cast<Eigen::Index>(frames), static_cast<Eigen::Index>(config.num_bins()));
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * config.hop;
    for (std::size_t i = 0; i < config.fft_size; ++i) buf[i] = signal[start + i] * window[i];
    fft.forward(buf, {spec.frames.row(static_cast<Eigen::Index>(t)).data(), config.num_bins()});
  }
  return spec;
}

ComplexSpectrogram stft(const AudioClip& clip, const StftConfig& config) {
  config.validate();
  if (clip.empty()) throw InvalidArgument("stft of an empty clip");
  const std::size_t n = clip.size();
  const std::size_t pad = config.fft_size / 2;
  std::vector<double> padded(n + 2 * pad);
  for (std::size_t i = 0; i < padded.size(); ++i) {
    padded[i] = clip.samples[reflect_index(static_cast<std::ptrdiff_t>(i) -
                                               static_cast<std::ptrdiff_t>(pad), n)];
  }
  ComplexSpectrogram spec = stft_unpadded(padded, config, clip.sample_rate);
  spec.signal_length = n;
  return spec;
}

AudioClip istft(const ComplexSpectrogram& spec, bool center) {
  const StftConfig& config = spec.config;
  config.validate();
  const std::size_t frames = spec.num_frames();
  if (frames == 0) throw InvalidArgument("istft of an empty spectrogram");
  if (static_cast<std::size_t>(spec.frames.cols()) != config.num_bins()) {
    throw InvalidArgument("spectrogram bin count does not match fft_size");
  }
  const std::size_t n_fft = config.fft_size;
  const std::size_t full = (frames - 1) * config.hop + n_fft;
  const auto window = make_window(config.window, n_fft);

  std::vector<double> acc(full, 0.0);
  std::vector<double> norm(full, 0.0);
  std::vector<double> buf(n_fft);
  RealFft fft(n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    fft.inverse({spec.frames.row(static_cast<Eigen::Index>(t)).data(), config.num_bins()}, buf);
    const std::size_t start = t * config.hop;
    for (std::size_t i = 0; i < n_fft; ++i) {
      acc[start + i] += buf[i] * window[i];
      norm[start + i] += window[i] * window[i];
    }
  }
  for (std::size_t i = 0; i < full; ++i) {
    acc[i] = norm[i] > 1e-10 ? acc[i] / norm[i] : 0.0;
  }

  AudioClip out;
  out.sample_rate = spec.sample_rate;
  if (!center) {
    out.samples = std::move(acc);
    return out;
  }
  const std::size_t pad = n_fft / 2;
  std::size_t length = spec.signal_length > 0 ? spec.signal_length : (frames - 1) * config.hop;
  length = std::min(length, full - pad);
  out.samples.assign(acc.begin() + static_cast<std::ptrdiff_t>(pad),
                     acc.begin() + static_cast<std::ptrdiff_t>(pad + length));
  return out;
}

RealMatrix magnitude(const ComplexSpectrogram& spec) { return spec.frames.cwiseAbs(); }

}  // namespace sarlab::dsp
