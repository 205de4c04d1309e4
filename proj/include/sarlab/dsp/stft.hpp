// sarlab/dsp/stft.hpp

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

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "sarlab/dsp/audio.hpp"

namespace sarlab::dsp {

enum class Window { Hann };

struct StftConfig {
  std::size_t fft_size = 1024;
  std::size_t hop = 256;
  Window window = Window::Hann;

  /// fft 1024 with a 16 ms hop (256 at 16 kHz, 128 at 8 kHz).
  static StftConfig for_rate(int sample_rate);

  std::size_t num_bins() const { return fft_size / 2 + 1; }
  /// Throws InvalidArgument unless 0 < hop <= fft_size and fft_size is a power of two.
  void validate() const;
};

/// Periodic window of length n.
std::vector<double> make_window(Window window, std::size_t n);

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// T x (fft_size/2 + 1) one-sided spectra, frames centred at t * hop.
struct ComplexSpectrogram {
  ComplexMatrix frames;
  StftConfig config;
  int sample_rate = 16000;
  /// Length of the analysed signal; 0 when unknown (e.g. synthesized phase).
  std::size_t signal_length = 0;

  std::size_t num_frames() const { return static_cast<std::size_t>(frames.rows()); }
};

/// Frame count for a centred (reflect-padded by fft/2) analysis of n samples.
std::size_t centered_frame_count(std::size_t n, const StftConfig& config);

/// Reflect-pads by fft_size/2 on both sides and analyses with the configured
/// window. T = 1 + floor((n + fft_size - fft_size) / hop).
ComplexSpectrogram stft(const AudioClip& clip, const StftConfig& config);

/// Analysis without padding: frames start at t * hop, t = 0 .. 1 + (n - fft)/hop.
ComplexSpectrogram stft_unpadded(const std::vector<double>& signal, const StftConfig& config,
                                 int sample_rate);

/// Least-squares overlap-add inverse (window-weighted, normalised by the
/// summed squared window). With `center` the fft/2 padding is trimmed and the
/// result has `signal_length` samples (or (T-1) * hop if that is unknown);
/// otherwise the full (T-1) * hop + fft_size overlap-add buffer is returned.
AudioClip istft(const ComplexSpectrogram& spec, bool center = true);

/// Magnitudes |X| of a spectrogram.
RealMatrix magnitude(const ComplexSpectrogram& spec);

}  // namespace sarlab::dsp
