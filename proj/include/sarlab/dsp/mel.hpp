// sarlab/dsp/mel.hpp

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

#include <cstddef>
#include <vector>

#include "sarlab/dsp/audio.hpp"
#include "sarlab/dsp/stft.hpp"

namespace sarlab::dsp {

inline constexpr std::size_t kNumMels = 80;
inline constexpr double kMelFloor = 1e-5;

/// Slaney mel scale: linear (200/3 Hz per mel) below 1 kHz, logarithmic above.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// Triangular, area-normalised filters (row k integrates to ~2/(f[k+2]-f[k])).
struct MelFilterBank {
  RealMatrix weights;  // n_mels x (fft_size/2 + 1)
  /// Nonnegative least-squares-style inverse used for magnitude recovery:
  /// the Moore-Penrose pseudo-inverse, (fft_size/2 + 1) x n_mels.
  RealMatrix pseudo_inverse;
  std::vector<double> center_hz;
  double fmin = 0.0;
  double fmax = 8000.0;
  int sample_rate = 16000;
  std::size_t fft_size = 1024;

  std::size_t num_mels() const { return static_cast<std::size_t>(weights.rows()); }
};

MelFilterBank mel_filterbank(int sample_rate, std::size_t fft_size, std::size_t n_mels = kNumMels,
                             double fmin = 0.0, double fmax = -1.0);

/// Cached default bank (80 mels, 0 .. sample_rate/2). References stay valid
/// for the lifetime of the program.
const MelFilterBank& default_filterbank(int sample_rate, std::size_t fft_size = 1024);

/// T x n_mels natural-log mel magnitudes: log(max(bank * |X|, 1e-5)).
struct MelSpectrogram {
  RealMatrix frames;
  int sample_rate = 16000;
  std::size_t hop = 256;

  std::size_t num_frames() const { return static_cast<std::size_t>(frames.rows()); }
  std::size_t num_mels() const { return static_cast<std::size_t>(frames.cols()); }
};

MelSpectrogram mel_spectrogram(const AudioClip& clip, const StftConfig& config,
                               const MelFilterBank& bank);

/// Same as above with the default configuration for the clip's sample rate.
MelSpectrogram mel_spectrogram(const AudioClip& clip);

}  // namespace sarlab::dsp
