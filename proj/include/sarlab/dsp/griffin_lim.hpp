// sarlab/dsp/griffin_lim.hpp

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

#include "sarlab/dsp/mel.hpp"

namespace sarlab::dsp {

struct GriffinLimResult {
  AudioClip clip;
  /// || |STFT(x_n)| - A ||_F / ||A||_F after each iteration (two-sided weighting).
  std::vector<double> spectral_convergence;
};

/// Linear magnitudes from log-mel: max(0, pinv(bank) * exp(mel)). Rows follow
/// the synthesis grid (hop = fft/4); feature frames are mapped to it by
/// nearest-frame repetition.
RealMatrix mel_to_linear_magnitude(const MelSpectrogram& mel, const StftConfig& config,
                                   const MelFilterBank& bank);

/// Phase recovery from a target magnitude (rows = frames on a hop fft/4 grid).
/// Zero initial phase, no momentum. Iterates in the unpadded analysis domain
/// so each projection is an exact least-squares step; the returned clip is
/// trimmed by fft/2 to undo centring.
GriffinLimResult griffin_lim_magnitude(const RealMatrix& target, const StftConfig& synthesis,
                                       int sample_rate, std::size_t iterations,
                                       std::size_t output_length = 0);

GriffinLimResult griffin_lim_detailed(const MelSpectrogram& mel, const StftConfig& config,
                                      const MelFilterBank& bank, std::size_t iterations = 60);

/// Copy-synthesis waveform from a log-mel spectrogram.
AudioClip griffin_lim(const MelSpectrogram& mel, const StftConfig& config,
                      const MelFilterBank& bank, std::size_t iterations = 60);

/// Convenience overload using the default config/bank for mel.sample_rate.
AudioClip griffin_lim(const MelSpectrogram& mel, std::size_t iterations = 60);

}  // namespace sarlab::dsp
