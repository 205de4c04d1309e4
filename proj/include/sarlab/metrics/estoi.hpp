// sarlab/metrics/estoi.hpp

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

// Extended short-time objective intelligibility and a log-mel distortion
// measure.

#pragma once

#include <cstddef>
#include <vector>

#include "sarlab/dsp/audio.hpp"
#include "sarlab/dsp/mel.hpp"
#include "sarlab/nn/tensor.hpp"

namespace sarlab::metrics {

struct EstoiParams {
  int sample_rate = 10000;
  std::size_t frame = 256;
  std::size_t fft_size = 512;
  std::size_t num_bands = 15;
  double min_freq = 150.0;
  std::size_t segment = 30;
  double dyn_range_db = 40.0;
};

/// One-third octave band edges as FFT bin ranges [lo, hi).
struct OctaveBand {
  std::size_t lo = 0;
  std::size_t hi = 0;
  double center_hz = 0.0;
};

std::vector<OctaveBand> third_octave_bands(const EstoiParams& p = {});

/// Drops frames whose windowed reference energy lies more than
/// dyn_range_db below the loudest frame, from both signals, and overlap-adds
/// the survivors. Signals must be at p.sample_rate and of equal length.
void remove_silent_frames(const std::vector<double>& ref, const std::vector<double>& deg,
                          std::vector<double>& ref_out, std::vector<double>& deg_out,
                          const EstoiParams& p = {});

struct EstoiResult {
  double score = 0.0;
  std::size_t frames = 0;    // STFT frames after silence removal
  std::size_t segments = 0;  // frames - segment + 1
};

/// Lengths may differ by at most one feature hop (round(0.016 * rate));
/// the longer clip is truncated. Samples where the reference is exactly
/// zero at either end are trimmed from both clips first. Throws
/// InvalidArgument on rate mismatch, silent reference, or fewer than 30
/// frames of speech ("too short").
EstoiResult estoi_detailed(const dsp::AudioClip& reference, const dsp::AudioClip& degraded);
double estoi(const dsp::AudioClip& reference, const dsp::AudioClip& degraded);

/// (10 / ln 10) * sqrt(2) * RMS of the difference of two log-mel matrices.
double log_mel_distortion(const nn::Matrix<double>& reference, const nn::Matrix<double>& degraded);
double log_mel_distortion(const dsp::MelSpectrogram& reference,
                          const dsp::MelSpectrogram& degraded);

}  // namespace sarlab::metrics
