// sarlab/dsp/audio.hpp

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
#include <filesystem>
#include <vector>

namespace sarlab::dsp {

/// Mono waveform. Samples are nominally in [-1, 1].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  std::size_t num_frames = 0;
  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(num_frames) / sample_rate : 0.0;
  }
};

/// Reads a RIFF/WAVE file. Accepts mono 16-bit PCM and 32-bit IEEE float
/// (including WAVE_FORMAT_EXTENSIBLE wrappers of those). 16-bit samples are
/// scaled by 1/32768; float samples are clamped to [-1, 1].
AudioClip read_wav(const std::filesystem::path& path);

/// Header-only scan; does not decode samples. Channel count is not checked.
WavInfo read_wav_info(const std::filesystem::path& path);

/// Writes 16-bit PCM mono. Samples are hard-clipped to [-1, 1] and stored as
/// clamp(round(x * 32768), -32768, 32767), so read/write round-trips exactly.
void write_wav(const AudioClip& clip, const std::filesystem::path& path);

/// Writes 32-bit IEEE float mono (no clipping). Used for test fixtures.
void write_wav_float(const AudioClip& clip, const std::filesystem::path& path);

}  // namespace sarlab::dsp
