// sarlab/harness/corpus.hpp

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

// Synthetic single-speaker corpus: formant-synthesised syllable strings with
// a declining pitch contour, fricative noise bursts and pauses. Stands in for
// a recorded corpus when none is available; any directory of WAV files can
// be used instead.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sarlab/dsp/audio.hpp"

namespace sarlab::harness {

struct SyntheticVoice {
  int sample_rate = 16000;
  double base_f0 = 120.0;      // speaker's mean pitch (Hz)
  double min_seconds = 1.6;
  double max_seconds = 3.0;
  double noise_floor = 3e-4;   // background noise standard deviation
  double peak = 0.5;
};

/// One utterance; deterministic in (voice, seed).
dsp::AudioClip synthesize_utterance(const SyntheticVoice& voice, std::uint64_t seed);

/// Writes utt_00000.wav ... into `dir` (created if needed). Utterance i uses
/// seed derive_seed(seed, {"utt", i}). Returns the number written.
std::size_t write_synthetic_corpus(const std::filesystem::path& dir, std::size_t count,
                                   std::uint64_t seed, const SyntheticVoice& voice = {});

}  // namespace sarlab::harness
