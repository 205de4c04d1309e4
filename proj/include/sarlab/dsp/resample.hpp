// sarlab/dsp/resample.hpp

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

#include <vector>

#include "sarlab/dsp/audio.hpp"

namespace sarlab::dsp {

/// Windowed-sinc polyphase resampler design. The prototype low-pass runs at
/// the common upsampled rate L * in_rate and spans `taps_per_phase` periods of
/// the slower of the two rates.
struct ResamplerDesign {
  int taps_per_phase = 64;
  double kaiser_beta = 12.0;
  /// Fraction of the lower Nyquist frequency at which the stop band begins.
  double stopband_edge = 1.0;
};

/// Zero-phase rational resampling by L/M = target_rate/clip.sample_rate
/// (reduced by their gcd). Output length is ceil(n * L / M); output sample k
/// is aligned with input time k * M / L. Identity when the rates match.
AudioClip resample(const AudioClip& clip, int target_rate, const ResamplerDesign& design = {});

/// The prototype filter (gain L in the pass band), exposed for tests.
std::vector<double> resampler_prototype(int up, int down, const ResamplerDesign& design = {});

/// Zeroth-order modified Bessel function of the first kind.
double bessel_i0(double x);

}  // namespace sarlab::dsp
