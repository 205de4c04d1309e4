// dsp/resample.cpp

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

#include "sarlab/dsp/resample.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <string>

#include "sarlab/error.hpp"

namespace sarlab::dsp {

double bessel_i0(double x) {
  // Power series; converges quickly for the beta range used by Kaiser windows.
  double sum = 1.0;
  double term = 1.0;
  const double q = 0.25 * x * x;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum;
}

std::vector<double> resampler_prototype(int up, int down, const ResamplerDesign& design) {
  if (up <= 0 || down <= 0) throw InvalidArgument("resampling factors must be positive");
  if (design.taps_per_phase < 2) throw InvalidArgument("taps_per_phase must be >= 2");
  const int span = std::max(up, down);
  const std::size_t n = static_cast<std::size_t>(design.taps_per_phase) * span + 1;
  const double centre = 0.5 * static_cast<double>(n - 1);

  // Place the Kaiser transition band just below the lower Nyquist frequency.
  const double nyquist = 0.5 / span;  // cycles per upsampled sample
  const double atten_db = design.kaiser_beta / 0.1102 + 8.7;
  const double transition =
      (atten_db - 8.0) / (2.285 * 2.0 * std::numbers::pi * static_cast<double>(n - 1));
  const double cutoff = std::max(1e-6, design.stopband_edge * nyquist - 0.5 * transition);

  const double i0_beta = bessel_i0(design.kaiser_beta);
  std::vector<double> h(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - centre;
    const double arg = 2.0 * cutoff * t;
    const double sinc =
        std::abs(arg) < 1e-12 ? 1.0 : std::sin(std::numbers::pi * arg) / (std::numbers::pi * arg);
    const double r = t / centre;
    const double win = bessel_i0(design.kaiser_beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
    h[i] = 2.0 * cutoff * sinc * win;
    sum += h[i];
  }
  for (double& v : h) v *= static_cast<double>(up) / sum;
  return h;
}

AudioClip resample(const AudioClip& clip, int target_rate, const ResamplerDesign& design) {
  if (target_rate <= 0) {
    throw InvalidArgument("target rate must be positive, got " + std::to_string(target_rate));
  }
  if (clip.sample_rate <= 0) throw InvalidArgument("input sample rate must be positive");
  if (target_rate == clip.sample_rate) return clip;

  const int g = std::gcd(target_rate, clip.sample_rate);
  const std::int64_t up = target_rate / g;
  const std::int64_t down = clip.sample_rate / g;
  const auto h = resampler_prototype(static_cast<int>(up), static_cast<int>(down), design);
  const auto taps = static_cast<std::int64_t>(h.size());
  const std::int64_t centre = (taps - 1) / 2;

  const auto n_in = static_cast<std::int64_t>(clip.size());
  const std::int64_t n_out = (n_in * up + down - 1) / down;

  AudioClip out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(n_out), 0.0);
  for (std::int64_t k = 0; k < n_out; ++k) {
    // y[k] = sum_j x[j] h[centre + k*down - j*up]
    const std::int64_t pos = centre + k * down;
    std::int64_t j_lo = pos - (taps - 1);
    j_lo = j_lo <= 0 ? 0 : (j_lo + up - 1) / up;
    const std::int64_t j_hi = std::min(n_in - 1, pos / up);
    double acc = 0.0;
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      acc += clip.samples[static_cast<std::size_t>(j)] * h[static_cast<std::size_t>(pos - j * up)];
    }
    out.samples[static_cast<std::size_t>(k)] = acc;
  }
  return out;
}

}  // namespace sarlab::dsp
