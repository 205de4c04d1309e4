// harness/corpus.cpp

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

#include "sarlab/harness/corpus.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "sarlab/error.hpp"
#include "sarlab/nn/rng.hpp"

namespace sarlab::harness {

namespace {

constexpr double kPi = std::numbers::pi;

struct Vowel {
  std::array<double, 5> formants;
};

// Adult male formant targets (Hz) for a handful of vowels.
constexpr Vowel kVowels[] = {
    {{730, 1090, 2440, 3400, 4500}},  // a
    {{530, 1840, 2480, 3500, 4500}},  // e
    {{270, 2290, 3010, 3700, 4500}},  // i
    {{570, 840, 2410, 3300, 4500}},   // o
    {{300, 870, 2240, 3300, 4500}},   // u
    {{660, 1720, 2410, 3400, 4500}},  // ae
    {{490, 1350, 1690, 3300, 4500}},  // er
    {{640, 1190, 2390, 3400, 4500}},  // uh
};
constexpr std::array<double, 5> kBandwidths = {80, 100, 140, 200, 300};

// Two-pole resonator with unity gain at DC.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double step(double x, double freq, double bw, double rate) {
    const double r = std::exp(-kPi * bw / rate);
    const double b1 = 2.0 * r * std::cos(2.0 * kPi * freq / rate);
    const double b2 = -r * r;
    const double y = (1.0 - b1 - b2) * x + b1 * y1 + b2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

enum class Segment { kSilence, kVowel, kFricative, kBurst };

struct Event {
  Segment kind;
  std::size_t length;
  int vowel = 0;
  double fric_freq = 0.0;
  double gain = 1.0;
};

}  // namespace

dsp::AudioClip synthesize_utterance(const SyntheticVoice& voice, std::uint64_t seed) {
  if (voice.sample_rate < 8000) throw InvalidArgument("synthetic voice: sample rate too low");
  nn::SeedableRng rng(seed);
  const double rate = voice.sample_rate;
  const auto total = static_cast<std::size_t>(rate * rng.uniform(voice.min_seconds, voice.max_seconds));
  auto samples_of = [&](double seconds) { return static_cast<std::size_t>(seconds * rate); };

  // Event list: lead silence, syllables (C)V with occasional pauses, tail.
  std::vector<Event> events;
  std::size_t used = 0;
  auto push = [&](Event e) {
    used += e.length;
    events.push_back(e);
  };
  push({Segment::kSilence, samples_of(rng.uniform(0.08, 0.2))});
  const std::size_t tail = samples_of(rng.uniform(0.08, 0.2));
  while (used + tail < total) {
    const double c = rng.uniform();
    if (c < 0.35) {
      push({Segment::kFricative, samples_of(rng.uniform(0.05, 0.12)), 0,
            rng.uniform(2500.0, 6500.0), rng.uniform(0.3, 0.8)});
    } else if (c < 0.55) {
      push({Segment::kSilence, samples_of(rng.uniform(0.02, 0.05))});
      push({Segment::kBurst, samples_of(0.015), 0, rng.uniform(1500.0, 4000.0),
            rng.uniform(0.5, 1.0)});
    }
    push({Segment::kVowel, samples_of(rng.uniform(0.09, 0.25)),
          static_cast<int>(rng.next_u64() % std::size(kVowels)), 0.0, rng.uniform(0.6, 1.0)});
    if (rng.uniform() < 0.15) push({Segment::kSilence, samples_of(rng.uniform(0.06, 0.15))});
  }
  push({Segment::kSilence, tail});

  std::size_t n = 0;
  for (const auto& e : events) n += e.length;
  std::vector<double> out(n, 0.0);

  // Pitch: declination across the utterance plus a per-vowel accent.
  const double f0_start = voice.base_f0 * rng.uniform(1.05, 1.2);
  const double f0_end = voice.base_f0 * rng.uniform(0.8, 0.92);
  std::array<Resonator, 5> tract{};
  Resonator fric{};
  std::array<double, 5> formants = kVowels[0].formants;
  double flow_prev = 0.0;
  double phase = 0.0;
  double amp = 0.0;
  std::size_t pos = 0;
  for (const auto& e : events) {
    const double accent = rng.uniform(-0.08, 0.12);
    const auto& target = kVowels[e.vowel].formants;
    for (std::size_t i = 0; i < e.length; ++i, ++pos) {
      const double progress = static_cast<double>(pos) / static_cast<double>(n);
      const double local = static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(e.length, 1));
      double s = 0.0;
      if (e.kind == Segment::kVowel) {
        // Formants glide towards the target; amplitude follows a smooth arc.
        for (int k = 0; k < 5; ++k) formants[k] += (target[k] - formants[k]) * (60.0 / rate);
        const double f0 = (f0_start + (f0_end - f0_start) * progress) *
                          (1.0 + accent * std::sin(kPi * local));
        phase += f0 / rate;
        if (phase >= 1.0) phase -= 1.0;
        // Rosenberg glottal flow; its derivative (flow plus lip radiation)
        // has a jump at closure, giving the usual -6 dB/octave source tilt.
        constexpr double kOpen = 0.4, kClose = 0.16;
        double flow = 0.0;
        if (phase < kOpen) {
          flow = 0.5 * (1.0 - std::cos(kPi * phase / kOpen));
        } else if (phase < kOpen + kClose) {
          flow = std::cos(0.5 * kPi * (phase - kOpen) / kClose);
        }
        const double src = (flow - flow_prev) * rate / f0 + 0.02 * rng.normal() * flow;
        flow_prev = flow;
        const double env = e.gain * std::pow(std::sin(kPi * local), 0.4);
        amp += (env - amp) * (200.0 / rate);
        s = src * amp;
        for (int k = 0; k < 5; ++k) s = tract[k].step(s, formants[k], kBandwidths[k], rate);
      } else if (e.kind == Segment::kFricative || e.kind == Segment::kBurst) {
        const double env = e.gain * std::sin(kPi * local);
        s = fric.step(rng.normal(), e.fric_freq, 0.35 * e.fric_freq, rate) * env * 2.5;
        amp *= 1.0 - 300.0 / rate;
      } else {
        amp *= 1.0 - 300.0 / rate;
      }
      out[pos] = s;
    }
  }

  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? voice.peak / peak : 1.0;
  dsp::AudioClip clip;
  clip.sample_rate = voice.sample_rate;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) clip.samples[i] = out[i] * scale + voice.noise_floor * rng.normal();
  return clip;
}

std::size_t write_synthetic_corpus(const std::filesystem::path& dir, std::size_t count,
                                   std::uint64_t seed, const SyntheticVoice& voice) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create corpus directory " + dir.string() + ": " + ec.message());
  for (std::size_t i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "utt_%05zu.wav", i);
    const auto clip = synthesize_utterance(voice, nn::derive_seed(seed, {"utt", std::to_string(i)}));
    dsp::write_wav(clip, dir / name);
  }
  return count;
}

}  // namespace sarlab::harness
