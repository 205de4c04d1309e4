// tests/unit/test_dsp.cpp

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

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

#include "sarlab/dsp/audio.hpp"
#include "sarlab/dsp/griffin_lim.hpp"
#include "sarlab/dsp/mel.hpp"
#include "sarlab/dsp/mel_io.hpp"
#include "sarlab/dsp/resample.hpp"
#include "sarlab/dsp/stft.hpp"
#include "sarlab/error.hpp"
#include "test_support.hpp"

using namespace sarlab;
using namespace sarlab::dsp;
using sarlab::testing::sine;
using sarlab::testing::white_noise;

namespace {

void write_raw_wav(const std::filesystem::path& p, std::uint16_t format, std::uint16_t channels,
                   std::uint16_t bits, std::uint32_t rate, const std::vector<char>& data) {
  std::ofstream out(p, std::ios::binary);
  auto u32 = [&](std::uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
  auto u16 = [&](std::uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
  out.write("RIFF", 4);
  u32(static_cast<std::uint32_t>(36 + data.size()));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  u32(16);
  u16(format);
  u16(channels);
  u32(rate);
  u32(rate * channels * bits / 8);
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(bits);
  out.write("data", 4);
  u32(static_cast<std::uint32_t>(data.size()));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
}

// Independent reflect padding (numpy "reflect" semantics for pad < n).
std::vector<double> reflect_pad(const std::vector<double>& x, std::size_t pad) {
  std::vector<double> out;
  for (std::size_t i = pad; i >= 1; --i) out.push_back(x[i]);
  out.insert(out.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) out.push_back(x[x.size() - 1 - i]);
  return out;
}

}  // namespace

TEST_SUITE("dsp") {

TEST_CASE("wav: 16-bit full-scale sample maps to 32767/32768") {
  auto dir = testing::scratch_dir("wav_scale");
  std::vector<char> data(4);
  const std::int16_t vals[2] = {32767, -32768};
  std::memcpy(data.data(), vals, 4);
  write_raw_wav(dir / "a.wav", 1, 1, 16, 16000, data);
  const AudioClip c = read_wav(dir / "a.wav");
  CHECK(c.sample_rate == 16000);
  REQUIRE(c.size() == 2);
  CHECK(c.samples[0] == 32767.0 / 32768.0);
  CHECK(c.samples[1] == -1.0);
}

TEST_CASE("wav: rejects stereo, unsupported encodings, empty data, missing files") {
  auto dir = testing::scratch_dir("wav_errors");
  write_raw_wav(dir / "stereo.wav", 1, 2, 16, 16000, std::vector<char>(8));
  CHECK_THROWS_WITH_AS(read_wav(dir / "stereo.wav"), doctest::Contains("unsupported channel count"),
                       InvalidArgument);
  write_raw_wav(dir / "pcm8.wav", 1, 1, 8, 16000, std::vector<char>(8));
  CHECK_THROWS_WITH_AS(read_wav(dir / "pcm8.wav"), doctest::Contains("unsupported encoding"),
                       InvalidArgument);
  write_raw_wav(dir / "empty.wav", 1, 1, 16, 16000, {});
  CHECK_THROWS_AS(read_wav(dir / "empty.wav"), IoError);
  CHECK_THROWS_AS(read_wav(dir / "missing.wav"), IoError);
}

TEST_CASE("wav: writer layout and clipping") {
  auto dir = testing::scratch_dir("wav_write");
  AudioClip c = sine(440.0, 0.5, 16000, 16000);
  c.samples[10] = 2.0;
  c.samples[11] = -3.0;
  write_wav(c, dir / "out.wav");
  CHECK(std::filesystem::file_size(dir / "out.wav") == 44 + 32000);
  const WavInfo info = read_wav_info(dir / "out.wav");
  CHECK(info.num_frames == 16000);
  CHECK(info.bits_per_sample == 16);

  std::ifstream in(dir / "out.wav", std::ios::binary);
  in.seekg(44 + 2 * 10);
  std::int16_t v[2];
  in.read(reinterpret_cast<char*>(v), 4);
  CHECK(v[0] == 32767);
  CHECK(v[1] == -32768);

  CHECK_THROWS_AS(write_wav(AudioClip{}, dir / "empty.wav"), InvalidArgument);
  CHECK_THROWS_AS(write_wav(c, dir / "no_such_dir" / "x.wav"), IoError);
}

TEST_CASE("wav: write/read round-trip within one LSB on random clips") {
  auto dir = testing::scratch_dir("wav_roundtrip");
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    AudioClip c;
    c.sample_rate = 16000;
    c.samples.resize(500 + 97 * trial);
    for (auto& s : c.samples) s = std::round(u(gen) * 32767.0) / 32768.0;
    write_wav(c, dir / "r.wav");
    const AudioClip back = read_wav(dir / "r.wav");
    REQUIRE(back.size() == c.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) worst = std::max(worst, std::abs(back.samples[i] - c.samples[i]));
    CHECK(worst <= 1.0 / 32768.0);
    write_wav(back, dir / "r2.wav");
    CHECK(read_wav(dir / "r2.wav").samples == back.samples);
  }
}

TEST_CASE("wav: float32 input is accepted") {
  auto dir = testing::scratch_dir("wav_float");
  AudioClip c = sine(300.0, 0.25, 1000, 10000);
  write_wav_float(c, dir / "f.wav");
  const AudioClip back = read_wav(dir / "f.wav");
  CHECK(back.sample_rate == 10000);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(back.samples[i] == doctest::Approx(c.samples[i]).epsilon(1e-7));
}

TEST_CASE("resample: identity when rates match") {
  const AudioClip c = white_noise(1234, 16000, 1);
  CHECK(resample(c, 16000).samples == c.samples);
  CHECK_THROWS_AS(resample(c, 0), InvalidArgument);
  CHECK_THROWS_AS(resample(c, -8000), InvalidArgument);
}

TEST_CASE("resample: 440 Hz tone keeps its frequency at 8 kHz") {
  const AudioClip c = sine(440.0, 0.5, 16000, 16000);
  const AudioClip d = resample(c, 8000);
  CHECK(d.sample_rate == 8000);
  CHECK(d.size() == 8000);
  const double bin = 8000.0 / static_cast<double>(d.size());
  CHECK(std::abs(testing::dft_peak_hz(d.samples, 8000, 50.0, 3900.0) - 440.0) <= bin);
}

TEST_CASE("resample: tones below 0.45 * min rate keep frequency within one bin") {
  std::mt19937_64 gen(11);
  const std::pair<int, int> pairs[] = {{16000, 8000}, {8000, 16000}, {16000, 10000}, {22050, 16000}};
  for (auto [from, to] : pairs) {
    std::uniform_real_distribution<double> f(100.0, 0.45 * std::min(from, to));
    for (int trial = 0; trial < 3; ++trial) {
      const double freq = f(gen);
      const AudioClip d = resample(sine(freq, 0.4, static_cast<std::size_t>(from / 2), from), to);
      const double bin = static_cast<double>(to) / static_cast<double>(d.size());
      CAPTURE(from);
      CAPTURE(to);
      CAPTURE(freq);
      CHECK(std::abs(testing::dft_peak_hz(d.samples, to, 20.0, 0.5 * to) - freq) <= bin);
      // Duration preserved within one output sample period.
      CHECK(std::abs(d.duration_seconds() - 0.5) <= 1.0 / to);
    }
  }
}

TEST_CASE("resample: down/up removes content above the intermediate Nyquist") {
  auto round_trip = [](const AudioClip& c) { return resample(resample(c, 8000), 16000); };
  const AudioClip hi = round_trip(sine(6000.0, 0.5, 16000, 16000));
  const AudioClip lo = round_trip(sine(1000.0, 0.5, 16000, 16000));
  REQUIRE(hi.size() == 16000);
  // Skip filter edge transients.
  const double e_hi = testing::energy(hi.samples, 1000, 15000);
  const double e_lo = testing::energy(lo.samples, 1000, 15000);
  CHECK(10.0 * std::log10(e_lo / e_hi) >= 20.0);
}

TEST_CASE("stft: frame count, zeros, linearity") {
  const StftConfig cfg = StftConfig::for_rate(16000);
  CHECK(cfg.fft_size == 1024);
  CHECK(cfg.hop == 256);
  CHECK(StftConfig::for_rate(8000).hop == 128);

  AudioClip zeros;
  zeros.samples.assign(16000, 0.0);
  const auto z = stft(zeros, cfg);
  CHECK(z.num_frames() == 63);
  CHECK(z.frames.cols() == 513);
  CHECK(z.frames.cwiseAbs().maxCoeff() == 0.0);

  const AudioClip x = white_noise(5000, 16000, 3);
  AudioClip y = x;
  for (auto& s : y.samples) s *= -2.5;
  const auto sx = stft(x, cfg);
  const auto sy = stft(y, cfg);
  CHECK((sy.frames - (-2.5) * sx.frames).cwiseAbs().maxCoeff() < 1e-9);

  CHECK_THROWS_AS(stft(AudioClip{}, cfg), InvalidArgument);
  CHECK_THROWS_AS(stft(x, StftConfig{1000, 256}), InvalidArgument);
  CHECK_THROWS_AS(stft(x, StftConfig{1024, 0}), InvalidArgument);
  CHECK_THROWS_AS(stft(x, StftConfig{1024, 2048}), InvalidArgument);
}

TEST_CASE("stft: windowed Parseval against direct summation") {
  const StftConfig cfg{1024, 256};
  const AudioClip x = white_noise(4000, 16000, 5);
  const auto spec = stft(x, cfg);
  const auto padded = reflect_pad(x.samples, 512);
  const double n = 1024.0;
  for (std::size_t t = 0; t < spec.num_frames(); ++t) {
    double direct = 0.0;
    for (std::size_t i = 0; i < 1024; ++i) {
      const double w = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / n);
      const double v = padded[t * 256 + i] * w;
      direct += v * v;
    }
    double spectral = 0.0;
    for (Eigen::Index k = 0; k < 513; ++k) {
      const double m2 = std::norm(spec.frames(static_cast<Eigen::Index>(t), k));
      spectral += (k == 0 || k == 512) ? m2 : 2.0 * m2;
    }
    spectral /= n;
    CHECK(std::abs(spectral - direct) <= 1e-6 * direct);
  }
}

TEST_CASE("istft: round-trip on 100 random clips, hop = fft/4") {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<std::size_t> len(300, 6000);
  const StftConfig cfg{1024, 256};
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const AudioClip x = white_noise(len(gen), 16000, 1000 + static_cast<std::uint64_t>(trial), 0.3);
    const AudioClip y = istft(stft(x, cfg));
    REQUIRE(y.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(y.samples[i] - x.samples[i]));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("istft: zero spectrogram, single frame, empty input") {
  ComplexSpectrogram spec;
  spec.config = StftConfig{1024, 256};
  spec.frames = ComplexMatrix::Zero(1, 513);
  const AudioClip raw = istft(spec, /*center=*/false);
  CHECK(raw.size() == 1024);
  CHECK(std::all_of(raw.samples.begin(), raw.samples.end(), [](double v) { return v == 0.0; }));

  spec.frames = ComplexMatrix::Zero(10, 513);
  const AudioClip z = istft(spec);
  CHECK(z.size() == 9 * 256);
  CHECK(std::all_of(z.samples.begin(), z.samples.end(), [](double v) { return v == 0.0; }));

  spec.frames.resize(0, 513);
  CHECK_THROWS_AS(istft(spec), InvalidArgument);
}

TEST_CASE("mel: filterbank shape, positivity, monotone peaks") {
  const MelFilterBank bank = mel_filterbank(16000, 1024, 80, 0.0, 8000.0);
  CHECK(bank.weights.rows() == 80);
  CHECK(bank.weights.cols() == 513);
  CHECK(bank.weights.minCoeff() >= 0.0);
  std::vector<Eigen::Index> peaks;
  for (Eigen::Index m = 0; m < 80; ++m) {
    CHECK(bank.weights.row(m).maxCoeff() > 0.0);
    Eigen::Index arg;
    bank.weights.row(m).maxCoeff(&arg);
    peaks.push_back(arg);
  }
  for (std::size_t m = 1; m + 1 < peaks.size(); ++m) {
    CHECK(peaks[m - 1] < peaks[m]);
    CHECK(peaks[m] < peaks[m + 1]);
  }
  CHECK_THROWS_AS(mel_filterbank(16000, 1024, 80, 100.0, 9000.0), InvalidArgument);
  CHECK_THROWS_AS(mel_filterbank(16000, 1024, 80, 500.0, 400.0), InvalidArgument);
  CHECK_THROWS_AS(mel_filterbank(16000, 1024, 0), InvalidArgument);
}

TEST_CASE("mel: centre frequencies follow the Slaney scale") {
  // Recomputed from the scale's definition: 3 mel per 200 Hz up to 1 kHz,
  // then 27 mels per factor 6.4 in frequency.
  auto to_mel = [](double f) {
    return f < 1000.0 ? 3.0 * f / 200.0 : 15.0 + 27.0 * std::log(f / 1000.0) / std::log(6.4);
  };
  auto to_hz = [](double m) {
    return m < 15.0 ? 200.0 * m / 3.0 : 1000.0 * std::pow(6.4, (m - 15.0) / 27.0);
  };
  const MelFilterBank bank = mel_filterbank(16000, 1024, 80, 0.0, 8000.0);
  const double top = to_mel(8000.0);
  for (std::size_t k = 0; k < 80; ++k) {
    const double expected = to_hz(top * static_cast<double>(k + 1) / 81.0);
    CHECK(std::abs(bank.center_hz[k] - expected) <= 1e-9 * std::max(1.0, expected));
  }
}

TEST_CASE("mel: silence hits the floor everywhere") {
  AudioClip silence;
  silence.samples.assign(8000, 0.0);
  const MelSpectrogram mel = mel_spectrogram(silence);
  CHECK(mel.num_mels() == 80);
  CHECK(mel.num_frames() == 32);
  CHECK((mel.frames.array() == std::log(kMelFloor)).all());
}

TEST_CASE("mel: 1 kHz tone peaks in the band centred nearest 1 kHz") {
  const MelFilterBank& bank = default_filterbank(16000);
  std::size_t nearest = 0;
  for (std::size_t k = 0; k < 80; ++k) {
    if (std::abs(bank.center_hz[k] - 1000.0) < std::abs(bank.center_hz[nearest] - 1000.0)) nearest = k;
  }
  // Cosine phase with a period-aligned length keeps the reflect-padded edge
  // frames free of phase flips.
  const MelSpectrogram mel =
      mel_spectrogram(sine(1000.0, 0.5, 16001, 16000, std::numbers::pi / 2.0));
  for (Eigen::Index t = 0; t < mel.frames.rows(); ++t) {
    Eigen::Index arg;
    mel.frames.row(t).maxCoeff(&arg);
    CHECK(static_cast<std::size_t>(arg) == nearest);
  }
}

TEST_CASE("mel: log-domain scale covariance") {
  const AudioClip x = white_noise(6000, 16000, 17, 0.05);
  for (double a : {2.0, 1.1, 0.9}) {
    AudioClip y = x;
    for (auto& s : y.samples) s *= a;
    const MelSpectrogram mx = mel_spectrogram(x);
    const MelSpectrogram my = mel_spectrogram(y);
    const double floor = std::log(kMelFloor);
    for (Eigen::Index t = 0; t < mx.frames.rows(); ++t) {
      for (Eigen::Index k = 0; k < 80; ++k) {
        if (mx.frames(t, k) > floor + 1.0 && my.frames(t, k) > floor + 1.0) {
          CHECK(std::abs(my.frames(t, k) - mx.frames(t, k) - std::log(a)) <= 1e-9);
        }
      }
    }
  }
}

TEST_CASE("mel: config/bank mismatch is rejected") {
  const AudioClip x = white_noise(4000, 8000, 1);
  const MelFilterBank bank = mel_filterbank(16000, 1024);
  CHECK_THROWS_AS(mel_spectrogram(x, StftConfig::for_rate(8000), bank), InvalidArgument);
  CHECK_THROWS_AS(mel_spectrogram(white_noise(4000, 16000, 1), StftConfig{512, 128}, bank),
                  InvalidArgument);
}

TEST_CASE("mel io: SARMEL1 header and float payload") {
  auto dir = testing::scratch_dir("melio");
  const MelSpectrogram mel = mel_spectrogram(white_noise(8000, 16000, 4));
  write_mel(mel, dir / "a.mel");
  CHECK(is_mel_file(dir / "a.mel"));
  std::ifstream in(dir / "a.mel", std::ios::binary);
  std::string header;
  std::getline(in, header);
  CHECK(header == "SARMEL1 32 80 16000 256");
  CHECK(std::filesystem::file_size(dir / "a.mel") == header.size() + 1 + 32 * 80 * 4);
  const MelSpectrogram back = read_mel(dir / "a.mel");
  CHECK(back.hop == 256);
  CHECK(back.sample_rate == 16000);
  CHECK((back.frames - mel.frames.cast<float>().cast<double>()).cwiseAbs().maxCoeff() == 0.0);

  std::filesystem::resize_file(dir / "a.mel", 200);
  CHECK_THROWS_AS(read_mel(dir / "a.mel"), IoError);
}

TEST_CASE("griffin-lim: tone frequency survives copy-synthesis") {
  const AudioClip x = sine(440.0, 0.5, 16000, 16000);
  const AudioClip y = griffin_lim(mel_spectrogram(x), 60);
  REQUIRE(y.size() >= 15000);
  // Tolerance in analysis-FFT bins: the mel magnitude cannot resolve finer.
  const double bin = 16000.0 / 1024.0;
  CHECK(std::abs(testing::dft_peak_hz(y.samples, 16000, 50.0, 4000.0) - 440.0) <= 2.0 * bin);
  for (double v : y.samples) REQUIRE(std::isfinite(v));
}

TEST_CASE("griffin-lim: all-floor mel gives near silence") {
  MelSpectrogram mel;
  mel.frames = RealMatrix::Constant(40, 80, std::log(kMelFloor));
  const AudioClip y = griffin_lim(mel, 20);
  const double rms = std::sqrt(testing::energy(y.samples) / static_cast<double>(y.size()));
  CHECK(rms < 1e-3);
}

TEST_CASE("griffin-lim: spectral convergence is non-increasing and deterministic") {
  const AudioClip x = testing::modulated_tones(12000, 16000, 3);
  const MelSpectrogram mel = mel_spectrogram(x);
  const StftConfig cfg = StftConfig::for_rate(16000);
  const auto& bank = default_filterbank(16000);
  const auto a = griffin_lim_detailed(mel, cfg, bank, 60);
  REQUIRE(a.spectral_convergence.size() == 60);
  for (std::size_t i = 1; i < a.spectral_convergence.size(); ++i) {
    CHECK(a.spectral_convergence[i] <= a.spectral_convergence[i - 1] + 1e-7);
  }
  CHECK(a.spectral_convergence.back() < a.spectral_convergence.front());
  const auto b = griffin_lim_detailed(mel, cfg, bank, 60);
  CHECK(a.clip.samples == b.clip.samples);
  CHECK_THROWS_AS(griffin_lim_detailed(mel, cfg, bank, 0), InvalidArgument);
  CHECK_THROWS_AS(griffin_lim(MelSpectrogram{}, 10), InvalidArgument);
}

}  // TEST_SUITE
