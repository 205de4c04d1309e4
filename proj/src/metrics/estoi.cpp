// metrics/estoi.cpp

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

#include "sarlab/metrics/estoi.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "sarlab/dsp/fft.hpp"
#include "sarlab/dsp/resample.hpp"
#include "sarlab/error.hpp"

namespace sarlab::metrics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kNormGuard = 1e-12;

// Symmetric Hann without its zero end points (length n + 2, trimmed).
std::vector<double> analysis_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i + 1) /
                                static_cast<double>(n + 1));
  }
  return w;
}

// Frame starts 0, hop, ... strictly below len - frame.
std::size_t frame_count(std::size_t len, std::size_t frame, std::size_t hop) {
  if (len <= frame) return 0;
  return (len - frame + hop - 1) / hop;
}

// Normalises each row of a (rows x cols) block to zero mean / unit norm.
void normalise_rows(Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    m.row(r).array() -= m.row(r).mean();
    m.row(r) /= m.row(r).norm() + kNormGuard;
  }
}

}  // namespace

std::vector<OctaveBand> third_octave_bands(const EstoiParams& p) {
  const std::size_t bins = p.fft_size / 2 + 1;
  auto nearest_bin = [&](double hz) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * p.sample_rate / static_cast<double>(p.fft_size);
      const double d = (f - hz) * (f - hz);
      if (d < best_d) {
        best_d = d;
        best = k;
      }
    }
    return best;
  };
  std::vector<OctaveBand> bands;
  for (std::size_t i = 0; i < p.num_bands; ++i) {
    const double k = static_cast<double>(i);
    OctaveBand b;
    b.center_hz = p.min_freq * std::pow(2.0, k / 3.0);
    b.lo = nearest_bin(p.min_freq * std::pow(2.0, (2.0 * k - 1.0) / 6.0));
    b.hi = nearest_bin(p.min_freq * std::pow(2.0, (2.0 * k + 1.0) / 6.0));
    bands.push_back(b);
  }
  return bands;
}

void remove_silent_frames(const std::vector<double>& ref, const std::vector<double>& deg,
                          std::vector<double>& ref_out, std::vector<double>& deg_out,
                          const EstoiParams& p) {
  if (ref.size() != deg.size()) throw InvalidArgument("remove_silent_frames: length mismatch");
  const std::size_t n = p.frame;
  const std::size_t hop = n / 2;
  const auto w = analysis_window(n);
  const std::size_t frames = frame_count(ref.size(), n, hop);
  std::vector<double> energy_db(frames);
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = w[i] * ref[f * hop + i];
      acc += v * v;
    }
    energy_db[f] = 20.0 * std::log10(std::sqrt(acc) + kEps);
  }
  ref_out.clear();
  deg_out.clear();
  if (frames == 0) return;
  const double top = *std::max_element(energy_db.begin(), energy_db.end());
  std::size_t kept = 0;
  for (std::size_t f = 0; f < frames; ++f) {
    if (top - p.dyn_range_db - energy_db[f] >= 0.0) continue;
    ref_out.resize(kept * hop + n, 0.0);
    deg_out.resize(kept * hop + n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      ref_out[kept * hop + i] += w[i] * ref[f * hop + i];
      deg_out[kept * hop + i] += w[i] * deg[f * hop + i];
    }
    ++kept;
  }
}

EstoiResult estoi_detailed(const dsp::AudioClip& reference, const dsp::AudioClip& degraded) {
  if (reference.sample_rate != degraded.sample_rate) {
    throw InvalidArgument("estoi: sample rates differ (" + std::to_string(reference.sample_rate) +
                          " vs " + std::to_string(degraded.sample_rate) + ")");
  }
  const int rate = reference.sample_rate;
  if (rate <= 0) throw InvalidArgument("estoi: bad sample rate");
  const auto tolerance = static_cast<std::size_t>(std::lround(0.016 * rate));
  const std::size_t a = reference.size(), b = degraded.size();
  if ((a > b ? a - b : b - a) > tolerance) {
    throw InvalidArgument("estoi: lengths differ by more than one hop (" + std::to_string(a) +
                          " vs " + std::to_string(b) + ")");
  }
  std::size_t end = std::min(a, b);
  std::size_t begin = 0;
  while (begin < end && reference.samples[begin] == 0.0) ++begin;
  while (end > begin && reference.samples[end - 1] == 0.0) --end;
  if (begin == end) throw InvalidArgument("estoi: reference is silent");

  const EstoiParams p;
  auto prepare = [&](const dsp::AudioClip& c) {
    dsp::AudioClip t;
    t.sample_rate = rate;
    t.samples.assign(c.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                     c.samples.begin() + static_cast<std::ptrdiff_t>(end));
    return rate == p.sample_rate ? t : dsp::resample(t, p.sample_rate);
  };
  const dsp::AudioClip x10 = prepare(reference);
  const dsp::AudioClip y10 = prepare(degraded);

  std::vector<double> x, y;
  remove_silent_frames(x10.samples, y10.samples, x, y, p);

  const std::size_t n = p.frame, hop = n / 2;
  const std::size_t frames = frame_count(x.size(), n, hop);
  if (frames < p.segment) {
    throw InvalidArgument("estoi: too short (" + std::to_string(frames) +
                          " frames of speech, need " + std::to_string(p.segment) + ")");
  }

  const auto bands = third_octave_bands(p);
  const auto w = analysis_window(n);
  dsp::RealFft fft(p.fft_size);
  std::vector<double> buf(n);
  std::vector<std::complex<double>> spec(p.fft_size / 2 + 1);
  const auto nb = static_cast<Eigen::Index>(bands.size());
  Eigen::MatrixXd xt(nb, static_cast<Eigen::Index>(frames));
  Eigen::MatrixXd yt(nb, static_cast<Eigen::Index>(frames));
  auto tob = [&](const std::vector<double>& s, Eigen::MatrixXd& out) {
    for (std::size_t f = 0; f < frames; ++f) {
      for (std::size_t i = 0; i < n; ++i) buf[i] = w[i] * s[f * hop + i];
      fft.forward(buf, spec);
      for (Eigen::Index k = 0; k < nb; ++k) {
        double e = 0.0;
        for (std::size_t j = bands[k].lo; j < bands[k].hi; ++j) e += std::norm(spec[j]);
        out(k, static_cast<Eigen::Index>(f)) = std::sqrt(e);
      }
    }
  };
  tob(x, xt);
  tob(y, yt);

  const auto seg = static_cast<Eigen::Index>(p.segment);
  const std::size_t segments = frames - p.segment + 1;
  double total = 0.0;
  for (std::size_t s = 0; s < segments; ++s) {
    Eigen::MatrixXd xs = xt.middleCols(static_cast<Eigen::Index>(s), seg);
    Eigen::MatrixXd ys = yt.middleCols(static_cast<Eigen::Index>(s), seg);
    normalise_rows(xs);
    normalise_rows(ys);
    Eigen::MatrixXd xc = xs.transpose(), yc = ys.transpose();
    normalise_rows(xc);
    normalise_rows(yc);
    total += (xc.array() * yc.array()).sum() / static_cast<double>(p.segment);
  }
  EstoiResult r;
  r.score = total / static_cast<double>(segments);
  r.frames = frames;
  r.segments = segments;
  return r;
}

double estoi(const dsp::AudioClip& reference, const dsp::AudioClip& degraded) {
  return estoi_detailed(reference, degraded).score;
}

double log_mel_distortion(const nn::Matrix<double>& reference, const nn::Matrix<double>& degraded) {
  if (reference.rows() != degraded.rows() || reference.cols() != degraded.cols()) {
    throw InvalidArgument("log_mel_distortion: shape mismatch");
  }
  if (reference.size() == 0) throw InvalidArgument("log_mel_distortion: empty input");
  const double rms = std::sqrt((reference - degraded).squaredNorm() /
                               static_cast<double>(reference.size()));
  return 10.0 / std::numbers::ln10 * std::numbers::sqrt2 * rms;
}

double log_mel_distortion(const dsp::MelSpectrogram& reference,
                          const dsp::MelSpectrogram& degraded) {
  return log_mel_distortion(nn::Matrix<double>(reference.frames), nn::Matrix<double>(degraded.frames));
}

}  // namespace sarlab::metrics
