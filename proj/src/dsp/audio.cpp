// dsp/audio.cpp

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

#include "sarlab/dsp/audio.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "sarlab/error.hpp"

namespace sarlab::dsp {
namespace {

static_assert(std::endian::native == std::endian::little,
              "WAV I/O assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct ParsedWav {
  WavInfo info;
  std::uint16_t format = 0;
  std::size_t data_offset = 0;
  std::size_t data_bytes = 0;
};

template <typename T>
T load_le(const std::vector<char>& buf, std::size_t pos) {
  T v;
  std::memcpy(&v, buf.data() + pos, sizeof(T));
  return v;
}

std::vector<char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

ParsedWav parse(const std::vector<char>& buf, const std::filesystem::path& path) {
  const std::string where = " (" + path.string() + ")";
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
    throw IoError("not a RIFF/WAVE file" + where);
  }
  ParsedWav out;
  bool have_fmt = false;
  bool have_data = false;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id(buf.data() + pos, 4);
    const std::size_t size = load_le<std::uint32_t>(buf, pos + 4);
    const std::size_t body = pos + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > buf.size()) throw IoError("truncated fmt chunk" + where);
      out.format = load_le<std::uint16_t>(buf, body);
      out.info.channels = load_le<std::uint16_t>(buf, body + 2);
      out.info.sample_rate = static_cast<int>(load_le<std::uint32_t>(buf, body + 4));
      out.info.bits_per_sample = load_le<std::uint16_t>(buf, body + 14);
      if (out.format == kFormatExtensible && size >= 40 && body + 26 <= buf.size()) {
        // First two bytes of the subformat GUID carry the real format tag.
        out.format = load_le<std::uint16_t>(buf, body + 24);
      }
      have_fmt = true;
    } else if (id == "data") {
      out.data_offset = body;
      out.data_bytes = std::min(size, buf.size() - body);
      have_data = true;
      break;
    }
    pos = body + size + (size & 1U);
  }
  if (!have_fmt) throw IoError("missing fmt chunk" + where);
  if (!have_data) throw IoError("missing data chunk" + where);
  if (out.info.sample_rate <= 0) throw IoError("invalid sample rate" + where);
  const int bytes = out.info.bits_per_sample / 8;
  if (bytes > 0 && out.info.channels > 0) {
    out.info.num_frames = out.data_bytes / (static_cast<std::size_t>(bytes) * out.info.channels);
  }
  return out;
}

void write_raw(const std::filesystem::path& path, std::uint16_t format, std::uint16_t bits,
               int sample_rate, const std::vector<char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write WAV file: " + path.string());
  auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  auto put16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  const std::uint16_t block = bits / 8;
  out.write("RIFF", 4);
  put32(static_cast<std::uint32_t>(36 + payload.size()));
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put32(16);
  put16(format);
  put16(1);
  put32(static_cast<std::uint32_t>(sample_rate));
  put32(static_cast<std::uint32_t>(sample_rate) * block);
  put16(block);
  put16(bits);
  out.write("data", 4);
  put32(static_cast<std::uint32_t>(payload.size()));
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("failed writing WAV file: " + path.string());
}

}  // namespace

WavInfo read_wav_info(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  return parse(slurp(path), path).info;
}

AudioClip read_wav(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError("no such file: " + path.string());
  const auto buf = slurp(path);
  const ParsedWav wav = parse(buf, path);
  if (wav.info.channels != 1) {
    throw InvalidArgument("unsupported channel count " + std::to_string(wav.info.channels) +
                          " in " + path.string() + " (mono only)");
  }
  const bool pcm16 = wav.format == kFormatPcm && wav.info.bits_per_sample == 16;
  const bool float32 = wav.format == kFormatFloat && wav.info.bits_per_sample == 32;
  if (!pcm16 && !float32) {
    throw InvalidArgument("unsupported encoding (format " + std::to_string(wav.format) + ", " +
                          std::to_string(wav.info.bits_per_sample) + " bits) in " +
                          path.string());
  }
  if (wav.info.num_frames == 0) throw IoError("empty data chunk in " + path.string());

  AudioClip clip;
  clip.sample_rate = wav.info.sample_rate;
  clip.samples.resize(wav.info.num_frames);
  for (std::size_t i = 0; i < wav.info.num_frames; ++i) {
    if (pcm16) {
      const auto v = load_le<std::int16_t>(buf, wav.data_offset + 2 * i);
      clip.samples[i] = static_cast<double>(v) / 32768.0;
    } else {
      const auto v = load_le<float>(buf, wav.data_offset + 4 * i);
      if (!std::isfinite(v)) throw IoError("non-finite sample in " + path.string());
      clip.samples[i] = std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::filesystem::path& path) {
  if (clip.empty()) throw InvalidArgument("cannot write an empty clip");
  if (clip.sample_rate <= 0) throw InvalidArgument("sample rate must be positive");
  std::vector<char> payload(clip.size() * 2);
  for (std::size_t i = 0; i < clip.size(); ++i) {
    const double x = std::isfinite(clip.samples[i]) ? clip.samples[i] : 0.0;
    const double q = std::clamp(std::round(std::clamp(x, -1.0, 1.0) * 32768.0), -32768.0, 32767.0);
    const auto v = static_cast<std::int16_t>(q);
    std::memcpy(payload.data() + 2 * i, &v, 2);
  }
  write_raw(path, kFormatPcm, 16, clip.sample_rate, payload);
}

void write_wav_float(const AudioClip& clip, const std::filesystem::path& path) {
  if (clip.empty()) throw InvalidArgument("cannot write an empty clip");
  std::vector<char> payload(clip.size() * 4);
  for (std::size_t i = 0; i < clip.size(); ++i) {
    const auto v = static_cast<float>(clip.samples[i]);
    std::memcpy(payload.data() + 4 * i, &v, 4);
  }
  write_raw(path, kFormatFloat, 32, clip.sample_rate, payload);
}

}  // namespace sarlab::dsp
