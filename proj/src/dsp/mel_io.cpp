// dsp/mel_io.cpp

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

#include "sarlab/dsp/mel_io.hpp"

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sarlab/error.hpp"

namespace sarlab::dsp {

void write_mel(const MelSpectrogram& mel, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write feature file: " + path.string());
  out << "SARMEL1 " << mel.num_frames() << ' ' << mel.num_mels() << ' ' << mel.sample_rate << ' '
      << mel.hop << '\n';
  std::vector<float> row(mel.num_mels());
  for (Eigen::Index t = 0; t < mel.frames.rows(); ++t) {
    for (Eigen::Index k = 0; k < mel.frames.cols(); ++k) {
      row[static_cast<std::size_t>(k)] = static_cast<float>(mel.frames(t, k));
    }
    out.write(reinterpret_cast<const char*>(row.data()),
              static_cast<std::streamsize>(row.size() * sizeof(float)));
  }
  if (!out) throw IoError("failed writing feature file: " + path.string());
}

MelSpectrogram read_mel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open feature file: " + path.string());
  std::string header;
  std::getline(in, header);
  std::istringstream fields(header);
  std::string magic;
  long long frames = -1;
  long long mels = -1;
  long long rate = -1;
  long long hop = -1;
  fields >> magic >> frames >> mels >> rate >> hop;
  if (magic != "SARMEL1" || fields.fail() || frames < 0 || mels <= 0 || rate <= 0 || hop <= 0) {
    throw IoError("corrupt feature header in " + path.string());
  }
  MelSpectrogram mel;
  mel.sample_rate = static_cast<int>(rate);
  mel.hop = static_cast<std::size_t>(hop);
  mel.frames.resize(frames, mels);
  std::vector<float> row(static_cast<std::size_t>(mels));
  for (long long t = 0; t < frames; ++t) {
    in.read(reinterpret_cast<char*>(row.data()),
            static_cast<std::streamsize>(row.size() * sizeof(float)));
    if (!in) throw IoError("truncated feature file: " + path.string());
    for (long long k = 0; k < mels; ++k) mel.frames(t, k) = row[static_cast<std::size_t>(k)];
  }
  return mel;
}

bool is_mel_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  char magic[8] = {};
  in.read(magic, 8);
  return in.gcount() == 8 && std::memcmp(magic, "SARMEL1 ", 8) == 0;
}

}  // namespace sarlab::dsp
