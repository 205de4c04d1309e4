// sarlab/dsp/mel_io.hpp

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

#include <filesystem>

#include "sarlab/dsp/mel.hpp"

namespace sarlab::dsp {

// Feature file layout:
//   "SARMEL1 <T> <n_mels> <sample_rate> <hop>\n"
//   T * n_mels little-endian float32, row-major.
void write_mel(const MelSpectrogram& mel, const std::filesystem::path& path);
MelSpectrogram read_mel(const std::filesystem::path& path);

/// True when the file begins with the SARMEL1 magic.
bool is_mel_file(const std::filesystem::path& path);

}  // namespace sarlab::dsp
