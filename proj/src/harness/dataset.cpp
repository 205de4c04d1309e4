// harness/dataset.cpp

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

#include "sarlab/harness/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "sarlab/dsp/audio.hpp"
#include "sarlab/error.hpp"
#include "sarlab/nn/rng.hpp"

namespace sarlab::harness {

const ManifestEntry& Manifest::find(const std::string& id) const {
  auto it = std::lower_bound(entries.begin(), entries.end(), id,
                             [](const ManifestEntry& e, const std::string& v) { return e.id < v; });
  if (it == entries.end() || it->id != id) throw InvalidArgument("unknown utterance id '" + id + "'");
  return *it;
}

Manifest build_manifest(const std::filesystem::path& root) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw InvalidArgument("dataset root is not a directory: " + root.string());
  }
  Manifest m;
  m.name = root.filename().empty() ? root.parent_path().filename().string()
                                   : root.filename().string();
  for (auto it = fs::recursive_directory_iterator(root, fs::directory_options::skip_permission_denied, ec);
       it != fs::recursive_directory_iterator(); it.increment(ec)) {
    if (ec) break;
    if (!it->is_regular_file(ec)) continue;
    std::string ext = it->path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext != ".wav") continue;
    try {
      const auto info = dsp::read_wav_info(it->path());
      if (info.channels != 1) throw IoError("unsupported channel count");
      m.entries.push_back({it->path().stem().string(), it->path(), info.duration_seconds(),
                           info.sample_rate});
    } catch (const std::exception& e) {
      ++m.skipped;
      m.warnings.push_back("skipping " + it->path().string() + ": " + e.what());
    }
  }
  if (m.entries.empty()) {
    throw InvalidArgument("no readable WAV files under " + root.string());
  }
  std::sort(m.entries.begin(), m.entries.end(),
            [](const ManifestEntry& a, const ManifestEntry& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < m.entries.size(); ++i) {
    if (m.entries[i].id == m.entries[i - 1].id) {
      throw InvalidArgument("duplicate utterance id '" + m.entries[i].id + "'");
    }
  }
  return m;
}

SplitSpec split_dataset(const Manifest& manifest, std::uint64_t seed) {
  const std::size_t n = manifest.entries.size();
  if (n < 20) {
    throw InvalidArgument("split needs at least 20 utterances, found " + std::to_string(n));
  }
  std::vector<std::string> ids;
  for (const auto& e : manifest.entries) ids.push_back(e.id);
  nn::SeedableRng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.next_u64() % i)]);
  }
  // ceil(0.05 n) in integer arithmetic.
  const std::size_t held = (n + 19) / 20;
  SplitSpec s;
  s.seed = seed;
  s.test.assign(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(held));
  s.val.assign(ids.begin() + static_cast<std::ptrdiff_t>(held),
               ids.begin() + static_cast<std::ptrdiff_t>(2 * held));
  s.train.assign(ids.begin() + static_cast<std::ptrdiff_t>(2 * held), ids.end());
  return s;
}

}  // namespace sarlab::harness
