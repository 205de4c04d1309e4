// sarlab/harness/dataset.hpp

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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace sarlab::harness {

struct ManifestEntry {
  std::string id;  // file stem
  std::filesystem::path path;
  double duration = 0.0;  // seconds, from the header
  int sample_rate = 0;
};

struct Manifest {
  std::string name;
  std::vector<ManifestEntry> entries;  // sorted by id
  std::size_t skipped = 0;             // unreadable files
  std::vector<std::string> warnings;

  const ManifestEntry& find(const std::string& id) const;
};

/// Recursive scan for *.wav (any case). Unreadable files are skipped and
/// counted. Throws InvalidArgument for a missing directory, no readable
/// files, or duplicate stems.
Manifest build_manifest(const std::filesystem::path& root);

struct SplitSpec {
  std::vector<std::string> train;
  std::vector<std::string> val;
  std::vector<std::string> test;
  std::uint64_t seed = 0;
};

/// Seeded shuffle, then test = first ceil(5%), val = next ceil(5%), train =
/// the rest. Each list keeps the shuffled order. Needs >= 20 entries.
SplitSpec split_dataset(const Manifest& manifest, std::uint64_t seed);

}  // namespace sarlab::harness
