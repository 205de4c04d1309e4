// nn/checkpoint.cpp

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

#include "sarlab/nn/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sarlab/error.hpp"

namespace sarlab::nn {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

namespace {

[[noreturn]] void corrupt(const std::string& path, const std::string& why) {
  throw IoError("corrupt checkpoint: " + path + ": " + why);
}

}  // namespace

void write_tensor_file(const std::string& path, nlohmann::json metadata,
                       const std::vector<NamedTensor>& tensors) {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& t : tensors) {
    table.push_back({{"name", t.name}, {"shape", {t.value.rows(), t.value.cols()}}});
  }
  metadata["tensors"] = table;
  const std::string meta = metadata.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(kCheckpointMagic, sizeof(kCheckpointMagic) - 1);
  const std::uint64_t len = meta.size();
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(meta.data(), static_cast<std::streamsize>(meta.size()));
  for (const auto& t : tensors) {
    out.write(reinterpret_cast<const char*>(t.value.data()),
              static_cast<std::streamsize>(t.value.size() * sizeof(float)));
  }
  if (!out) throw IoError("write failed: " + path);
}

TensorFile read_tensor_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const std::size_t magic_len = sizeof(kCheckpointMagic) - 1;
  if (bytes.size() < magic_len + 8 || bytes.compare(0, magic_len, kCheckpointMagic) != 0) {
    corrupt(path, "bad header");
  }
  std::uint64_t len = 0;
  std::memcpy(&len, bytes.data() + magic_len, sizeof(len));
  std::size_t pos = magic_len + 8;
  if (len > bytes.size() - pos) corrupt(path, "truncated metadata");

  TensorFile file;
  try {
    file.metadata = nlohmann::json::parse(bytes.substr(pos, len));
  } catch (const nlohmann::json::exception& e) {
    corrupt(path, std::string("metadata: ") + e.what());
  }
  pos += len;
  if (!file.metadata.contains("tensors") || !file.metadata["tensors"].is_array()) {
    corrupt(path, "missing tensor table");
  }
  for (const auto& entry : file.metadata["tensors"]) {
    NamedTensor t;
    std::int64_t rows = 0, cols = 0;
    try {
      t.name = entry.at("name").get<std::string>();
      rows = entry.at("shape").at(0).get<std::int64_t>();
      cols = entry.at("shape").at(1).get<std::int64_t>();
    } catch (const nlohmann::json::exception&) {
      corrupt(path, "malformed tensor entry");
    }
    if (rows < 0 || cols < 0) corrupt(path, "negative shape for " + t.name);
    const std::size_t n = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (n * sizeof(float) > bytes.size() - pos) corrupt(path, "truncated tensor " + t.name);
    t.value.resize(rows, cols);
    std::memcpy(t.value.data(), bytes.data() + pos, n * sizeof(float));
    pos += n * sizeof(float);
    file.tensors.push_back(std::move(t));
  }
  if (pos != bytes.size()) corrupt(path, "trailing bytes");
  return file;
}

}  // namespace sarlab::nn
