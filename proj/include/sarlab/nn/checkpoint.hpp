// sarlab/nn/checkpoint.hpp

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

// Tensor container: "SARCKPT1\n", a little-endian uint64 byte count, JSON
// metadata of that length, then every tensor as little-endian float32 in
// declaration order. The metadata lists tensor names and shapes under
// "tensors"; any other keys belong to the caller.

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sarlab/nn/tensor.hpp"

namespace sarlab::nn {

inline constexpr char kCheckpointMagic[] = "SARCKPT1\n";

struct NamedTensor {
  std::string name;
  FeatureMatrix value;
};

struct TensorFile {
  nlohmann::json metadata;  // includes "tensors"
  std::vector<NamedTensor> tensors;
};

void write_tensor_file(const std::string& path, nlohmann::json metadata,
                       const std::vector<NamedTensor>& tensors);

/// Throws IoError("corrupt checkpoint: ...") on a bad header, truncated
/// payload, or inconsistent tensor table.
TensorFile read_tensor_file(const std::string& path);

}  // namespace sarlab::nn
