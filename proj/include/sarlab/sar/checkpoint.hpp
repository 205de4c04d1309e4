// sarlab/sar/checkpoint.hpp

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

#include <string>

#include <json.hpp>

#include "sarlab/sar/model.hpp"

namespace sarlab::sar {

struct CheckpointInfo {
  nlohmann::json training;  // hyperparameters recorded at save time
  std::uint64_t seed = 0;
  long long step = 0;
};

void save_checkpoint(const SarModel& model, const std::string& path,
                     const CheckpointInfo& info = {});

/// Restores a model. Throws IoError("corrupt checkpoint ...") for damaged
/// files and InvalidArgument naming the tensor when stored shapes disagree
/// with the stored configuration.
SarModel load_checkpoint(const std::string& path, CheckpointInfo* info = nullptr);

/// As above, but additionally requires the stored tensors to fit `expected`.
SarModel load_checkpoint(const std::string& path, const SarConfig& expected,
                         CheckpointInfo* info = nullptr);

}  // namespace sarlab::sar
