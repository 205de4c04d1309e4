// sar/checkpoint.cpp

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

#include "sarlab/sar/checkpoint.hpp"

#include "sarlab/error.hpp"
#include "sarlab/nn/checkpoint.hpp"

namespace sarlab::sar {

namespace {

constexpr const char* kModelKind = "sarlab.sar";

std::vector<nn::NamedTensor> flatten(const SarModel& model) {
  std::vector<nn::NamedTensor> out;
  out.push_back({"norm.mean", model.norm.mean});
  out.push_back({"norm.stddev", model.norm.stddev});
  model.params.visit(
      [&](const std::string& name, const FeatureMatrix& m) { out.push_back({name, m}); });
  return out;
}

std::string shape_str(Eigen::Index r, Eigen::Index c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

// Copies stored tensors into a model built from `cfg`, checking names and
// shapes tensor by tensor.
SarModel assemble(const nn::TensorFile& file, const SarConfig& cfg, const std::string& path) {
  SarModel model = SarModel::initialise(cfg, 0);
  std::vector<std::pair<std::string, FeatureMatrix*>> slots;
  slots.emplace_back("norm.mean", &model.norm.mean);
  slots.emplace_back("norm.stddev", &model.norm.stddev);
  model.params.visit(
      [&](const std::string& name, FeatureMatrix& m) { slots.emplace_back(name, &m); });
  if (file.tensors.size() != slots.size()) {
    throw InvalidArgument("checkpoint " + path + ": expected " + std::to_string(slots.size()) +
                          " tensors, found " + std::to_string(file.tensors.size()));
  }
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const auto& stored = file.tensors[i];
    auto& [name, dst] = slots[i];
    if (stored.name != name) {
      throw InvalidArgument("checkpoint " + path + ": tensor " + std::to_string(i) + " is '" +
                            stored.name + "', expected '" + name + "'");
    }
    if (stored.value.rows() != dst->rows() || stored.value.cols() != dst->cols()) {
      throw InvalidArgument("checkpoint " + path + ": tensor '" + name + "' has shape " +
                            shape_str(stored.value.rows(), stored.value.cols()) +
                            ", config requires " + shape_str(dst->rows(), dst->cols()));
    }
    *dst = stored.value;
  }
  return model;
}

SarModel load_impl(const std::string& path, const SarConfig* expected, CheckpointInfo* info) {
  nn::TensorFile file = nn::read_tensor_file(path);
  const auto& meta = file.metadata;
  if (!meta.contains("kind") || meta["kind"] != kModelKind || !meta.contains("config")) {
    throw IoError("corrupt checkpoint: " + path + ": not a model checkpoint");
  }
  SarConfig stored;
  try {
    stored = meta["config"].get<SarConfig>();
    stored.validate();
  } catch (const InvalidArgument& e) {
    throw IoError("corrupt checkpoint: " + path + ": " + e.what());
  }
  SarModel model = assemble(file, expected ? *expected : stored, path);
  model.config = stored;
  if (info) {
    info->training = meta.value("training", nlohmann::json::object());
    info->seed = meta.value("seed", std::uint64_t{0});
    info->step = meta.value("step", 0LL);
  }
  return model;
}

}  // namespace

void save_checkpoint(const SarModel& model, const std::string& path, const CheckpointInfo& info) {
  nlohmann::json meta = {{"kind", kModelKind},
                         {"config", model.config},
                         {"training", info.training.is_null() ? nlohmann::json::object()
                                                              : info.training},
                         {"seed", info.seed},
                         {"step", info.step}};
  nn::write_tensor_file(path, meta, flatten(model));
}

SarModel load_checkpoint(const std::string& path, CheckpointInfo* info) {
  return load_impl(path, nullptr, info);
}

SarModel load_checkpoint(const std::string& path, const SarConfig& expected,
                         CheckpointInfo* info) {
  return load_impl(path, &expected, info);
}

}  // namespace sarlab::sar
