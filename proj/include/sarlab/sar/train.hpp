// sarlab/sar/train.hpp

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
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarlab/sar/model.hpp"

namespace sarlab::sar {

struct TrainConfig {
  int batch_size = 64;
  double lr = 1e-4;
  int max_epochs = 200;
  int patience = 10;
  std::uint64_t seed = 1337;
  double alpha_max = 0.2;
  double clip_norm = 1.0;
  /// Training sequences longer than this are cropped to a random window each
  /// step (0 disables cropping). Validation always uses full sequences.
  int max_frames = 0;
  /// Stop after this many optimisation steps in total (0 = unlimited).
  long long max_steps = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
void from_json(const nlohmann::json& j, TrainConfig& c);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double alpha_max = 0.0;
  std::uint64_t seed = 0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  long long steps = 0;
  int skipped_steps = 0;
};

struct TrainResult {
  SarModel model;  // parameters from the epoch with the lowest validation loss
  TrainingHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Adam on the masked reconstruction loss with early stopping on the
/// unmasked validation loss. Throws NumericalError on a non-finite loss.
TrainResult train_autoencoder(const std::vector<FeatureMatrix>& train_set,
                              const std::vector<FeatureMatrix>& val_set, const TrainConfig& cfg,
                              const SarConfig& sar_cfg, const EpochCallback& on_epoch = {});

/// Mean reconstruction loss over a set, weighting every frame equally.
double evaluate_loss(const SarModel& model, const std::vector<FeatureMatrix>& set);

/// Header "epoch,train_loss,val_loss,alpha_max,seed"; floats with %.9g.
void write_history_csv(const TrainingHistory& history, const std::string& path);
std::string history_csv(const TrainingHistory& history);

}  // namespace sarlab::sar
