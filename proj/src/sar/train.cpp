// sar/train.cpp

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

#include "sarlab/sar/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>

#include "sarlab/error.hpp"
#include "sarlab/nn/adam.hpp"
#include "sarlab/nn/loss.hpp"

namespace sarlab::sar {

void TrainConfig::validate() const {
  if (batch_size < 1) throw InvalidArgument("train config: batch_size must be >= 1");
  if (patience < 1) throw InvalidArgument("train config: patience must be >= 1");
  if (max_epochs < 1) throw InvalidArgument("train config: max_epochs must be >= 1");
  if (!(lr >= 0.0) || !std::isfinite(lr)) throw InvalidArgument("train config: bad lr");
  if (!(alpha_max >= 0.0 && alpha_max < 1.0)) {
    throw InvalidArgument("train config: alpha_max must be in [0, 1)");
  }
  if (!(clip_norm > 0.0)) throw InvalidArgument("train config: clip_norm must be > 0");
  if (max_frames < 0 || max_steps < 0) throw InvalidArgument("train config: negative limit");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = {{"batch_size", c.batch_size}, {"lr", c.lr},
       {"max_epochs", c.max_epochs}, {"patience", c.patience},
       {"seed", c.seed},             {"alpha_max", c.alpha_max},
       {"clip_norm", c.clip_norm},   {"max_frames", c.max_frames},
       {"max_steps", c.max_steps}};
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  if (!j.is_object()) throw InvalidArgument("train config must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    try {
      if (k == "batch_size") c.batch_size = it->get<int>();
      else if (k == "lr") c.lr = it->get<double>();
      else if (k == "max_epochs") c.max_epochs = it->get<int>();
      else if (k == "patience") c.patience = it->get<int>();
      else if (k == "seed") c.seed = it->get<std::uint64_t>();
      else if (k == "alpha_max") c.alpha_max = it->get<double>();
      else if (k == "clip_norm") c.clip_norm = it->get<double>();
      else if (k == "max_frames") c.max_frames = it->get<int>();
      else if (k == "max_steps") c.max_steps = it->get<long long>();
      else throw InvalidArgument("train config: unknown key '" + k + "'");
    } catch (const nlohmann::json::exception&) {
      throw InvalidArgument("train config: bad value for '" + k + "'");
    }
  }
}

namespace {

// Fisher-Yates with our own generator so orderings do not depend on the
// standard library's shuffle.
void shuffle(std::vector<std::size_t>& v, nn::SeedableRng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.next_u64() % i);
    std::swap(v[i - 1], v[j]);
  }
}

struct Crop {
  std::size_t index;
  Eigen::Index start;
  Eigen::Index length;
};

// Batches of similar length: shuffle, sort within pools of 16 batches,
// cut, then shuffle the batch order.
std::vector<std::vector<std::size_t>> make_batches(const std::vector<Eigen::Index>& lengths,
                                                   std::size_t batch, nn::SeedableRng& rng) {
  std::vector<std::size_t> order(lengths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order, rng);
  const std::size_t pool = batch * 16;
  for (std::size_t p = 0; p < order.size(); p += pool) {
    auto first = order.begin() + static_cast<std::ptrdiff_t>(p);
    auto last = order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), p + pool));
    std::stable_sort(first, last,
                     [&](std::size_t a, std::size_t b) { return lengths[a] < lengths[b]; });
  }
  std::vector<std::vector<std::size_t>> batches;
  for (std::size_t p = 0; p < order.size(); p += batch) {
    batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(p),
                         order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), p + batch)));
  }
  std::vector<std::size_t> perm(batches.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  shuffle(perm, rng);
  std::vector<std::vector<std::size_t>> out;
  out.reserve(batches.size());
  for (auto i : perm) out.push_back(std::move(batches[i]));
  return out;
}

void check_set(const std::vector<FeatureMatrix>& set, int n_mels, const char* what) {
  if (set.empty()) throw InvalidArgument(std::string("train: empty ") + what + " set");
  for (const auto& m : set) {
    if (m.rows() == 0) throw InvalidArgument(std::string("train: empty sequence in ") + what);
    if (m.cols() != n_mels) {
      throw InvalidArgument(std::string("train: ") + what + " features have " +
                            std::to_string(m.cols()) + " bins, expected " + std::to_string(n_mels));
    }
  }
}

}  // namespace

double evaluate_loss(const SarModel& model, const std::vector<FeatureMatrix>& set) {
  double sum = 0.0, count = 0.0;
  for (const auto& m : set) {
    const double n = static_cast<double>(m.size());
    sum += reconstruction_loss(decode(encode(m, model), model), m) * n;
    count += n;
  }
  if (count == 0.0) throw InvalidArgument("evaluate_loss: empty set");
  return sum / count;
}

TrainResult train_autoencoder(const std::vector<FeatureMatrix>& train_set,
                              const std::vector<FeatureMatrix>& val_set, const TrainConfig& cfg,
                              const SarConfig& sar_cfg, const EpochCallback& on_epoch) {
  cfg.validate();
  SarConfig model_cfg = sar_cfg;
  model_cfg.alpha_max = cfg.alpha_max;
  model_cfg.validate();
  check_set(train_set, model_cfg.n_mels, "training");
  check_set(val_set, model_cfg.n_mels, "validation");

  SarModel current = SarModel::initialise(model_cfg, cfg.seed);
  current.norm = compute_norm(train_set);
  const nn::SeedableRng root(cfg.seed);
  nn::SeedableRng order_rng = root.split(1);
  nn::SeedableRng mask_rng = root.split(2);
  nn::SeedableRng crop_rng = root.split(3);

  SarParams<float> grads = zeros_like(current.params);
  auto refs = param_refs(current.params, grads);
  auto adam = nn::make_adam_state(refs, nn::AdamConfig{cfg.lr});
  SarGraph<float> graph(current.params, grads, current.norm);

  std::vector<Eigen::Index> lengths;
  for (const auto& m : train_set) lengths.push_back(m.rows());
  const Eigen::Index latent = model_cfg.latent_dim;
  const Eigen::Index n_mels = model_cfg.n_mels;

  TrainResult result;
  result.model = current;
  TrainingHistory& hist = result.history;
  hist.best_val_loss = std::numeric_limits<double>::infinity();
  int since_best = 0;
  bool out_of_steps = false;

  for (int epoch = 1; epoch <= cfg.max_epochs && !out_of_steps; ++epoch) {
    double loss_sum = 0.0, frame_sum = 0.0;
    for (const auto& batch : make_batches(lengths, static_cast<std::size_t>(cfg.batch_size),
                                          order_rng)) {
      if (cfg.max_steps > 0 && hist.steps >= cfg.max_steps) {
        out_of_steps = true;
        break;
      }
      std::vector<Crop> crops;
      Eigen::Index steps = 0;
      for (auto idx : batch) {
        Crop c{idx, 0, lengths[idx]};
        if (cfg.max_frames > 0 && c.length > cfg.max_frames) {
          const auto span = static_cast<std::uint64_t>(c.length - cfg.max_frames + 1);
          c.start = static_cast<Eigen::Index>(crop_rng.next_u64() % span);
          c.length = cfg.max_frames;
        }
        steps = std::max(steps, c.length);
        crops.push_back(c);
      }
      const auto B = static_cast<Eigen::Index>(crops.size());
      nn::BatchLayout layout{static_cast<std::size_t>(steps), static_cast<std::size_t>(B),
                             std::vector<std::uint8_t>(static_cast<std::size_t>(steps * B), 0)};
      FeatureMatrix x = FeatureMatrix::Zero(steps * B, n_mels);
      for (Eigen::Index b = 0; b < B; ++b) {
        const auto& src = train_set[crops[b].index];
        for (Eigen::Index t = 0; t < crops[b].length; ++t) {
          x.row(t * B + b) = src.row(crops[b].start + t);
          layout.valid[static_cast<std::size_t>(t * B + b)] = 1;
        }
      }

      if (cfg.alpha_max > 0.0) {
        std::vector<double> alpha(static_cast<std::size_t>(B));
        for (auto& a : alpha) a = sample_mask_ratio(mask_rng, cfg.alpha_max);
        FeatureMatrix mask(steps * B, latent);
        for (Eigen::Index r = 0; r < mask.rows(); ++r) {
          const double a = alpha[static_cast<std::size_t>(r % B)];
          const float keep = static_cast<float>(1.0 / (1.0 - a));
          for (Eigen::Index c = 0; c < latent; ++c) {
            mask(r, c) = mask_rng.uniform() < a ? 0.0f : keep;
          }
        }
        graph.set_mask(std::move(mask));
      }

      nn::zero_grads(refs);
      FeatureMatrix y = graph.forward(x, layout);
      FeatureMatrix dy;
      const double loss = nn::masked_mse(y, x, layout, &dy);
      if (!std::isfinite(loss)) {
        throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch) +
                             ", step " + std::to_string(hist.steps + 1));
      }
      graph.backward(dy);
      nn::clip_grad_norm(refs, cfg.clip_norm);
      if (nn::adam_step(refs, adam) == nn::StepStatus::kSkippedNonFinite) ++hist.skipped_steps;
      ++hist.steps;
      const double frames = static_cast<double>(layout.valid_rows());
      loss_sum += loss * frames;
      frame_sum += frames;
    }
    if (frame_sum == 0.0) break;

    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = loss_sum / frame_sum;
    rec.val_loss = evaluate_loss(current, val_set);
    rec.alpha_max = cfg.alpha_max;
    rec.seed = cfg.seed;
    if (!std::isfinite(rec.val_loss)) {
      throw NumericalError("non-finite validation loss at epoch " + std::to_string(epoch));
    }
    hist.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);

    if (rec.val_loss < hist.best_val_loss) {
      hist.best_val_loss = rec.val_loss;
      hist.best_epoch = epoch;
      result.model.params = current.params;
      result.model.norm = current.norm;
      result.model.config = current.config;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return result;
}

std::string history_csv(const TrainingHistory& history) {
  std::string out = "epoch,train_loss,val_loss,alpha_max,seed\n";
  char buf[160];
  for (const auto& e : history.epochs) {
    std::snprintf(buf, sizeof(buf), "%d,%.9g,%.9g,%.9g,%llu\n", e.epoch, e.train_loss, e.val_loss,
                  e.alpha_max, static_cast<unsigned long long>(e.seed));
    out += buf;
  }
  return out;
}

void write_history_csv(const TrainingHistory& history, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << history_csv(history);
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace sarlab::sar
