// tests/unit/test_sar.cpp

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

#include <algorithm>
#include <cstring>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <doctest.h>

#include "gradcheck.hpp"
#include "sarlab/dsp/audio.hpp"
#include "sarlab/dsp/mel.hpp"
#include "sarlab/error.hpp"
#include "sarlab/nn/loss.hpp"
#include "sarlab/sar/checkpoint.hpp"
#include "sarlab/sar/model.hpp"
#include "sarlab/sar/train.hpp"
#include "test_support.hpp"

using namespace sarlab;
using namespace sarlab::sar;
using nn::SeedableRng;
using sarlab::testing::DMat;
using sarlab::testing::random_matrix;

namespace {

SarConfig tiny_config() {
  SarConfig c;
  c.n_mels = 6;
  c.fc_hidden = 5;
  c.blstm_hidden = 3;
  c.latent_dim = 4;
  c.dec_hidden = 5;
  return c;
}

FeatureMatrix random_features(Eigen::Index rows, Eigen::Index cols, SeedableRng& rng,
                              double scale = 1.0, double offset = 0.0) {
  FeatureMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    m.data()[i] = static_cast<float>(offset + scale * rng.normal());
  }
  return m;
}

const FeatureMatrix& speech_mel() {
  static const FeatureMatrix mel = [] {
    auto clip = dsp::read_wav(std::string(SARLAB_TEST_DATA_DIR) + "/arctic_a0007.wav");
    return to_features(dsp::mel_spectrogram(clip));
  }();
  return mel;
}

}  // namespace

TEST_SUITE("sar") {

TEST_CASE("mask ratio sampler") {
  SeedableRng rng(1);
  for (int i = 0; i < 100; ++i) CHECK(sample_mask_ratio(rng, 0.0) == 0.0);

  std::vector<double> draws(10000);
  for (auto& d : draws) d = sample_mask_ratio(rng, 0.2);
  const double mean = std::accumulate(draws.begin(), draws.end(), 0.0) / draws.size();
  CHECK(std::abs(mean - 0.1) < 0.005);
  std::sort(draws.begin(), draws.end());
  double ks = 0.0;
  const double n = static_cast<double>(draws.size());
  for (std::size_t i = 0; i < draws.size(); ++i) {
    CHECK((draws[i] >= 0.0 && draws[i] < 0.2));
    const double cdf = draws[i] / 0.2;
    ks = std::max({ks, (i + 1) / n - cdf, cdf - i / n});
  }
  // Asymptotic 1% critical value of the one-sample KS statistic.
  CHECK(ks < 1.628 / std::sqrt(n));

  SeedableRng a(9), b(9);
  for (int i = 0; i < 50; ++i) CHECK(sample_mask_ratio(a, 0.2) == sample_mask_ratio(b, 0.2));
  CHECK_THROWS_AS(sample_mask_ratio(a, 1.0), InvalidArgument);
  CHECK_THROWS_AS(sample_mask_ratio(a, -0.1), InvalidArgument);
}

TEST_CASE("encoder is bounded, shaped and deterministic") {
  auto model = SarModel::initialise(SarConfig{}, 5);
  SeedableRng rng(2);
  FeatureMatrix mel = random_features(12, 80, rng, 30.0);
  FeatureMatrix z = encode(mel, model);
  CHECK(z.rows() == 12);
  CHECK(z.cols() == 256);
  CHECK(z.cwiseAbs().maxCoeff() < 1.0f);
  CHECK(encode(mel, model) == z);
  CHECK_THROWS_AS(encode(FeatureMatrix(FeatureMatrix::Zero(3, 79)), model), InvalidArgument);
  CHECK_THROWS_AS(encode(FeatureMatrix(0, 80), model), InvalidArgument);
}

TEST_CASE("latent mask contract") {
  SeedableRng rng(3);
  FeatureMatrix z = random_features(100, 100, rng, 0.3);
  SeedableRng m(4);
  CHECK(apply_mask(z, 0.0, m, MaskMode::kTrain) == z);
  for (double a : {0.0, 0.1, 0.5, 0.9}) CHECK(apply_mask(z, a, m, MaskMode::kInference) == z);

  FeatureMatrix out = apply_mask(z, 0.5, m, MaskMode::kTrain);
  std::size_t zeros = 0;
  bool scaled = true;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (out.data()[i] == 0.0f) {
      ++zeros;
    } else {
      scaled &= out.data()[i] == z.data()[i] * 2.0f;
    }
  }
  CHECK(std::abs(zeros / 10000.0 - 0.5) <= 0.02);
  CHECK(scaled);
  CHECK_THROWS_AS(apply_mask(z, 1.0, m, MaskMode::kTrain), InvalidArgument);
  CHECK_THROWS_AS(apply_mask(z, -0.5, m, MaskMode::kInference), InvalidArgument);
}

TEST_CASE("decoder is frame local") {
  auto model = SarModel::initialise(SarConfig{}, 6);
  SeedableRng rng(7);
  FeatureMatrix z = random_features(9, 256, rng, 0.5);
  FeatureMatrix y = decode(z, model);
  CHECK(y.rows() == 9);
  CHECK(y.cols() == 80);

  std::vector<Eigen::Index> perm(9);
  std::iota(perm.begin(), perm.end(), 0);
  std::reverse(perm.begin(), perm.end());
  std::swap(perm[0], perm[4]);
  FeatureMatrix zp(9, 256);
  for (Eigen::Index t = 0; t < 9; ++t) zp.row(t) = z.row(perm[t]);
  FeatureMatrix yp = decode(zp, model);
  for (Eigen::Index t = 0; t < 9; ++t) CHECK(yp.row(t) == y.row(perm[t]));

  FeatureMatrix zero = FeatureMatrix::Zero(4, 256);
  FeatureMatrix c = decode(zero, model);
  for (Eigen::Index t = 1; t < 4; ++t) CHECK(c.row(t) == c.row(0));
  CHECK_THROWS_AS(decode(FeatureMatrix(FeatureMatrix::Zero(2, 255)), model), InvalidArgument);
}

TEST_CASE("reconstruction loss") {
  SeedableRng rng(8);
  FeatureMatrix a = random_features(2, 3, rng), b = random_features(2, 3, rng);
  CHECK(reconstruction_loss(a, a) == 0.0);
  FeatureMatrix shifted = a.array() + 2.0f;
  CHECK(reconstruction_loss(shifted, a) == doctest::Approx(4.0).epsilon(1e-6));
  double direct = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double d = static_cast<double>(a(r, c)) - b(r, c);
      direct += d * d;
    }
  }
  CHECK(reconstruction_loss(a, b) == doctest::Approx(direct / 6.0).epsilon(1e-12));
  CHECK_THROWS_AS(reconstruction_loss(a, FeatureMatrix(FeatureMatrix::Zero(3, 2))),
                  InvalidArgument);
}

TEST_CASE("end-to-end gradcheck through encode, fixed mask and decode") {
  const SarConfig cfg = tiny_config();
  SeedableRng rng(10);
  auto params = init_sar_params<double>(cfg, rng);
  params.visit([&](const std::string& name, DMat& m) {
    if (name.find("bias") != std::string::npos) m = random_matrix(m.rows(), m.cols(), rng, 0.2);
  });
  auto grads = zeros_like(params);
  FeatureNorm<double> norm{random_matrix(1, 6, rng), random_matrix(1, 6, rng).cwiseAbs()};
  norm.stddev.array() += 0.5;
  DMat x = random_matrix(3, 6, rng, 2.0);
  DMat target = random_matrix(3, 6, rng, 2.0);
  DMat mask = DMat::Constant(3, 4, 1.0 / 0.8);
  mask(0, 2) = 0.0;
  mask(2, 0) = 0.0;
  const auto layout = nn::BatchLayout::single(3);

  SarGraph<double> graph(params, grads, norm);
  graph.set_mask(mask);
  DMat y = graph.forward(x, layout);
  DMat dy;
  nn::mse_with_grad(y, target, dy);
  graph.backward(dy);

  auto loss = [&] {
    auto scratch = zeros_like(params);
    SarGraph<double> g(params, scratch, norm);
    g.set_mask(mask);
    return nn::mse(g.forward(x, layout), target);
  };
  auto rep = sarlab::testing::gradcheck(param_refs(params, grads), loss);
  INFO(rep.worst);
  CHECK(rep.checked > 200);
  CHECK(rep.max_rel_error < 1e-4);
}

TEST_CASE("graph forward matches free-function inference") {
  SarModel model = SarModel::initialise(tiny_config(), 11);
  SeedableRng rng(12);
  FeatureMatrix mel = random_features(5, 6, rng, 1.0, -3.0);
  model.norm = compute_norm({mel});
  auto grads = zeros_like(model.params);
  SarGraph<float> graph(model.params, grads, model.norm);
  FeatureMatrix y = graph.forward(mel, nn::BatchLayout::single(5));
  FeatureMatrix ref = decode(encode(mel, model), model);
  CHECK((y - ref).cwiseAbs().maxCoeff() < 1e-5f);
}

TEST_CASE("overfitting one short utterance") {
  const FeatureMatrix mel = speech_mel().middleRows(60, 10);
  TrainConfig cfg;
  cfg.batch_size = 1;
  cfg.lr = 1e-3;
  cfg.alpha_max = 0.0;
  cfg.max_epochs = 2000;
  cfg.patience = 2000;
  cfg.max_steps = 2000;
  auto result = train_autoencoder({mel}, {mel}, cfg, SarConfig{});
  CHECK(result.history.steps == 2000);
  CHECK(result.history.epochs.size() == 2000);
  MESSAGE("final train loss " << result.history.epochs.back().train_loss);
  CHECK(result.history.epochs.back().train_loss < 1e-3);
  CHECK(evaluate_loss(result.model, {mel}) < 1e-3);
}

TEST_CASE("training is reproducible and respects epoch limits") {
  SeedableRng rng(13);
  std::vector<FeatureMatrix> train, val;
  for (int i = 0; i < 6; ++i) train.push_back(random_features(8 + i, 6, rng, 1.0, -2.0));
  for (int i = 0; i < 2; ++i) val.push_back(random_features(7, 6, rng, 1.0, -2.0));
  TrainConfig cfg;
  cfg.batch_size = 4;
  cfg.lr = 1e-2;
  cfg.max_epochs = 5;
  cfg.alpha_max = 0.2;
  cfg.max_frames = 9;
  int callbacks = 0;
  auto r1 = train_autoencoder(train, val, cfg, tiny_config(), [&](const EpochRecord&) {
    ++callbacks;
  });
  auto r2 = train_autoencoder(train, val, cfg, tiny_config());
  CHECK(callbacks == 5);
  CHECK(r1.history.epochs.size() <= 5);
  CHECK(history_csv(r1.history) == history_csv(r2.history));
  CHECK(r1.model.params.dec_out.weight == r2.model.params.dec_out.weight);
  CHECK(r1.model.config.alpha_max == 0.2);

  const std::string csv = history_csv(r1.history);
  CHECK(csv.rfind("epoch,train_loss,val_loss,alpha_max,seed\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);

  cfg.seed = 99;
  auto r3 = train_autoencoder(train, val, cfg, tiny_config());
  CHECK(history_csv(r3.history) != history_csv(r1.history));

  CHECK_THROWS_AS(train_autoencoder({}, val, cfg, tiny_config()), InvalidArgument);
  CHECK_THROWS_AS(train_autoencoder(train, {}, cfg, tiny_config()), InvalidArgument);
}

TEST_CASE("early stopping keeps the best epoch") {
  SeedableRng rng(14);
  std::vector<FeatureMatrix> train{random_features(6, 6, rng)};
  std::vector<FeatureMatrix> val{random_features(6, 6, rng, 5.0)};
  TrainConfig cfg;
  cfg.batch_size = 1;
  cfg.lr = 5e-2;
  cfg.max_epochs = 200;
  cfg.patience = 3;
  auto r = train_autoencoder(train, val, cfg, tiny_config());
  const auto& h = r.history;
  CHECK(h.epochs.size() <= 200);
  double best = 1e300;
  for (const auto& e : h.epochs) best = std::min(best, e.val_loss);
  CHECK(h.best_val_loss == best);
  CHECK(evaluate_loss(r.model, val) == doctest::Approx(best).epsilon(1e-9));
  if (h.epochs.size() < 200) CHECK(h.epochs.size() - h.best_epoch == 3);
}

TEST_CASE("checkpoint round trip and failure modes") {
  const auto dir = sarlab::testing::scratch_dir("sar_ckpt");
  const std::string path = (dir / "m.ckpt").string();
  SarModel model = SarModel::initialise(reduced_config(), 21);
  SeedableRng rng(22);
  model.norm = compute_norm({random_features(30, 80, rng, 2.0, -4.0)});
  CheckpointInfo info;
  info.seed = 21;
  info.step = 17;
  info.training = {{"lr", 1e-3}};
  save_checkpoint(model, path, info);

  CheckpointInfo back;
  SarModel loaded = load_checkpoint(path, &back);
  CHECK(loaded.config == model.config);
  CHECK(back.step == 17);
  CHECK(back.seed == 21);
  CHECK(back.training["lr"] == 1e-3);
  CHECK(loaded.norm.mean == model.norm.mean);
  CHECK(loaded.norm.stddev == model.norm.stddev);
  std::vector<FeatureMatrix> a, b;
  model.params.visit([&](const std::string&, const FeatureMatrix& m) { a.push_back(m); });
  loaded.params.visit([&](const std::string&, const FeatureMatrix& m) { b.push_back(m); });
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(std::memcmp(a[i].data(), b[i].data(), a[i].size() * sizeof(float)) == 0);
  }

  SarConfig other = reduced_config();
  other.dec_hidden = 64;
  try {
    load_checkpoint(path, other);
    FAIL("expected a shape mismatch");
  } catch (const InvalidArgument& e) {
    CHECK(std::string(e.what()).find("dec.fc.weight") != std::string::npos);
  }

  const std::string cut = (dir / "cut.ckpt").string();
  std::filesystem::copy_file(path, cut, std::filesystem::copy_options::overwrite_existing);
  std::filesystem::resize_file(cut, std::filesystem::file_size(cut) / 2);
  try {
    load_checkpoint(cut);
    FAIL("expected corrupt checkpoint");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("corrupt checkpoint") != std::string::npos);
  }
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.ckpt").string()), IoError);
}

TEST_CASE("config json round trip and validation") {
  SarConfig c = reduced_config();
  nlohmann::json j = c;
  CHECK(j.get<SarConfig>() == c);
  CHECK_THROWS_AS((nlohmann::json{{"bogus", 1}}.get<SarConfig>()), InvalidArgument);
  SarConfig bad;
  bad.latent_dim = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = SarConfig{};
  bad.alpha_max = 1.0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  TrainConfig t;
  t.patience = 0;
  CHECK_THROWS_AS(t.validate(), InvalidArgument);
  TrainConfig t2;
  nlohmann::json tj = t2;
  CHECK(tj.get<TrainConfig>().lr == t2.lr);
}

}  // TEST_SUITE
