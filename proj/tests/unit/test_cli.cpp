// tests/unit/test_cli.cpp

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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <doctest.h>

#include "sarlab/cli/cli.hpp"
#include "sarlab/corruption/corruption.hpp"
#include "sarlab/dsp/griffin_lim.hpp"
#include "sarlab/dsp/mel_io.hpp"
#include "sarlab/harness/corpus.hpp"
#include "sarlab/metrics/estoi.hpp"
#include "test_support.hpp"

using namespace sarlab;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "sarlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string s(const fs::path& p) { return p.string(); }

const char* kTinyModel =
    R"("model": {"fc_hidden": 16, "n_fc_enc": 1, "blstm_hidden": 8, "n_blstm": 1,
                 "latent_dim": 8, "dec_hidden": 16})";

fs::path toy_corpus(const std::string& name, std::size_t n) {
  const auto dir = testing::scratch_dir(name);
  harness::SyntheticVoice v;
  v.min_seconds = 1.0;
  v.max_seconds = 1.2;
  harness::write_synthetic_corpus(dir / "corpus", n, 5, v);
  return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit 2, help exits 0") {
  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"estoi", "--ref", "a.wav"}).code == 2);
  CHECK(run({"--threads", "0", "estoi", "--ref", "a", "--deg", "b"}).code == 2);
  const Run help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("experiment") != std::string::npos);
}

TEST_CASE("features: frame count, determinism, missing input") {
  const auto dir = testing::scratch_dir("cli_features");
  dsp::write_wav(testing::modulated_tones(32000, 16000, 1), dir / "two.wav");
  const Run r = run({"features", "--in", s(dir / "two.wav"), "--out", s(dir / "f")});
  REQUIRE(r.code == 0);
  CHECK(r.out == "processed 1 file\n");
  const auto mel = dsp::read_mel(dir / "f" / "two.mel");
  // Reflect padding by fft/2: 1 + floor(32000 / 256) frames.
  CHECK(mel.num_frames() >= 125);
  CHECK(mel.num_frames() <= 127);
  CHECK(mel.num_mels() == 80);
  CHECK(mel.hop == 256);
  const std::string first = slurp(dir / "f" / "two.mel");
  REQUIRE(run({"features", "--in", s(dir), "--out", s(dir / "g")}).code == 0);
  CHECK(slurp(dir / "g" / "two.mel") == first);
  CHECK(run({"features", "--in", s(dir / "nope.wav"), "--out", s(dir / "f")}).code == 2);
  const Run custom = run({"features", "--in", s(dir / "two.wav"), "--out", s(dir / "h"),
                          "--n-mels", "40", "--hop", "128"});
  REQUIRE(custom.code == 0);
  CHECK(dsp::read_mel(dir / "h" / "two.mel").num_mels() == 40);
  CHECK(dsp::read_mel(dir / "h" / "two.mel").num_frames() == 251);
}

TEST_CASE("corrupt: identity copy, kind checks, realized SNR") {
  const auto dir = testing::scratch_dir("cli_corrupt");
  dsp::write_wav(testing::modulated_tones(32000, 16000, 2), dir / "a.wav");
  REQUIRE(run({"features", "--in", s(dir / "a.wav"), "--out", s(dir)}).code == 0);
  REQUIRE(run({"corrupt", "--in", s(dir / "a.wav"), "--spec", R"({"kind":"none"})", "--out",
               s(dir / "copy.wav")})
              .code == 0);
  CHECK(slurp(dir / "copy.wav") == slurp(dir / "a.wav"));
  REQUIRE(run({"corrupt", "--in", s(dir / "a.mel"), "--spec", R"({"kind":"none"})", "--out",
               s(dir / "copy.mel")})
              .code == 0);
  CHECK(slurp(dir / "copy.mel") == slurp(dir / "a.mel"));

  CHECK(run({"corrupt", "--in", s(dir / "a.mel"), "--spec",
             R"({"kind":"band_limit","intermediate_rate":8000})", "--out", s(dir / "x.mel")})
            .code == 2);
  CHECK(run({"corrupt", "--in", s(dir / "a.wav"), "--spec", R"({"kind":"mask","alpha":0.1})",
             "--out", s(dir / "x.wav")})
            .code == 2);
  CHECK(run({"corrupt", "--in", s(dir / "a.mel"), "--spec", R"({"kind":"warp"})", "--out",
             s(dir / "x.mel")})
            .code == 2);

  std::ofstream(dir / "noise.json") << R"({"kind":"white_noise","snr_db":10,"seed":3})";
  const Run n = run({"corrupt", "--in", s(dir / "a.mel"), "--spec", s(dir / "noise.json"),
                     "--out", s(dir / "noisy.mel")});
  REQUIRE(n.code == 0);
  REQUIRE(n.out.rfind("realized_snr_db ", 0) == 0);
  CHECK(std::abs(std::stod(n.out.substr(16)) - 10.0) < 0.5);
  // Independent check on the written file.
  const auto clean = dsp::read_mel(dir / "a.mel"), noisy = dsp::read_mel(dir / "noisy.mel");
  CHECK(std::abs(corruption::realized_snr_db(clean.frames, noisy.frames) - 10.0) < 0.5);

  REQUIRE(run({"corrupt", "--in", s(dir / "a.wav"), "--spec",
               R"({"kind":"band_limit","intermediate_rate":8000})", "--out", s(dir / "bl.wav")})
              .code == 0);
  const auto bl = dsp::read_wav(dir / "bl.wav");
  CHECK(bl.samples.size() == 32000);
}

TEST_CASE("synth and estoi") {
  const auto dir = toy_corpus("cli_synth", 24);
  const auto wav = dir / "corpus" / "utt_00003.wav";
  REQUIRE(run({"features", "--in", s(wav), "--out", s(dir)}).code == 0);
  REQUIRE(run({"synth", "--mel", s(dir / "utt_00003.mel"), "--out", s(dir / "gl.wav")}).code == 0);
  dsp::write_wav(dsp::griffin_lim(dsp::read_mel(dir / "utt_00003.mel")), dir / "direct.wav");
  CHECK(slurp(dir / "gl.wav") == slurp(dir / "direct.wav"));
  CHECK(run({"synth", "--wav", s(wav), "--via", "sar", "--out", s(dir / "x.wav")}).code == 2);
  CHECK(run({"synth", "--wav", s(wav), "--via", "waveglow", "--out", s(dir / "x.wav")}).code == 2);

  const Run self = run({"estoi", "--ref", s(wav), "--deg", s(wav)});
  REQUIRE(self.code == 0);
  CHECK(std::stod(self.out) >= 0.999);
  const Run gl = run({"estoi", "--ref", s(wav), "--deg", s(dir / "gl.wav")});
  REQUIRE(gl.code == 0);
  char expect[32];
  std::snprintf(expect, sizeof(expect), "%.4f\n",
                metrics::estoi(dsp::read_wav(wav), dsp::read_wav(dir / "gl.wav")));
  CHECK(gl.out == expect);

  dsp::AudioClip other = dsp::read_wav(wav);
  other.sample_rate = 8000;
  dsp::write_wav(other, dir / "r8.wav");
  CHECK(run({"estoi", "--ref", s(wav), "--deg", s(dir / "r8.wav")}).code == 2);

  // Train a tiny model and synthesise through it.
  std::ofstream(dir / "train.json") << R"({"train": {"batch_size": 4, "max_epochs": 40, "lr": 3e-3,
      "patience": 40}, "model": {"fc_hidden": 32, "n_fc_enc": 1, "blstm_hidden": 16, "n_blstm": 1,
      "latent_dim": 32, "dec_hidden": 32}})";
  const Run t = run({"train", "--data", s(dir / "corpus"), "--alpha-max", "0.2", "--config",
                     s(dir / "train.json"), "--out", s(dir / "sar.ckpt")});
  REQUIRE(t.code == 0);
  REQUIRE(run({"synth", "--wav", s(wav), "--via", "sar", "--ckpt", s(dir / "sar.ckpt"), "--out",
               s(dir / "sar.wav")})
              .code == 0);
  const Run e = run({"estoi", "--ref", s(wav), "--deg", s(dir / "sar.wav")});
  REQUIRE(e.code == 0);
  MESSAGE("sar copy synthesis estoi " << e.out);
  CHECK(std::stod(e.out) > 0.0);
}

TEST_CASE("train: determinism and argument errors") {
  const auto dir = toy_corpus("cli_train", 24);
  std::ofstream(dir / "train.json")
      << std::string("{\"train\": {\"batch_size\": 4, \"max_epochs\": 2}, ") + kTinyModel + "}";
  const std::vector<std::string> args{"--seed", "7", "train", "--data", s(dir / "corpus"),
                                      "--alpha-max", "0", "--config", s(dir / "train.json"),
                                      "--out"};
  auto with_out = [&](const std::string& out) {
    auto a = args;
    a.push_back(out);
    return a;
  };
  REQUIRE(run(with_out(s(dir / "a.ckpt"))).code == 0);
  REQUIRE(run(with_out(s(dir / "b.ckpt"))).code == 0);
  const std::string h = slurp(dir / "a.ckpt.history.csv");
  CHECK(h.rfind("epoch,train_loss,val_loss,alpha_max,seed\n", 0) == 0);
  CHECK(h == slurp(dir / "b.ckpt.history.csv"));
  CHECK(h.find(",0,7\n") != std::string::npos);
  CHECK(slurp(dir / "a.ckpt") == slurp(dir / "b.ckpt"));

  CHECK(run({"train", "--data", s(dir / "missing"), "--out", s(dir / "c.ckpt")}).code == 2);
  CHECK(run({"train", "--data", s(dir / "corpus"), "--alpha-max", "1.5", "--out",
             s(dir / "c.ckpt")})
            .code == 2);
  CHECK(run({"train", "--data", s(dir / "corpus"), "--config", R"({"bogus": 1})", "--out",
             s(dir / "c.ckpt")})
            .code == 2);
}

TEST_CASE("experiment: missing checkpoints, toy run and rerun") {
  const auto dir = toy_corpus("cli_experiment", 24);
  const std::string cfg = std::string(R"({"dataset_root": "corpus", "output_dir": "out",
      "griffin_lim_iters": 2, "train": {"batch_size": 4, "max_epochs": 1},)") +
                          kTinyModel + "}";
  std::ofstream(dir / "exp.json") << cfg;
  CHECK(run({"experiment", "--config", s(dir / "exp.json")}).code == 2);
  CHECK(run({"experiment", "--config", s(dir / "absent.json")}).code == 2);

  const Run first = run({"experiment", "--config", s(dir / "exp.json"), "--train-first"});
  REQUIRE(first.code == 0);
  const std::string csv = slurp(dir / "out" / "report.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16);
  CHECK(first.out == csv);
  const std::string json1 = slurp(dir / "out" / "report.json");

  REQUIRE(run({"experiment", "--config", s(dir / "exp.json")}).code == 0);
  CHECK(slurp(dir / "out" / "report.json") == json1);
  REQUIRE(run({"--threads", "3", "experiment", "--config", s(dir / "exp.json")}).code == 0);
  CHECK(slurp(dir / "out" / "report.csv") == csv);

  ::setenv("SARLAB_THREADS", "2", 1);
  CHECK(run({"experiment", "--config", s(dir / "exp.json")}).code == 0);
  CHECK(slurp(dir / "out" / "report.json") == json1);
  ::setenv("SARLAB_THREADS", "many", 1);
  CHECK(run({"experiment", "--config", s(dir / "exp.json")}).code == 2);
  ::unsetenv("SARLAB_THREADS");
}

TEST_CASE("make-corpus is seeded") {
  const auto dir = testing::scratch_dir("cli_corpus");
  REQUIRE(run({"--seed", "3", "make-corpus", "--out", s(dir / "a"), "--count", "3"}).code == 0);
  REQUIRE(run({"--seed", "3", "make-corpus", "--out", s(dir / "b"), "--count", "3"}).code == 0);
  REQUIRE(run({"--seed", "4", "make-corpus", "--out", s(dir / "c"), "--count", "3"}).code == 0);
  CHECK(slurp(dir / "a" / "utt_00002.wav") == slurp(dir / "b" / "utt_00002.wav"));
  CHECK(slurp(dir / "a" / "utt_00002.wav") != slurp(dir / "c" / "utt_00002.wav"));
  CHECK(run({"make-corpus", "--out", s(dir / "d"), "--count", "0"}).code == 2);
}

}  // TEST_SUITE
