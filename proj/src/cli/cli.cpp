// cli/cli.cpp

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

#include "sarlab/cli/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sarlab/corruption/corruption.hpp"
#include "sarlab/dsp/audio.hpp"
#include "sarlab/dsp/griffin_lim.hpp"
#include "sarlab/dsp/mel.hpp"
#include "sarlab/dsp/mel_io.hpp"
#include "sarlab/error.hpp"
#include "sarlab/harness/corpus.hpp"
#include "sarlab/harness/dataset.hpp"
#include "sarlab/harness/experiment.hpp"
#include "sarlab/metrics/estoi.hpp"
#include "sarlab/sar/checkpoint.hpp"
#include "sarlab/sar/model.hpp"
#include "sarlab/sar/train.hpp"

namespace sarlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 1337;
  int threads = 0;  // 0: not given on the command line
  bool verbose = false;
};

class Context {
 public:
  Context(std::ostream& out, std::ostream& err, const Globals& g) : out(out), err(err), g(g) {}

  std::ostream& out;
  std::ostream& err;
  const Globals& g;

  /// --threads, then SARLAB_THREADS, then `fallback`.
  int threads(int fallback = 1) const {
    if (g.threads > 0) return g.threads;
    if (const char* env = std::getenv("SARLAB_THREADS"); env && *env) {
      char* end = nullptr;
      const long v = std::strtol(env, &end, 10);
      if (*end != '\0' || v < 1) throw InvalidArgument("SARLAB_THREADS must be a positive integer");
      return static_cast<int>(v);
    }
    return fallback;
  }
  harness::Logger logger() const {
    if (!g.verbose) return {};
    return [this](const std::string& line) { err << line << std::endl; };
  }
};

json read_json_arg(const std::string& arg, const char* what) {
  // Either a path to a JSON file or an inline JSON document.
  std::string text = arg;
  if (!arg.empty() && arg.front() != '{' && arg.front() != '[') {
    std::ifstream in(arg, std::ios::binary);
    if (!in) throw InvalidArgument(std::string("cannot read ") + what + " " + arg);
    text.assign(std::istreambuf_iterator<char>(in), {});
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad ") + what + ": " + e.what());
  }
}

void require_file(const fs::path& p, const char* what) {
  if (!fs::is_regular_file(p)) throw InvalidArgument(std::string(what) + " not found: " + p.string());
}

// ---- features -------------------------------------------------------------

struct FeaturesArgs {
  std::string in, out;
  std::size_t fft_size = 1024;
  std::size_t hop = 0;  // 0: round(0.016 * rate)
  std::size_t n_mels = dsp::kNumMels;
  double fmin = 0.0, fmax = -1.0;
};

int cmd_features(const FeaturesArgs& a, Context& ctx) {
  std::vector<fs::path> inputs;
  if (fs::is_directory(a.in)) {
    for (const auto& e : harness::build_manifest(a.in).entries) inputs.push_back(e.path);
  } else {
    require_file(a.in, "input");
    inputs.push_back(a.in);
  }
  fs::create_directories(a.out);
  for (const auto& path : inputs) {
    const dsp::AudioClip clip = dsp::read_wav(path);
    dsp::StftConfig stft = dsp::StftConfig::for_rate(clip.sample_rate);
    stft.fft_size = a.fft_size;
    if (a.hop > 0) stft.hop = a.hop;
    stft.validate();
    const dsp::MelFilterBank bank =
        dsp::mel_filterbank(clip.sample_rate, stft.fft_size, a.n_mels, a.fmin, a.fmax);
    const dsp::MelSpectrogram mel = dsp::mel_spectrogram(clip, stft, bank);
    const fs::path dst = fs::path(a.out) / (path.stem().string() + ".mel");
    dsp::write_mel(mel, dst);
    if (ctx.g.verbose) ctx.err << dst.string() << ": " << mel.num_frames() << " frames\n";
  }
  ctx.out << "processed " << inputs.size() << " file" << (inputs.size() == 1 ? "" : "s") << "\n";
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string data, config, out, history;
  std::optional<double> alpha_max;
};

int cmd_train(const TrainArgs& a, Context& ctx) {
  sar::TrainConfig train;
  sar::SarConfig model;
  std::size_t max_train_utts = 0;
  std::uint64_t split_seed = ctx.g.seed;
  train.seed = ctx.g.seed;
  if (!a.config.empty()) {
    const json j = read_json_arg(a.config, "train config");
    if (!j.is_object()) throw InvalidArgument("train config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (key == "train") {
        json t = value;
        if (t.is_object() && !t.contains("seed")) t["seed"] = ctx.g.seed;
        train = t.get<sar::TrainConfig>();
      } else if (key == "model") {
        model = value.get<sar::SarConfig>();
      } else if (key == "max_train_utts") {
        max_train_utts = value.get<std::size_t>();
      } else if (key == "split_seed") {
        split_seed = value.get<std::uint64_t>();
      } else {
        throw InvalidArgument("train config: unknown key '" + key + "'");
      }
    }
  }
  if (a.alpha_max) train.alpha_max = *a.alpha_max;
  train.validate();
  model.validate();
  if (!fs::is_directory(a.data)) throw InvalidArgument("data directory not found: " + a.data);

  const harness::Manifest manifest = harness::build_manifest(a.data);
  const harness::SplitSpec split = harness::split_dataset(manifest, split_seed);
  const sar::TrainResult r =
      harness::train_on_split(manifest, split, train, model, max_train_utts, ctx.logger());

  sar::CheckpointInfo info;
  info.training = train;
  info.training["split_seed"] = split_seed;
  info.training["max_train_utts"] = max_train_utts;
  info.seed = train.seed;
  info.step = r.history.steps;
  if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
  sar::save_checkpoint(r.model, a.out, info);
  const std::string history = a.history.empty() ? a.out + ".history.csv" : a.history;
  sar::write_history_csv(r.history, history);

  char buf[256];
  std::snprintf(buf, sizeof(buf), "best epoch %d val_loss %.6f steps %lld\n", r.history.best_epoch,
                r.history.best_val_loss, r.history.steps);
  ctx.out << buf;
  return 0;
}

// ---- corrupt --------------------------------------------------------------

struct CorruptArgs {
  std::string in, spec, out;
};

int cmd_corrupt(const CorruptArgs& a, Context& ctx) {
  require_file(a.in, "input");
  const json j = read_json_arg(a.spec, "corruption spec");
  auto spec = j.get<corruption::CorruptionSpec>();
  if (!j.contains("seed")) spec.seed = ctx.g.seed;
  spec.validate();
  if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());

  if (spec.kind == corruption::Kind::kNone) {
    fs::copy_file(a.in, a.out, fs::copy_options::overwrite_existing);
    ctx.out << "copied " << a.in << "\n";
    return 0;
  }
  if (dsp::is_mel_file(a.in)) {
    if (!spec.applies_to_features()) {
      throw InvalidArgument(corruption::kind_name(spec.kind) + " needs a waveform input");
    }
    dsp::MelSpectrogram mel = dsp::read_mel(a.in);
    const dsp::RealMatrix clean = mel.frames;
    mel.frames = corruption::corrupt(clean, spec);
    dsp::write_mel(mel, a.out);
    if (spec.kind == corruption::Kind::kWhiteNoise) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "realized_snr_db %.4f\n",
                    corruption::realized_snr_db(clean, mel.frames));
      ctx.out << buf;
    } else {
      ctx.out << "wrote " << a.out << "\n";
    }
    return 0;
  }
  if (!spec.applies_to_audio()) {
    throw InvalidArgument(corruption::kind_name(spec.kind) + " needs a mel feature input");
  }
  dsp::write_wav(corruption::corrupt(dsp::read_wav(a.in), spec), a.out);
  ctx.out << "wrote " << a.out << "\n";
  return 0;
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::string mel, wav, via = "mel", ckpt, out;
  std::size_t iters = 60;
};

dsp::AudioClip griffin_lim_any(const dsp::MelSpectrogram& mel, std::size_t iters) {
  dsp::StftConfig stft = dsp::StftConfig::for_rate(mel.sample_rate);
  if (mel.hop == stft.hop && mel.num_mels() == dsp::kNumMels) return dsp::griffin_lim(mel, iters);
  stft.hop = mel.hop;
  const auto bank = dsp::mel_filterbank(mel.sample_rate, stft.fft_size, mel.num_mels());
  return dsp::griffin_lim(mel, stft, bank, iters);
}

int cmd_synth(const SynthArgs& a, Context& ctx) {
  if (a.mel.empty() == a.wav.empty()) throw InvalidArgument("give exactly one of --mel or --wav");
  if (a.via != "mel" && a.via != "ae" && a.via != "sar") {
    throw InvalidArgument("--via must be mel, ae or sar");
  }
  const bool latent = a.via != "mel";
  if (latent && a.ckpt.empty()) throw InvalidArgument("--via " + a.via + " needs --ckpt");

  dsp::MelSpectrogram mel;
  if (!a.mel.empty()) {
    require_file(a.mel, "mel file");
    mel = dsp::read_mel(a.mel);
  } else {
    require_file(a.wav, "wav file");
    mel = dsp::mel_spectrogram(dsp::read_wav(a.wav));
  }
  if (latent) {
    require_file(a.ckpt, "checkpoint");
    const sar::SarModel model = sar::load_checkpoint(a.ckpt);
    if (static_cast<int>(mel.num_mels()) != model.config.n_mels) {
      throw InvalidArgument("checkpoint expects " + std::to_string(model.config.n_mels) +
                            " mel bins, input has " + std::to_string(mel.num_mels()));
    }
    const auto decoded = sar::decode(sar::encode(mel, model), model);
    mel = sar::to_mel(decoded, mel.sample_rate, mel.hop);
  }
  const dsp::AudioClip clip = griffin_lim_any(mel, a.iters);
  if (fs::path(a.out).has_parent_path()) fs::create_directories(fs::path(a.out).parent_path());
  dsp::write_wav(clip, a.out);
  ctx.out << "wrote " << a.out << " (" << clip.samples.size() << " samples)\n";
  return 0;
}

// ---- estoi ----------------------------------------------------------------

struct EstoiArgs {
  std::string ref, deg;
};

int cmd_estoi(const EstoiArgs& a, Context& ctx) {
  require_file(a.ref, "reference");
  require_file(a.deg, "degraded");
  const double score = metrics::estoi(dsp::read_wav(a.ref), dsp::read_wav(a.deg));
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f\n", score);
  ctx.out << buf;
  return 0;
}

// ---- experiment -----------------------------------------------------------

struct ExperimentArgs {
  std::string config;
  bool train_first = false;
};

int cmd_experiment(const ExperimentArgs& a, Context& ctx) {
  require_file(a.config, "experiment config");
  harness::ExperimentConfig cfg = harness::load_experiment_config(a.config);
  if (a.train_first) cfg.train_first = true;
  cfg.threads = ctx.threads(cfg.threads);
  const harness::ReportTable t = harness::run_table_experiment(cfg, ctx.logger());
  ctx.out << harness::report_csv(t);
  return 0;
}

// ---- make-corpus ----------------------------------------------------------

struct CorpusArgs {
  std::string out;
  std::size_t count = 1000;
  double base_f0 = 120.0;
};

int cmd_make_corpus(const CorpusArgs& a, Context& ctx) {
  if (a.count == 0) throw InvalidArgument("--count must be > 0");
  harness::SyntheticVoice voice;
  voice.base_f0 = a.base_f0;
  const std::size_t n = harness::write_synthetic_corpus(a.out, a.count, ctx.g.seed, voice);
  ctx.out << "wrote " << n << " utterances to " << a.out << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"sarlab: latent-masking auto-encoder and copy-synthesis evaluation", "sarlab"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "Base random seed")->default_val(1337);
  app.add_option("--threads", g.threads, "Worker threads (default: SARLAB_THREADS or 1)")
      ->check(CLI::Range(1, 1024));
  app.add_flag("--verbose,-v", g.verbose, "Progress logging on stderr");

  FeaturesArgs fa;
  auto* features = app.add_subcommand("features", "Extract log-mel feature files");
  features->add_option("--in", fa.in, "WAV file or directory")->required();
  features->add_option("--out", fa.out, "Output directory")->required();
  features->add_option("--fft-size", fa.fft_size, "FFT size")->default_val(1024);
  features->add_option("--hop", fa.hop, "Hop in samples (default 16 ms)");
  features->add_option("--n-mels", fa.n_mels, "Number of mel bins")->default_val(dsp::kNumMels);
  features->add_option("--fmin", fa.fmin, "Lowest filter edge (Hz)")->default_val(0.0);
  features->add_option("--fmax", fa.fmax, "Highest filter edge (Hz, default Nyquist)");

  TrainArgs ta;
  double alpha = 0.0;
  auto* train = app.add_subcommand("train", "Train an auto-encoder on a WAV directory");
  train->add_option("--data", ta.data, "Corpus directory")->required();
  auto* alpha_opt = train->add_option("--alpha-max", alpha, "Maximum masking ratio");
  train->add_option("--config", ta.config, "JSON file or inline JSON");
  train->add_option("--out", ta.out, "Checkpoint path")->required();
  train->add_option("--history", ta.history, "History CSV (default <out>.history.csv)");

  CorruptArgs ca;
  auto* corrupt = app.add_subcommand("corrupt", "Apply a corruption to a WAV or mel file");
  corrupt->add_option("--in", ca.in, "Input WAV or mel file")->required();
  corrupt->add_option("--spec", ca.spec, "Corruption spec (JSON file or inline)")->required();
  corrupt->add_option("--out", ca.out, "Output path")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Griffin-Lim copy synthesis");
  synth->add_option("--mel", sa.mel, "Mel feature file");
  synth->add_option("--wav", sa.wav, "Ground-truth WAV");
  synth->add_option("--via", sa.via, "mel, ae or sar")->default_val("mel");
  synth->add_option("--ckpt", sa.ckpt, "Checkpoint for --via ae/sar");
  synth->add_option("--iters", sa.iters, "Griffin-Lim iterations")->default_val(60);
  synth->add_option("--out", sa.out, "Output WAV")->required();

  EstoiArgs ea;
  auto* estoi = app.add_subcommand("estoi", "ESTOI of a degraded WAV against a reference");
  estoi->add_option("--ref", ea.ref, "Reference WAV")->required();
  estoi->add_option("--deg", ea.deg, "Degraded WAV")->required();

  ExperimentArgs xa;
  auto* experiment = app.add_subcommand("experiment", "Run the systems x conditions grid");
  experiment->add_option("--config", xa.config, "Experiment config JSON")->required();
  experiment->add_flag("--train-first", xa.train_first, "Train AE and SAR before evaluating");

  CorpusArgs pa;
  auto* corpus = app.add_subcommand("make-corpus", "Write a synthetic single-speaker corpus");
  corpus->add_option("--out", pa.out, "Output directory")->required();
  corpus->add_option("--count", pa.count, "Number of utterances")->default_val(1000);
  corpus->add_option("--f0", pa.base_f0, "Mean pitch (Hz)")->default_val(120.0);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return 0;
    err << "sarlab: " << e.what() << "\n";
    return 2;
  }

  Context ctx(out, err, g);
  try {
    if (*features) return cmd_features(fa, ctx);
    if (*train) {
      if (*alpha_opt) ta.alpha_max = alpha;
      return cmd_train(ta, ctx);
    }
    if (*corrupt) return cmd_corrupt(ca, ctx);
    if (*synth) return cmd_synth(sa, ctx);
    if (*estoi) return cmd_estoi(ea, ctx);
    if (*experiment) return cmd_experiment(xa, ctx);
    if (*corpus) return cmd_make_corpus(pa, ctx);
  } catch (const InvalidArgument& e) {
    err << "sarlab: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "sarlab: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace sarlab::cli
