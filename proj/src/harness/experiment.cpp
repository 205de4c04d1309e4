// harness/experiment.cpp

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

#include "sarlab/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "sarlab/dsp/griffin_lim.hpp"
#include "sarlab/dsp/mel.hpp"
#include "sarlab/error.hpp"
#include "sarlab/metrics/estoi.hpp"
#include "sarlab/nn/rng.hpp"
#include "sarlab/sar/checkpoint.hpp"

namespace sarlab::harness {

namespace fs = std::filesystem;
using corruption::CorruptionSpec;
using corruption::Kind;
using nlohmann::json;

std::string system_name(SystemKind kind) {
  switch (kind) {
    case SystemKind::kMel: return "MEL";
    case SystemKind::kAe: return "AE";
    case SystemKind::kSar: return "SAR";
  }
  return "MEL";
}

SystemKind parse_system(const std::string& name) {
  std::string up = name;
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  if (up == "MEL") return SystemKind::kMel;
  if (up == "AE") return SystemKind::kAe;
  if (up == "SAR") return SystemKind::kSar;
  throw InvalidArgument("unknown system '" + name + "' (expected MEL, AE or SAR)");
}

std::uint64_t cell_seed(const CorruptionSpec& spec, const std::string& system,
                        const std::string& utterance_id) {
  return nn::derive_seed(spec.seed, {system, spec.label(), utterance_id});
}

dsp::AudioClip synthesize(const EvalSystem& system, const dsp::AudioClip& ground_truth,
                          const CorruptionSpec& spec, std::uint64_t seed,
                          const EvalOptions& options) {
  spec.validate();
  CorruptionSpec cell = spec;
  cell.seed = seed;
  const bool audio_side = spec.kind == Kind::kBandLimit;
  const dsp::AudioClip input = audio_side ? corruption::corrupt(ground_truth, cell) : ground_truth;
  dsp::MelSpectrogram mel = dsp::mel_spectrogram(input);

  if (system.kind == SystemKind::kMel) {
    if (!audio_side) mel.frames = corruption::corrupt(mel.frames, cell);
    return dsp::griffin_lim(mel, options.griffin_lim_iters);
  }

  if (!system.model) throw InvalidArgument(system.name() + " system has no model loaded");
  const sar::SarModel& model = *system.model;
  if (static_cast<int>(mel.num_mels()) != model.config.n_mels) {
    throw InvalidArgument("checkpoint/config mismatch: model expects " +
                          std::to_string(model.config.n_mels) + " mel bins, features have " +
                          std::to_string(mel.num_mels()));
  }
  sar::FeatureMatrix feats = sar::to_features(mel);
  if (!audio_side && options.corrupt_mel_for_latent) feats = corruption::corrupt(feats, cell);
  sar::FeatureMatrix z = sar::encode(feats, model);
  if (!audio_side && !options.corrupt_mel_for_latent) z = corruption::corrupt(z, cell);
  const sar::FeatureMatrix out = sar::decode(z, model);
  return dsp::griffin_lim(sar::to_mel(out, mel.sample_rate, mel.hop), options.griffin_lim_iters);
}

namespace {

// Runs job(i) for i in [0, n) on up to `threads` workers. The first failure
// (lowest index) is rethrown after every worker has stopped.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& job) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex mu;
  std::size_t error_index = n;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n || failed.load()) return;
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::vector<double> evaluate_system(const EvalSystem& system, const CorruptionSpec& spec,
                                    const std::vector<Utterance>& utterances,
                                    const EvalOptions& options) {
  if (utterances.empty()) throw InvalidArgument("evaluate_system: no utterances");
  spec.validate();
  if (system.kind != SystemKind::kMel && !system.model) {
    throw InvalidArgument(system.name() + " system needs a checkpoint");
  }
  const std::string name = system.name();
  std::vector<double> scores(utterances.size(), 0.0);
  fs::path wav_dir;
  if (!options.wav_dir.empty()) {
    wav_dir = options.wav_dir / name / spec.label();
    fs::create_directories(wav_dir);
  }
  parallel_for(utterances.size(), options.threads, [&](std::size_t i) {
    const Utterance& u = utterances[i];
    const dsp::AudioClip out = synthesize(system, u.clip, spec, cell_seed(spec, name, u.id), options);
    scores[i] = metrics::estoi(u.clip, out);
    if (!wav_dir.empty()) dsp::write_wav(out, wav_dir / (u.id + ".wav"));
  });
  return scores;
}

ReportCell make_cell(std::string system, std::string condition, std::vector<double> scores) {
  ReportCell c;
  c.system = std::move(system);
  c.condition = std::move(condition);
  c.n = scores.size();
  if (c.n > 0) {
    double sum = 0.0;
    for (double s : scores) sum += s;
    c.mean = sum / static_cast<double>(c.n);
    double sq = 0.0;
    for (double s : scores) sq += (s - c.mean) * (s - c.mean);
    c.std = std::sqrt(sq / static_cast<double>(c.n));
  }
  c.scores = std::move(scores);
  return c;
}

const ReportCell& ReportTable::cell(const std::string& system, const std::string& condition) const {
  for (const auto& c : cells) {
    if (c.system == system && c.condition == condition) return c;
  }
  throw InvalidArgument("report has no cell (" + system + ", " + condition + ")");
}

bool ReportTable::operator==(const ReportTable& other) const {
  if (systems != other.systems || utterance_ids != other.utterance_ids || cells != other.cells ||
      metadata != other.metadata || conditions.size() != other.conditions.size()) {
    return false;
  }
  for (std::size_t i = 0; i < conditions.size(); ++i) {
    if (json(conditions[i]) != json(other.conditions[i])) return false;
  }
  return true;
}

ReportTable evaluate_grid(const std::vector<EvalSystem>& systems,
                          const std::vector<CorruptionSpec>& conditions,
                          const std::vector<Utterance>& utterances, const EvalOptions& options) {
  if (systems.empty() || conditions.empty()) {
    throw InvalidArgument("evaluate_grid: need at least one system and one condition");
  }
  std::vector<Utterance> sorted = utterances;
  std::sort(sorted.begin(), sorted.end(),
            [](const Utterance& a, const Utterance& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].id == sorted[i - 1].id) {
      throw InvalidArgument("duplicate utterance id '" + sorted[i].id + "'");
    }
  }
  std::set<std::string> labels;
  for (const auto& c : conditions) {
    if (!labels.insert(c.label()).second) {
      throw InvalidArgument("duplicate condition '" + c.label() + "'");
    }
  }
  ReportTable table;
  table.conditions = conditions;
  for (const auto& u : sorted) table.utterance_ids.push_back(u.id);
  for (const auto& system : systems) {
    table.systems.push_back(system.name());
    for (const auto& spec : conditions) {
      table.cells.push_back(make_cell(system.name(), spec.label(),
                                      evaluate_system(system, spec, sorted, options)));
    }
  }
  return table;
}

std::string report_csv(const ReportTable& table) {
  std::string out = "system,condition,mean,std,n\n";
  char buf[160];
  for (const auto& c : table.cells) {
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g,%zu\n", c.mean, c.std, c.n);
    out += c.system + "," + c.condition + buf;
  }
  return out;
}

json report_json(const ReportTable& table) {
  json cells = json::array();
  for (const auto& c : table.cells) {
    cells.push_back({{"system", c.system},
                     {"condition", c.condition},
                     {"mean", c.mean},
                     {"std", c.std},
                     {"n", c.n},
                     {"scores", c.scores}});
  }
  json conditions = json::array();
  for (const auto& c : table.conditions) conditions.push_back(json(c));
  return json{{"systems", table.systems},
              {"conditions", conditions},
              {"utterance_ids", table.utterance_ids},
              {"cells", cells},
              {"metadata", table.metadata}};
}

ReportTable parse_report_json(const json& j) {
  try {
    ReportTable t;
    t.systems = j.at("systems").get<std::vector<std::string>>();
    for (const auto& c : j.at("conditions")) t.conditions.push_back(c.get<CorruptionSpec>());
    t.utterance_ids = j.at("utterance_ids").get<std::vector<std::string>>();
    for (const auto& c : j.at("cells")) {
      ReportCell cell;
      cell.system = c.at("system").get<std::string>();
      cell.condition = c.at("condition").get<std::string>();
      cell.mean = c.at("mean").get<double>();
      cell.std = c.at("std").get<double>();
      cell.n = c.at("n").get<std::size_t>();
      cell.scores = c.at("scores").get<std::vector<double>>();
      t.cells.push_back(std::move(cell));
    }
    t.metadata = j.value("metadata", json::object());
    return t;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed report: ") + e.what());
  }
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace

void emit_report(const ReportTable& table, const fs::path& path, ReportFormat format) {
  if (format == ReportFormat::kCsv) {
    write_text(path, report_csv(table));
  } else {
    write_text(path, report_json(table).dump(2) + "\n");
  }
}

ReportTable read_report_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_report_json(j);
}

std::vector<CorruptionSpec> default_conditions(std::uint64_t seed) {
  return {CorruptionSpec::none(), CorruptionSpec::mask(0.1, seed), CorruptionSpec::mask(0.2, seed),
          CorruptionSpec::white_noise(15.0, seed), CorruptionSpec::white_noise(10.0, seed)};
}

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InvalidArgument("experiment config must be a JSON object");
  static const std::set<std::string> known = {
      "dataset_root",   "split_seed",  "n_eval_utts",   "systems",
      "conditions",     "checkpoints", "output_dir",    "train_first",
      "train",          "model",       "max_train_utts", "sar_alpha_max",
      "corrupt_mel_for_latent", "write_wavs", "griffin_lim_iters", "threads",
      "seed"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InvalidArgument("unknown experiment config key '" + key + "'");
  }
  ExperimentConfig c;
  try {
    if (!j.contains("dataset_root")) throw InvalidArgument("experiment config needs dataset_root");
    c.dataset_root = resolve(j.at("dataset_root").get<std::string>(), base_dir);
    c.seed = j.value("seed", c.seed);
    c.split_seed = j.value("split_seed", c.seed);
    c.n_eval_utts = j.value("n_eval_utts", c.n_eval_utts);
    if (j.contains("systems")) c.systems = j.at("systems").get<std::vector<std::string>>();
    if (j.contains("conditions")) {
      for (const auto& cj : j.at("conditions")) {
        CorruptionSpec spec = cj.get<CorruptionSpec>();
        if (!cj.contains("seed")) spec.seed = c.seed;
        spec.validate();
        c.conditions.push_back(spec);
      }
    } else {
      c.conditions = default_conditions(c.seed);
    }
    if (j.contains("checkpoints")) {
      for (const auto& [name, path] : j.at("checkpoints").items()) {
        c.checkpoints[system_name(parse_system(name))] =
            resolve(path.get<std::string>(), base_dir).string();
      }
    }
    c.output_dir = resolve(j.value("output_dir", c.output_dir.string()), base_dir);
    c.train_first = j.value("train_first", false);
    c.train.seed = c.seed;
    if (j.contains("train")) {
      json t = j.at("train");
      if (!t.contains("seed")) t["seed"] = c.seed;
      c.train = t.get<sar::TrainConfig>();
    }
    if (j.contains("model")) c.model = j.at("model").get<sar::SarConfig>();
    c.max_train_utts = j.value("max_train_utts", c.max_train_utts);
    c.sar_alpha_max = j.value("sar_alpha_max", c.sar_alpha_max);
    c.corrupt_mel_for_latent = j.value("corrupt_mel_for_latent", false);
    c.write_wavs = j.value("write_wavs", false);
    c.griffin_lim_iters = j.value("griffin_lim_iters", c.griffin_lim_iters);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad experiment config: ") + e.what());
  }
  if (c.systems.empty()) throw InvalidArgument("experiment config: systems is empty");
  for (const auto& s : c.systems) parse_system(s);
  if (c.conditions.empty()) throw InvalidArgument("experiment config: conditions is empty");
  if (c.n_eval_utts == 0) throw InvalidArgument("experiment config: n_eval_utts must be > 0");
  if (c.threads < 1) throw InvalidArgument("experiment config: threads must be >= 1");
  if (!(c.sar_alpha_max >= 0.0 && c.sar_alpha_max < 1.0)) {
    throw InvalidArgument("experiment config: sar_alpha_max must be in [0, 1)");
  }
  c.model.validate();
  c.train.validate();
  return c;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read experiment config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument("cannot parse " + path.string() + ": " + e.what());
  }
  return parse_experiment_config(j, fs::absolute(path).parent_path());
}

std::vector<sar::FeatureMatrix> load_features(const Manifest& manifest,
                                              const std::vector<std::string>& ids) {
  std::vector<sar::FeatureMatrix> out;
  out.reserve(ids.size());
  for (const auto& id : ids) {
    out.push_back(sar::to_features(dsp::mel_spectrogram(dsp::read_wav(manifest.find(id).path))));
  }
  return out;
}

sar::TrainResult train_on_split(const Manifest& manifest, const SplitSpec& split,
                                const sar::TrainConfig& train, const sar::SarConfig& model,
                                std::size_t max_train_utts, const Logger& log) {
  std::vector<std::string> train_ids = split.train;
  if (max_train_utts > 0 && train_ids.size() > max_train_utts) train_ids.resize(max_train_utts);
  const auto train_set = load_features(manifest, train_ids);
  const auto val_set = load_features(manifest, split.val);
  if (log) {
    log("training alpha_max=" + std::to_string(train.alpha_max) + " on " +
        std::to_string(train_set.size()) + " utterances, " + std::to_string(val_set.size()) +
        " validation");
  }
  sar::EpochCallback cb;
  if (log) {
    cb = [&](const sar::EpochRecord& r) {
      char buf[160];
      std::snprintf(buf, sizeof(buf), "epoch %d train %.6f val %.6f", r.epoch, r.train_loss,
                    r.val_loss);
      log(buf);
    };
  }
  return sar::train_autoencoder(train_set, val_set, train, model, cb);
}

ReportTable run_table_experiment(const ExperimentConfig& config, const Logger& log) {
  const Manifest manifest = build_manifest(config.dataset_root);
  const SplitSpec split = split_dataset(manifest, config.split_seed);
  if (log) {
    log("dataset " + manifest.name + ": " + std::to_string(manifest.entries.size()) +
        " utterances (" + std::to_string(split.train.size()) + "/" +
        std::to_string(split.val.size()) + "/" + std::to_string(split.test.size()) + ")");
  }

  std::vector<SystemKind> kinds;
  for (const auto& s : config.systems) kinds.push_back(parse_system(s));

  std::map<std::string, std::string> ckpt_paths;
  for (SystemKind k : kinds) {
    if (k == SystemKind::kMel) continue;
    const std::string name = system_name(k);
    auto it = config.checkpoints.find(name);
    std::string path = it != config.checkpoints.end()
                           ? it->second
                           : (config.output_dir / (name + ".ckpt")).string();
    if (!config.train_first && !fs::exists(path)) {
      throw InvalidArgument("missing checkpoint for " + name + " (" + path +
                            "); train first or set checkpoints." + name);
    }
    ckpt_paths[name] = path;
  }

  if (config.train_first && !ckpt_paths.empty()) {
    fs::create_directories(config.output_dir);
    for (const auto& [name, path] : ckpt_paths) {
      sar::TrainConfig tc = config.train;
      tc.alpha_max = name == "SAR" ? config.sar_alpha_max : 0.0;
      if (log) log("training " + name);
      sar::TrainResult r =
          train_on_split(manifest, split, tc, config.model, config.max_train_utts, log);
      sar::CheckpointInfo info;
      info.training = tc;
      info.seed = tc.seed;
      info.step = r.history.steps;
      if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
      sar::save_checkpoint(r.model, path, info);
      sar::write_history_csv(r.history, (config.output_dir / (name + "_history.csv")).string());
    }
  }

  std::vector<EvalSystem> systems;
  for (SystemKind k : kinds) {
    EvalSystem s;
    s.kind = k;
    if (k != SystemKind::kMel) {
      s.checkpoint = ckpt_paths.at(system_name(k));
      s.model = std::make_shared<const sar::SarModel>(sar::load_checkpoint(s.checkpoint));
    }
    systems.push_back(std::move(s));
  }

  std::vector<std::string> ids = split.test;
  if (ids.size() > config.n_eval_utts) ids.resize(config.n_eval_utts);
  std::vector<Utterance> utterances;
  for (const auto& id : ids) utterances.push_back({id, dsp::read_wav(manifest.find(id).path)});

  EvalOptions opts;
  opts.griffin_lim_iters = config.griffin_lim_iters;
  opts.corrupt_mel_for_latent = config.corrupt_mel_for_latent;
  opts.threads = config.threads;
  if (config.write_wavs) opts.wav_dir = config.output_dir / "wavs";
  if (log) log("evaluating " + std::to_string(utterances.size()) + " test utterances");

  ReportTable table = evaluate_grid(systems, config.conditions, utterances, opts);
  json ckpts = json::object();
  for (const auto& s : systems) {
    if (!s.checkpoint.empty()) ckpts[s.name()] = fs::path(s.checkpoint).filename().string();
  }
  table.metadata = {{"dataset", manifest.name},
                    {"split_seed", config.split_seed},
                    {"seed", config.seed},
                    {"n_utts", table.utterance_ids.size()},
                    {"checkpoints", ckpts},
                    {"griffin_lim_iters", config.griffin_lim_iters},
                    {"corrupted_representation",
                     config.corrupt_mel_for_latent ? "mel" : "latent"}};

  fs::create_directories(config.output_dir);
  emit_report(table, config.output_dir / "report.csv", ReportFormat::kCsv);
  emit_report(table, config.output_dir / "report.json", ReportFormat::kJson);
  if (log) log("wrote " + (config.output_dir / "report.json").string());
  return table;
}

ReportTable run_table_experiment(const fs::path& config_file, const Logger& log) {
  return run_table_experiment(load_experiment_config(config_file), log);
}

}  // namespace sarlab::harness
