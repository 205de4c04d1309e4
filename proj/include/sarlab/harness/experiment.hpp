// sarlab/harness/experiment.hpp

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

// Copy-synthesis evaluation of the MEL / AE / SAR systems under a grid of
// corruption conditions.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "sarlab/corruption/corruption.hpp"
#include "sarlab/dsp/audio.hpp"
#include "sarlab/harness/dataset.hpp"
#include "sarlab/sar/model.hpp"
#include "sarlab/sar/train.hpp"

namespace sarlab::harness {

enum class SystemKind { kMel, kAe, kSar };

std::string system_name(SystemKind kind);  // "MEL", "AE", "SAR"
SystemKind parse_system(const std::string& name);

struct EvalSystem {
  SystemKind kind = SystemKind::kMel;
  std::string checkpoint;
  std::shared_ptr<const sar::SarModel> model;  // required for AE and SAR

  std::string name() const { return system_name(kind); }
};

struct Utterance {
  std::string id;
  dsp::AudioClip clip;
};

struct EvalOptions {
  std::size_t griffin_lim_iters = 60;
  /// Corrupt the mel before encoding instead of the latent (AE/SAR only).
  bool corrupt_mel_for_latent = false;
  int threads = 1;
  /// When non-empty, synthesised waveforms are written here as
  /// <system>/<condition>/<id>.wav.
  std::filesystem::path wav_dir;
};

/// Seed for one cell of the grid: derive_seed(spec.seed, {system, label, id}).
std::uint64_t cell_seed(const corruption::CorruptionSpec& spec, const std::string& system,
                        const std::string& utterance_id);

/// Copy-synthesis output for one utterance and condition.
dsp::AudioClip synthesize(const EvalSystem& system, const dsp::AudioClip& ground_truth,
                          const corruption::CorruptionSpec& spec, std::uint64_t seed,
                          const EvalOptions& options = {});

/// ESTOI of every utterance against its ground truth, in input order.
std::vector<double> evaluate_system(const EvalSystem& system,
                                    const corruption::CorruptionSpec& spec,
                                    const std::vector<Utterance>& utterances,
                                    const EvalOptions& options = {});

struct ReportCell {
  std::string system;
  std::string condition;
  std::vector<double> scores;  // aligned with ReportTable::utterance_ids
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
  std::size_t n = 0;

  bool operator==(const ReportCell&) const = default;
};

struct ReportTable {
  std::vector<std::string> systems;
  std::vector<corruption::CorruptionSpec> conditions;
  std::vector<std::string> utterance_ids;
  std::vector<ReportCell> cells;  // system-major
  nlohmann::json metadata = nlohmann::json::object();

  const ReportCell& cell(const std::string& system, const std::string& condition) const;
  bool operator==(const ReportTable& other) const;
};

ReportCell make_cell(std::string system, std::string condition, std::vector<double> scores);

/// Grid of systems x conditions over the given utterances.
ReportTable evaluate_grid(const std::vector<EvalSystem>& systems,
                          const std::vector<corruption::CorruptionSpec>& conditions,
                          const std::vector<Utterance>& utterances, const EvalOptions& options);

enum class ReportFormat { kCsv, kJson };

void emit_report(const ReportTable& table, const std::filesystem::path& path, ReportFormat format);
std::string report_csv(const ReportTable& table);
nlohmann::json report_json(const ReportTable& table);
ReportTable parse_report_json(const nlohmann::json& j);
ReportTable read_report_json(const std::filesystem::path& path);

struct ExperimentConfig {
  std::filesystem::path dataset_root;
  std::uint64_t split_seed = 1337;
  std::size_t n_eval_utts = 100;
  std::vector<std::string> systems{"MEL", "AE", "SAR"};
  std::vector<corruption::CorruptionSpec> conditions;  // default grid when empty
  std::map<std::string, std::string> checkpoints;
  std::filesystem::path output_dir = "sarlab_out";
  bool train_first = false;
  sar::TrainConfig train;
  sar::SarConfig model;
  std::size_t max_train_utts = 0;  // 0 uses the whole training split
  double sar_alpha_max = 0.2;
  bool corrupt_mel_for_latent = false;
  bool write_wavs = false;
  std::size_t griffin_lim_iters = 60;
  int threads = 1;
  std::uint64_t seed = 1337;
};

/// raw, mask 0.1, mask 0.2, SNR 15 dB, SNR 10 dB, all seeded with `seed`.
std::vector<corruption::CorruptionSpec> default_conditions(std::uint64_t seed);

/// Relative paths are resolved against `base_dir`. Conditions without a
/// "seed" inherit the top-level seed.
ExperimentConfig parse_experiment_config(const nlohmann::json& j,
                                         const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

using Logger = std::function<void(const std::string&)>;

/// Loads (or, with train_first, trains) the AE/SAR checkpoints, evaluates the
/// grid on the first n_eval_utts test utterances and writes report.csv and
/// report.json to output_dir.
ReportTable run_table_experiment(const ExperimentConfig& config, const Logger& log = {});
ReportTable run_table_experiment(const std::filesystem::path& config_file, const Logger& log = {});

/// Trains one model on the manifest's training split (helper shared by the
/// experiment and the CLI).
sar::TrainResult train_on_split(const Manifest& manifest, const SplitSpec& split,
                                const sar::TrainConfig& train, const sar::SarConfig& model,
                                std::size_t max_train_utts, const Logger& log = {});

/// Log-mel features of the listed utterances, in order.
std::vector<sar::FeatureMatrix> load_features(const Manifest& manifest,
                                              const std::vector<std::string>& ids);

}  // namespace sarlab::harness
