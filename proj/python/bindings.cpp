// python/bindings.cpp

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

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sarlab/cli/cli.hpp"
#include "sarlab/corruption/corruption.hpp"
#include "sarlab/dsp/audio.hpp"
#include "sarlab/dsp/griffin_lim.hpp"
#include "sarlab/dsp/mel.hpp"
#include "sarlab/dsp/mel_io.hpp"
#include "sarlab/dsp/resample.hpp"
#include "sarlab/dsp/stft.hpp"
#include "sarlab/error.hpp"
#include "sarlab/harness/corpus.hpp"
#include "sarlab/harness/dataset.hpp"
#include "sarlab/harness/experiment.hpp"
#include "sarlab/metrics/estoi.hpp"
#include "sarlab/nn/rng.hpp"
#include "sarlab/sar/checkpoint.hpp"
#include "sarlab/sar/model.hpp"
#include "sarlab/sar/train.hpp"

namespace py = pybind11;
using namespace sarlab;
using nlohmann::json;

namespace {

// JSON crosses the boundary as text; the Python wrapper parses it.
json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("bad JSON: ") + e.what());
  }
}

dsp::AudioClip make_clip(std::vector<double> samples, int rate) {
  dsp::AudioClip c;
  c.samples = std::move(samples);
  c.sample_rate = rate;
  return c;
}

py::array_t<double> samples_array(const dsp::AudioClip& c) {
  return py::array_t<double>(static_cast<py::ssize_t>(c.samples.size()), c.samples.data());
}

}  // namespace

PYBIND11_MODULE(_sarlab, m) {
  m.doc() = "sarlab native core";

  static py::exception<InvalidArgument> invalid(m, "InvalidArgument", PyExc_ValueError);
  static py::exception<IoError> io(m, "IoError", PyExc_OSError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidArgument& e) {
      py::set_error(invalid, e.what());
    } catch (const IoError& e) {
      py::set_error(io, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    }
  });

  py::class_<dsp::AudioClip>(m, "AudioClip")
      .def(py::init(&make_clip), py::arg("samples"), py::arg("sample_rate") = 16000)
      .def_property_readonly("samples", &samples_array)
      .def_readwrite("sample_rate", &dsp::AudioClip::sample_rate)
      .def("__len__", [](const dsp::AudioClip& c) { return c.samples.size(); })
      .def("__repr__", [](const dsp::AudioClip& c) {
        return "<AudioClip " + std::to_string(c.samples.size()) + " samples @ " +
               std::to_string(c.sample_rate) + " Hz>";
      });

  py::class_<dsp::MelSpectrogram>(m, "MelSpectrogram")
      .def(py::init([](dsp::RealMatrix frames, int rate, std::size_t hop) {
             return dsp::MelSpectrogram{std::move(frames), rate, hop};
           }),
           py::arg("frames"), py::arg("sample_rate") = 16000, py::arg("hop") = 256)
      .def_readwrite("frames", &dsp::MelSpectrogram::frames)
      .def_readwrite("sample_rate", &dsp::MelSpectrogram::sample_rate)
      .def_readwrite("hop", &dsp::MelSpectrogram::hop)
      .def_property_readonly("num_frames", &dsp::MelSpectrogram::num_frames)
      .def_property_readonly("num_mels", &dsp::MelSpectrogram::num_mels);

  m.def("read_wav", &dsp::read_wav, py::arg("path"));
  m.def("write_wav", &dsp::write_wav, py::arg("clip"), py::arg("path"));
  m.def("read_mel", &dsp::read_mel, py::arg("path"));
  m.def("write_mel", &dsp::write_mel, py::arg("mel"), py::arg("path"));
  m.def("resample", [](const dsp::AudioClip& c, int rate) { return dsp::resample(c, rate); },
        py::arg("clip"), py::arg("target_rate"));
  m.def("mel_spectrogram", py::overload_cast<const dsp::AudioClip&>(&dsp::mel_spectrogram),
        py::arg("clip"));
  m.def("griffin_lim", py::overload_cast<const dsp::MelSpectrogram&, std::size_t>(&dsp::griffin_lim),
        py::arg("mel"), py::arg("iterations") = 60, py::call_guard<py::gil_scoped_release>());
  m.def("stft_roundtrip",
        [](const dsp::AudioClip& c) {
          return dsp::istft(dsp::stft(c, dsp::StftConfig::for_rate(c.sample_rate)));
        },
        py::arg("clip"));

  m.def("estoi", &metrics::estoi, py::arg("reference"), py::arg("degraded"),
        py::call_guard<py::gil_scoped_release>());
  m.def("log_mel_distortion",
        py::overload_cast<const dsp::MelSpectrogram&, const dsp::MelSpectrogram&>(
            &metrics::log_mel_distortion),
        py::arg("reference"), py::arg("degraded"));

  m.def("_corrupt_features",
        [](const nn::Matrix<double>& feat, const std::string& spec) {
          return corruption::corrupt(feat, parse(spec).get<corruption::CorruptionSpec>());
        },
        py::arg("features"), py::arg("spec"));
  m.def("_corrupt_audio",
        [](const dsp::AudioClip& clip, const std::string& spec) {
          return corruption::corrupt(clip, parse(spec).get<corruption::CorruptionSpec>());
        },
        py::arg("clip"), py::arg("spec"));
  m.def("realized_snr_db", &corruption::realized_snr_db<double>, py::arg("clean"),
        py::arg("corrupted"));

  py::class_<sar::SarModel, std::shared_ptr<sar::SarModel>>(m, "SarModel")
      .def_static("_initialise",
                  [](const std::string& cfg, std::uint64_t seed) {
                    return sar::SarModel::initialise(parse(cfg).get<sar::SarConfig>(), seed);
                  })
      .def_property_readonly("_config", [](const sar::SarModel& s) { return json(s.config).dump(); })
      .def("encode",
           [](const sar::SarModel& s, const nn::Matrix<float>& mel) { return sar::encode(mel, s); },
           py::arg("mel"), py::call_guard<py::gil_scoped_release>())
      .def("decode",
           [](const sar::SarModel& s, const nn::Matrix<float>& z) { return sar::decode(z, s); },
           py::arg("z"), py::call_guard<py::gil_scoped_release>())
      .def("save",
           [](const sar::SarModel& s, const std::string& path) { sar::save_checkpoint(s, path); },
           py::arg("path"));
  m.def("load_checkpoint",
        [](const std::string& path) { return sar::load_checkpoint(path); }, py::arg("path"));

  m.def("apply_mask",
        [](const nn::Matrix<float>& z, double alpha, std::uint64_t seed, bool train) {
          nn::SeedableRng rng(seed);
          return sar::apply_mask(z, alpha, rng, train ? sar::MaskMode::kTrain
                                                        : sar::MaskMode::kInference);
        },
        py::arg("z"), py::arg("alpha"), py::arg("seed") = 1337, py::arg("train") = true);

  m.def("_train",
        [](const std::vector<nn::Matrix<float>>& train, const std::vector<nn::Matrix<float>>& val,
           const std::string& train_cfg, const std::string& model_cfg) {
          py::gil_scoped_release release;
          auto r = sar::train_autoencoder(train, val, parse(train_cfg).get<sar::TrainConfig>(),
                                          parse(model_cfg).get<sar::SarConfig>());
          return std::make_pair(std::move(r.model), sar::history_csv(r.history));
        },
        py::arg("train"), py::arg("val"), py::arg("train_config"), py::arg("model_config"));

  m.def("_build_manifest",
        [](const std::string& root) {
          const auto man = harness::build_manifest(root);
          json entries = json::array();
          for (const auto& e : man.entries) {
            entries.push_back({{"id", e.id},
                               {"path", e.path.string()},
                               {"duration", e.duration},
                               {"sample_rate", e.sample_rate}});
          }
          return json{{"name", man.name}, {"entries", entries}, {"skipped", man.skipped}}.dump();
        },
        py::arg("root"));
  m.def("_split_dataset",
        [](const std::string& root, std::uint64_t seed) {
          const auto s = harness::split_dataset(harness::build_manifest(root), seed);
          return json{{"train", s.train}, {"val", s.val}, {"test", s.test}, {"seed", s.seed}}.dump();
        },
        py::arg("root"), py::arg("seed"));
  m.def("write_synthetic_corpus",
        [](const std::string& dir, std::size_t count, std::uint64_t seed) {
          return harness::write_synthetic_corpus(dir, count, seed);
        },
        py::arg("dir"), py::arg("count"), py::arg("seed") = 1337);
  m.def("_run_experiment",
        [](const std::string& config_path) {
          py::gil_scoped_release release;
          return harness::report_json(harness::run_table_experiment(config_path)).dump();
        },
        py::arg("config_path"));

  m.def("run_cli",
        [](std::vector<std::string> args) {
          args.insert(args.begin(), "sarlab");
          std::vector<const char*> argv;
          for (const auto& a : args) argv.push_back(a.c_str());
          std::ostringstream out, err;
          const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
          return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
