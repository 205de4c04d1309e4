// corruption/corruption.cpp

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

#include "sarlab/corruption/corruption.hpp"

#include <cstdio>

#include "sarlab/dsp/resample.hpp"

namespace sarlab::corruption {

std::string kind_name(Kind kind) {
  switch (kind) {
    case Kind::kNone: return "none";
    case Kind::kWhiteNoise: return "white_noise";
    case Kind::kMask: return "mask";
    case Kind::kBandLimit: return "band_limit";
  }
  return "none";
}

void CorruptionSpec::validate() const {
  switch (kind) {
    case Kind::kNone: return;
    case Kind::kWhiteNoise:
      if (std::isnan(snr_db) || snr_db == -std::numeric_limits<double>::infinity()) {
        throw InvalidArgument("white_noise: snr_db must be finite");
      }
      return;
    case Kind::kMask:
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("mask: alpha must be in [0, 1]");
      return;
    case Kind::kBandLimit:
      if (intermediate_rate <= 0) throw InvalidArgument("band_limit: intermediate_rate must be > 0");
      return;
  }
}

std::string CorruptionSpec::label() const {
  char buf[64];
  switch (kind) {
    case Kind::kNone: return "raw";
    case Kind::kWhiteNoise: std::snprintf(buf, sizeof(buf), "snr%g", snr_db); return buf;
    case Kind::kMask: std::snprintf(buf, sizeof(buf), "mask%g", alpha); return buf;
    case Kind::kBandLimit: return "band" + std::to_string(intermediate_rate);
  }
  return "raw";
}

void to_json(nlohmann::json& j, const CorruptionSpec& s) {
  j = nlohmann::json{{"kind", kind_name(s.kind)}};
  switch (s.kind) {
    case Kind::kNone: break;
    case Kind::kWhiteNoise: j["snr_db"] = s.snr_db; break;
    case Kind::kMask: j["alpha"] = s.alpha; break;
    case Kind::kBandLimit: j["intermediate_rate"] = s.intermediate_rate; break;
  }
  j["seed"] = s.seed;
}

void from_json(const nlohmann::json& j, CorruptionSpec& s) {
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) {
    throw InvalidArgument("corruption spec needs a string \"kind\"");
  }
  const std::string kind = j["kind"].get<std::string>();
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw InvalidArgument("corruption spec '" + kind + "' needs numeric \"" + key + "\"");
    }
    return j[key].get<double>();
  };
  s = CorruptionSpec{};
  if (kind == "none") {
  } else if (kind == "white_noise") {
    s.kind = Kind::kWhiteNoise;
    s.snr_db = number("snr_db");
  } else if (kind == "mask") {
    s.kind = Kind::kMask;
    s.alpha = number("alpha");
  } else if (kind == "band_limit") {
    s.kind = Kind::kBandLimit;
    const double rate = number("intermediate_rate");
    if (rate != std::floor(rate)) throw InvalidArgument("band_limit: rate must be an integer");
    s.intermediate_rate = static_cast<int>(rate);
  } else {
    throw InvalidArgument("unknown corruption kind '" + kind + "'");
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) {
      throw InvalidArgument("corruption spec: seed must be a non-negative integer");
    }
    s.seed = j["seed"].get<std::uint64_t>();
  }
  s.validate();
}

dsp::AudioClip degrade_bandwidth(const dsp::AudioClip& clip, int intermediate_rate) {
  if (intermediate_rate <= 0 || intermediate_rate >= clip.sample_rate) {
    throw InvalidArgument("degrade_bandwidth: intermediate rate " +
                          std::to_string(intermediate_rate) + " must be below " +
                          std::to_string(clip.sample_rate));
  }
  dsp::AudioClip out = dsp::resample(dsp::resample(clip, intermediate_rate), clip.sample_rate);
  out.samples.resize(clip.samples.size(), 0.0);
  return out;
}

dsp::AudioClip corrupt(const dsp::AudioClip& clip, const CorruptionSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case Kind::kNone: return clip;
    case Kind::kBandLimit: return degrade_bandwidth(clip, spec.intermediate_rate);
    default: break;
  }
  throw InvalidArgument(kind_name(spec.kind) + " corruption applies to feature matrices, not audio");
}

}  // namespace sarlab::corruption
