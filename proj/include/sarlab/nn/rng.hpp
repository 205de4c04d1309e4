// sarlab/nn/rng.hpp

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
#include <initializer_list>
#include <random>
#include <string_view>

namespace sarlab::nn {

/// 64-bit seeded generator. Uniform and normal variates are derived from the
/// raw engine output with fixed formulas, so streams are identical across
/// standard libraries.
class SeedableRng {
 public:
  explicit SeedableRng(std::uint64_t seed = 1337) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Standard normal (Box-Muller; the second variate is cached).
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream; does not advance this generator.
  SeedableRng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Stable seed derived from a base seed and a list of labels (FNV-1a over the
/// labels, mixed with splitmix64).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::string_view> labels);

}  // namespace sarlab::nn
