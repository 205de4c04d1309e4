// sarlab/dsp/fft.hpp

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

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace sarlab::dsp {

/// Real-input FFT of fixed size with one-sided (n/2 + 1) spectra. Not
/// thread-safe; each thread should own its instance.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  std::size_t size() const { return n_; }

  /// `in` may be shorter than n (zero-padded). `out` receives n/2 + 1 bins.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Inverse of forward, scaled by 1/n. `out` receives n samples.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  struct Impl;
  std::size_t n_;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sarlab::dsp
