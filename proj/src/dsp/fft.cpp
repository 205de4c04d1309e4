// dsp/fft.cpp

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

#include "sarlab/dsp/fft.hpp"

#include <algorithm>

#include <unsupported/Eigen/FFT>

#include "sarlab/error.hpp"

namespace sarlab::dsp {

struct RealFft::Impl {
  Eigen::FFT<double> fft;
  std::vector<double> time;
  std::vector<std::complex<double>> freq;
};

RealFft::RealFft(std::size_t n) : n_(n), impl_(std::make_unique<Impl>()) {
  if (n < 2 || (n & (n - 1)) != 0) throw InvalidArgument("FFT size must be a power of two >= 2");
  impl_->fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);
  impl_->time.assign(n, 0.0);
  impl_->freq.assign(n / 2 + 1, {});
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) {
  const std::size_t m = std::min(in.size(), n_);
  std::copy_n(in.begin(), m, impl_->time.begin());
  std::fill(impl_->time.begin() + static_cast<std::ptrdiff_t>(m), impl_->time.end(), 0.0);
  impl_->fft.fwd(impl_->freq, impl_->time);
  std::copy_n(impl_->freq.begin(), std::min(out.size(), impl_->freq.size()), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) {
  std::copy_n(in.begin(), std::min(in.size(), impl_->freq.size()), impl_->freq.begin());
  impl_->fft.inv(impl_->time, impl_->freq, static_cast<Eigen::Index>(n_));
  std::copy_n(impl_->time.begin(), std::min(out.size(), n_), out.begin());
}

}  // namespace sarlab::dsp
