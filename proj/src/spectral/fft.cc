/*
 * Copyright 2026 The deepfdaf Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "spectral/fft.h"

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "deepfdaf/error.h"

namespace deepfdaf::spectral {
namespace {

// FFTW's planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex mutex;
  return mutex;
}

}  // namespace

const RealFft& RealFft::get(std::size_t size) {
  static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  std::lock_guard<std::mutex> lock(planner_mutex());
  auto it = cache.find(size);
  if (it == cache.end()) {
    it = cache.emplace(size, std::unique_ptr<RealFft>(new RealFft(size))).first;
  }
  return *it->second;
}

RealFft::RealFft(std::size_t size) : size_(size) {
  if (size < 2 || size % 2 != 0) {
    throw Error(ErrorKind::kInvalidDimension,
                "FFT size must be even and >= 2, got " + std::to_string(size));
  }
  const int n = static_cast<int>(size);
  double* real = fftw_alloc_real(size);
  fftw_complex* cplx = fftw_alloc_complex(size / 2 + 1);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c_1d(n, real, cplx, flags);
  inverse_plan_ = fftw_plan_dft_c2r_1d(n, cplx, real, flags);
  fftw_free(real);
  fftw_free(cplx);
}

RealFft::~RealFft() {
  fftw_destroy_plan(forward_plan_);
  fftw_destroy_plan(inverse_plan_);
}

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) const {
  // r2c does not modify its input.
  fftw_execute_dft_r2c(forward_plan_, const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) const {
  // c2r destroys its input.
  thread_local std::vector<std::complex<double>> scratch;
  scratch.assign(in.begin(), in.end());
  fftw_execute_dft_c2r(inverse_plan_,
                       reinterpret_cast<fftw_complex*>(scratch.data()),
                       out.data());
  const double scale = 1.0 / static_cast<double>(size_);
  for (double& v : out) v *= scale;
}

}  // namespace deepfdaf::spectral
