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

#ifndef DEEPFDAF_SPECTRAL_FFT_H_
#define DEEPFDAF_SPECTRAL_FFT_H_

#include <complex>
#include <cstddef>
#include <span>

#include <fftw3.h>

namespace deepfdaf::spectral {

// Real-input FFT of a fixed even size backed by FFTW. Plans are created once
// per size and shared; execution is thread-safe.
class RealFft {
 public:
  static const RealFft& get(std::size_t size);

  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }

  // out[k] = sum_n in[n] exp(-2 pi i k n / N), k = 0..N/2.
  void forward(std::span<const double> in,
               std::span<std::complex<double>> out) const;

  // Normalized inverse (1/N) of a conjugate-symmetric spectrum given by its
  // N/2+1 nonredundant bins.
  void inverse(std::span<const std::complex<double>> in,
               std::span<double> out) const;

 private:
  explicit RealFft(std::size_t size);

  std::size_t size_;
  fftw_plan forward_plan_;
  fftw_plan inverse_plan_;
};

}  // namespace deepfdaf::spectral

#endif  // DEEPFDAF_SPECTRAL_FFT_H_
