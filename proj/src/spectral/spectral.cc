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

#include "deepfdaf/spectral.h"

#include <algorithm>
#include <string>

#include "deepfdaf/error.h"
#include "spectral/fft.h"

namespace deepfdaf {

void FrameDims::validate() const {
  if (fft_size < 2 || fft_size % 2 != 0) {
    throw Error(ErrorKind::kInvalidDimension,
                "fft_size must be even and >= 2, got " +
                    std::to_string(fft_size));
  }
  if (hop == 0 || hop >= fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                "hop must satisfy 0 < hop < fft_size, got " +
                    std::to_string(hop));
  }
}

Spectrum::Spectrum(std::size_t fft_size)
    : fft_size_(fft_size), bins_(fft_size / 2 + 1) {
  if (fft_size < 2 || fft_size % 2 != 0) {
    throw Error(ErrorKind::kInvalidDimension,
                "spectrum size must be even, got " + std::to_string(fft_size));
  }
}

Complex Spectrum::operator[](std::size_t m) const {
  if (m < bins_.size()) return bins_[m];
  return std::conj(bins_[fft_size_ - m]);
}

std::vector<Complex> Spectrum::to_full() const {
  std::vector<Complex> full(fft_size_);
  for (std::size_t m = 0; m < fft_size_; ++m) full[m] = (*this)[m];
  return full;
}

namespace spectral {
namespace {

void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw Error(ErrorKind::kInvalidDimension,
                std::string(what) + ": expected length " +
                    std::to_string(expected) + ", got " +
                    std::to_string(actual));
  }
}

}  // namespace

Spectrum analyze(std::span<const double> frame) {
  Spectrum out(frame.size());
  RealFft::get(frame.size()).forward(frame, out.bins());
  return out;
}

std::vector<double> synthesize(const Spectrum& spectrum) {
  std::vector<double> out(spectrum.size());
  RealFft::get(spectrum.size()).inverse(spectrum.bins(), out);
  return out;
}

std::vector<double> overlap_save_convolve(const Spectrum& x, const Spectrum& w,
                                          std::size_t hop) {
  require_size(w.size(), x.size(), "overlap_save_convolve filter");
  if (hop == 0 || hop >= x.size()) {
    throw Error(ErrorKind::kInvalidDimension, "overlap_save_convolve: bad hop");
  }
  Spectrum product(x.size());
  auto p = product.bins();
  auto xb = x.bins();
  auto wb = w.bins();
  for (std::size_t k = 0; k < p.size(); ++k) p[k] = xb[k] * wb[k];
  const std::vector<double> circular = synthesize(product);
  return {circular.end() - static_cast<std::ptrdiff_t>(hop), circular.end()};
}

Spectrum enforce_fir_constraint(const Spectrum& w, std::size_t hop) {
  if (hop == 0 || hop >= w.size()) {
    throw Error(ErrorKind::kInvalidDimension, "enforce_fir_constraint: bad hop");
  }
  std::vector<double> taps = synthesize(w);
  std::fill(taps.end() - static_cast<std::ptrdiff_t>(hop), taps.end(), 0.0);
  return analyze(taps);
}

std::vector<Complex> select_nonredundant(const Spectrum& s) {
  return {s.bins().begin(), s.bins().end()};
}

Spectrum mirror_to_full(std::span<const Complex> half) {
  if (half.size() < 2) {
    throw Error(ErrorKind::kInvalidDimension,
                "mirror_to_full needs at least 2 bins");
  }
  Spectrum out(2 * (half.size() - 1));
  auto b = out.bins();
  std::copy(half.begin(), half.end(), b.begin());
  b.front() = b.front().real();
  b.back() = b.back().real();
  return out;
}

Spectrum analyze_front_padded(std::span<const double> block,
                              std::size_t fft_size) {
  if (block.size() == 0 || block.size() >= fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                "analyze_front_padded: block longer than frame");
  }
  std::vector<double> frame(fft_size, 0.0);
  std::copy(block.begin(), block.end(),
            frame.end() - static_cast<std::ptrdiff_t>(block.size()));
  return analyze(frame);
}

std::vector<double> filter_taps(const Spectrum& w, std::size_t hop) {
  std::vector<double> td = synthesize(w);
  td.resize(w.size() - hop);
  return td;
}

Spectrum filter_spectrum(std::span<const double> taps, std::size_t fft_size) {
  if (taps.size() > fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                "filter_spectrum: more taps than fft_size");
  }
  std::vector<double> frame(fft_size, 0.0);
  std::copy(taps.begin(), taps.end(), frame.begin());
  return analyze(frame);
}

void analyze_adjoint(std::span<const Complex> grad_bins,
                     std::span<double> grad_frame) {
  const std::size_t n = grad_frame.size();
  require_size(grad_bins.size(), n / 2 + 1, "analyze_adjoint");
  // dL/dx[n] = Re sum_k g_k exp(+2 pi i k n / N) over the stored bins only;
  // a c2r of g/2 on interior bins double-counts them back.
  std::vector<Complex> half(grad_bins.begin(), grad_bins.end());
  for (std::size_t k = 1; k + 1 < half.size(); ++k) half[k] *= 0.5;
  RealFft::get(n).inverse(half, grad_frame);
  for (double& v : grad_frame) v *= static_cast<double>(n);
}

void synthesize_adjoint(std::span<const double> grad_frame,
                        std::span<Complex> grad_bins) {
  const std::size_t n = grad_frame.size();
  require_size(grad_bins.size(), n / 2 + 1, "synthesize_adjoint");
  RealFft::get(n).forward(grad_frame, grad_bins);
  const double edge = 1.0 / static_cast<double>(n);
  const double interior = 2.0 / static_cast<double>(n);
  grad_bins.front() = grad_bins.front().real() * edge;
  grad_bins.back() = grad_bins.back().real() * edge;
  for (std::size_t k = 1; k + 1 < grad_bins.size(); ++k) {
    grad_bins[k] *= interior;
  }
}

FrameBuffer::FrameBuffer(const FrameDims& dims)
    : dims_(dims), frame_(dims.fft_size, 0.0) {
  dims_.validate();
}

std::span<const double> FrameBuffer::push(std::span<const double> block) {
  require_size(block.size(), dims_.hop, "FrameBuffer::push");
  std::copy(frame_.begin() + static_cast<std::ptrdiff_t>(dims_.hop),
            frame_.end(), frame_.begin());
  std::copy(block.begin(), block.end(),
            frame_.end() - static_cast<std::ptrdiff_t>(dims_.hop));
  return frame_;
}

void FrameBuffer::reset() { std::fill(frame_.begin(), frame_.end(), 0.0); }

}  // namespace spectral
}  // namespace deepfdaf
