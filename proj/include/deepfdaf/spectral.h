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

#ifndef DEEPFDAF_SPECTRAL_H_
#define DEEPFDAF_SPECTRAL_H_

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace deepfdaf {

using Complex = std::complex<double>;

// Block geometry. M = fft_size, R = hop, L = M - R.
struct FrameDims {
  std::size_t fft_size = 0;
  std::size_t hop = 0;

  std::size_t filter_length() const { return fft_size - hop; }
  std::size_t num_bins() const { return fft_size / 2 + 1; }
  double overlap_ratio() const {
    return static_cast<double>(fft_size) / static_cast<double>(hop);
  }

  // Throws kInvalidDimension unless M is even and 0 < R < M.
  void validate() const;

  friend bool operator==(const FrameDims&, const FrameDims&) = default;
};

// DFT of a real M-sample frame. Only the M/2+1 nonredundant bins are stored;
// the upper half is implied by conjugate symmetry, so a Spectrum is always
// conjugate-symmetric.
class Spectrum {
 public:
  Spectrum() = default;
  explicit Spectrum(std::size_t fft_size);

  std::size_t size() const { return fft_size_; }
  std::size_t num_bins() const { return bins_.size(); }

  // Full-index access, m in [0, M).
  Complex operator[](std::size_t m) const;

  std::span<Complex> bins() { return bins_; }
  std::span<const Complex> bins() const { return bins_; }

  std::vector<Complex> to_full() const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  std::size_t fft_size_ = 0;
  std::vector<Complex> bins_;
};

// Real per-bin diagonal (step-sizes, PSDs). Stored on the nonredundant bins
// like Spectrum; full-index access mirrors.
template <typename Tag>
class BinDiag {
 public:
  BinDiag() = default;
  explicit BinDiag(std::size_t fft_size, double fill = 0.0)
      : fft_size_(fft_size), values_(fft_size / 2 + 1, fill) {}

  std::size_t size() const { return fft_size_; }
  std::size_t num_bins() const { return values_.size(); }

  double operator[](std::size_t m) const {
    return m < values_.size() ? values_[m] : values_[fft_size_ - m];
  }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const BinDiag&, const BinDiag&) = default;

 private:
  std::size_t fft_size_ = 0;
  std::vector<double> values_;
};

struct StepSizeTag {};
struct PsdTag {};
using StepSizeDiag = BinDiag<StepSizeTag>;
using PsdDiag = BinDiag<PsdTag>;

namespace spectral {

// F_M * frame. Throws kInvalidDimension for odd or empty frames.
Spectrum analyze(std::span<const double> frame);

// F_M^-1 * spectrum (real by construction).
std::vector<double> synthesize(const Spectrum& spectrum);

// Last R samples of F_M^-1 (x .* w): the valid linear-convolution outputs of
// one overlap-save block.
std::vector<double> overlap_save_convolve(const Spectrum& x, const Spectrum& w,
                                          std::size_t hop);

// Projects w onto spectra of FIR filters whose last R taps are zero.
Spectrum enforce_fir_constraint(const Spectrum& w, std::size_t hop);

std::vector<Complex> select_nonredundant(const Spectrum& s);

// Inverse of select_nonredundant for M = 2 * (half.size() - 1). Imaginary
// parts of the DC and Nyquist bins are discarded.
Spectrum mirror_to_full(std::span<const Complex> half);

// DFT of [zeros(M - R); block].
Spectrum analyze_front_padded(std::span<const double> block,
                              std::size_t fft_size);

// First L taps of F_M^-1 w.
std::vector<double> filter_taps(const Spectrum& w, std::size_t hop);

// DFT of [taps; zeros(M - L)].
Spectrum filter_spectrum(std::span<const double> taps, std::size_t fft_size);

// Reverse-mode adjoints of analyze/synthesize with respect to the real and
// imaginary parts of the stored bins. `grad_bins[k]` holds
// dLoss/dRe + i dLoss/dIm of bin k.
void analyze_adjoint(std::span<const Complex> grad_bins,
                     std::span<double> grad_frame);
void synthesize_adjoint(std::span<const double> grad_frame,
                        std::span<Complex> grad_bins);

// Sliding M-sample input window advanced by R samples per push. Starts as
// all zeros.
class FrameBuffer {
 public:
  explicit FrameBuffer(const FrameDims& dims);

  // Appends one R-sample block, drops the oldest R samples.
  std::span<const double> push(std::span<const double> block);
  std::span<const double> frame() const { return frame_; }
  void reset();

 private:
  FrameDims dims_;
  std::vector<double> frame_;
};

}  // namespace spectral
}  // namespace deepfdaf

#endif  // DEEPFDAF_SPECTRAL_H_
