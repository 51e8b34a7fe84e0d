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

#include <algorithm>
#include <cmath>
#include <string>

#include "deepfdaf/error.h"
#include "deepfdaf/neural.h"

namespace deepfdaf::neural {

void NetworkDims::validate() const {
  if (fft_size < 2 || fft_size % 2 != 0) {
    throw Error(ErrorKind::kInvalidDimension,
                "network fft_size must be even, got " +
                    std::to_string(fft_size));
  }
  if (hidden == 0) {
    throw Error(ErrorKind::kInvalidDimension, "network hidden size must be > 0");
  }
}

NormalizationStats identity_stats(std::size_t feature_size) {
  return {std::vector<double>(feature_size, 0.0),
          std::vector<double>(feature_size, 1.0)};
}

std::vector<double> compute_features(const Spectrum& e_spec,
                                     const Spectrum& x_spec,
                                     const NormalizationStats& stats,
                                     double eps) {
  if (e_spec.size() != x_spec.size()) {
    throw Error(ErrorKind::kInvalidDimension,
                "compute_features: spectrum sizes differ");
  }
  const std::size_t bins = x_spec.num_bins();
  if (stats.nu.size() != 2 * bins || stats.sigma.size() != 2 * bins) {
    throw Error(ErrorKind::kInvalidDimension,
                "compute_features: normalization stats have wrong length");
  }
  std::vector<double> feat(2 * bins);
  auto e = e_spec.bins();
  auto x = x_spec.bins();
  for (std::size_t k = 0; k < bins; ++k) {
    feat[k] = std::log(std::max(std::norm(e[k]), eps));
    feat[bins + k] = std::log(std::max(std::norm(x[k]), eps));
  }
  for (std::size_t j = 0; j < feat.size(); ++j) {
    feat[j] = (feat[j] - stats.nu[j]) / stats.sigma[j];
  }
  return feat;
}

NormalizationAccumulator::NormalizationAccumulator(const FrameDims& dims,
                                                   double eps)
    : dims_(dims),
      eps_(eps),
      mean_(dims.fft_size + 2, 0.0),
      m2_(dims.fft_size + 2, 0.0) {
  dims_.validate();
}

void NormalizationAccumulator::add(std::span<const double> x_frame,
                                   std::span<const double> y_block) {
  if (x_frame.size() != dims_.fft_size || y_block.size() != dims_.hop) {
    throw Error(ErrorKind::kInvalidDimension,
                "NormalizationAccumulator::add: block size mismatch");
  }
  const Spectrum x = spectral::analyze(x_frame);
  const Spectrum mic = spectral::analyze_front_padded(y_block, dims_.fft_size);
  const std::vector<double> raw =
      compute_features(mic, x, identity_stats(mean_.size()), eps_);
  ++count_;
  const double n = static_cast<double>(count_);
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const double delta = raw[j] - mean_[j];
    mean_[j] += delta / n;
    m2_[j] += delta * (raw[j] - mean_[j]);
  }
}

NormalizationStats NormalizationAccumulator::finalize(
    double sigma_floor) const {
  if (count_ == 0) {
    throw Error(ErrorKind::kInvalidInput,
                "estimate_normalization: empty corpus");
  }
  NormalizationStats stats;
  stats.nu = mean_;
  stats.sigma.resize(m2_.size());
  for (std::size_t j = 0; j < m2_.size(); ++j) {
    stats.sigma[j] =
        std::max(std::sqrt(m2_[j] / static_cast<double>(count_)), sigma_floor);
  }
  return stats;
}

NormalizationStats estimate_normalization(
    std::span<const ObservationBlock> corpus, const FrameDims& dims,
    double eps, double sigma_floor) {
  NormalizationAccumulator acc(dims, eps);
  for (const ObservationBlock& block : corpus) {
    acc.add(block.x_frame, block.y_block);
  }
  return acc.finalize(sigma_floor);
}

}  // namespace deepfdaf::neural
