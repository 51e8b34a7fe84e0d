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

#ifndef DEEPFDAF_NEURAL_H_
#define DEEPFDAF_NEURAL_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "deepfdaf/controllers.h"
#include "deepfdaf/spectral.h"

namespace deepfdaf::neural {

inline constexpr double kDefaultLogFloor = 1e-12;
inline constexpr double kDefaultSigmaFloor = 1e-6;

// Architecture size: FFT size M and recurrent width P.
struct NetworkDims {
  std::size_t fft_size = 0;
  std::size_t hidden = 0;

  std::size_t feature_size() const { return fft_size + 2; }
  std::size_t mask_size() const { return fft_size / 2 + 1; }
  void validate() const;

  friend bool operator==(const NetworkDims&, const NetworkDims&) = default;
};

// Per-element mean and standard deviation of the log-power features.
struct NormalizationStats {
  std::vector<double> nu;
  std::vector<double> sigma;
};

NormalizationStats identity_stats(std::size_t feature_size);

// [(log(max(|u|^2, eps)) - nu) / sigma] for u = [e bins; x bins].
std::vector<double> compute_features(const Spectrum& e_spec,
                                     const Spectrum& x_spec,
                                     const NormalizationStats& stats,
                                     double eps = kDefaultLogFloor);

// Streaming mean/std of unnormalized log-power features. The error half is
// fed with the microphone spectrum F_M [0; y], since no filter is running
// while the statistics are gathered.
class NormalizationAccumulator {
 public:
  NormalizationAccumulator(const FrameDims& dims,
                           double eps = kDefaultLogFloor);

  void add(std::span<const double> x_frame, std::span<const double> y_block);
  std::size_t count() const { return count_; }

  // Population statistics; sigma floored at `sigma_floor`. Throws
  // kInvalidInput if nothing was added.
  NormalizationStats finalize(double sigma_floor = kDefaultSigmaFloor) const;

 private:
  FrameDims dims_;
  double eps_;
  std::size_t count_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

struct ObservationBlock {
  std::span<const double> x_frame;  // M samples
  std::span<const double> y_block;  // R samples
};

NormalizationStats estimate_normalization(
    std::span<const ObservationBlock> corpus, const FrameDims& dims,
    double eps = kDefaultLogFloor, double sigma_floor = kDefaultSigmaFloor);

struct TensorInfo {
  std::string name;
  std::size_t rows = 0;
  std::size_t cols = 0;  // 1 for bias vectors
  std::size_t offset = 0;

  std::size_t size() const { return rows * cols; }
};

// All trainable weights, stored as one flat vector theta. Matrices are
// row-major [rows x cols] with rows = outputs.
//
//   input.{weight,bias}               feature_size -> P, tanh
//   gru{1,2}.{w,u,b}_{update,reset,candidate}
//   head_mu.{weight,bias}, head_e.{weight,bias}   P -> M/2+1, sigmoid
class NetworkParameters {
 public:
  NetworkParameters() = default;
  explicit NetworkParameters(const NetworkDims& dims);

  static std::size_t count(const NetworkDims& dims);
  static std::vector<TensorInfo> make_layout(const NetworkDims& dims);

  const NetworkDims& dims() const { return dims_; }
  std::span<double> flat() { return theta_; }
  std::span<const double> flat() const { return theta_; }
  std::size_t size() const { return theta_.size(); }
  const std::vector<TensorInfo>& layout() const { return layout_; }

  // Throws kInvalidInput for unknown names.
  const TensorInfo& info(std::string_view name) const;
  std::span<double> tensor(std::string_view name);
  std::span<const double> tensor(std::string_view name) const;

  friend bool operator==(const NetworkParameters& a,
                         const NetworkParameters& b) {
    return a.dims_ == b.dims_ && a.theta_ == b.theta_;
  }

 private:
  NetworkDims dims_;
  std::vector<TensorInfo> layout_;
  std::vector<double> theta_;
};

// Weights uniform in +-1/sqrt(fan_in), biases zero.
NetworkParameters initialize_parameters(const NetworkDims& dims,
                                        std::uint64_t seed);

// Rounds every parameter to the nearest float, as stored in checkpoints.
NetworkParameters quantize_f32(const NetworkParameters& params);

struct RecurrentState {
  std::vector<double> h1;
  std::vector<double> h2;
};

RecurrentState initial_recurrent_state(const NetworkDims& dims);

// Activations of one GRU step kept for the backward pass.
struct GruCache {
  std::vector<double> input;
  std::vector<double> h_prev;
  std::vector<double> update;
  std::vector<double> reset;
  std::vector<double> candidate;
  std::vector<double> h;
};

struct StepCache {
  std::vector<double> features;
  std::vector<double> z;
  GruCache gru1;
  GruCache gru2;
  std::vector<double> m_mu;
  std::vector<double> m_e;
};

struct ForwardResult {
  control::MaskPair masks;
  RecurrentState state;
};

// One recurrent step: features -> (M^mu, M^e). Fills `cache` when given.
ForwardResult forward(const NetworkParameters& params,
                      const RecurrentState& state,
                      std::span<const double> features,
                      StepCache* cache = nullptr);

// dLoss/dh1, dLoss/dh2 flowing back into the previous step.
struct RecurrentGrad {
  std::vector<double> h1;
  std::vector<double> h2;
};

RecurrentGrad zero_recurrent_grad(const NetworkDims& dims);

// Backward pass of one forward step. Adds dLoss/dtheta into `grad_theta`,
// replaces `carry` (dLoss/dh of this step's outputs from later steps) with
// dLoss/dh of this step's inputs, and writes dLoss/dfeatures if requested.
void backward(const NetworkParameters& params, const StepCache& cache,
              std::span<const double> grad_m_mu,
              std::span<const double> grad_m_e, RecurrentGrad& carry,
              std::span<double> grad_theta,
              std::vector<double>* grad_features = nullptr);

}  // namespace deepfdaf::neural

#endif  // DEEPFDAF_NEURAL_H_
