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

#ifndef DEEPFDAF_TRAINING_H_
#define DEEPFDAF_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "deepfdaf/controllers.h"
#include "deepfdaf/neural.h"
#include "deepfdaf/scenario.h"
#include "deepfdaf/spectral.h"

namespace deepfdaf::training {

// |w_true - w_hat|^2 / |w_true|^2. Throws kInvalidInput for a zero truth.
double nesd(std::span<const double> w_true, std::span<const double> w_hat);

struct LossConfig {
  FrameDims dims{256, 128};
  control::Variant variant = control::Variant::kDnnFdaf;
  control::MaskedFdafParams params =
      control::variant_params(control::Variant::kDnnFdaf);
  double eps = neural::kDefaultLogFloor;
  double loss_floor = 1e-8;   // lower bound on the NESD inside the log
  std::size_t truncation = 0;  // BPTT window in blocks, 0 = full sequence
  // Blocks [0, frozen_prefix) run with mu_max = 0.
  std::size_t frozen_prefix = 0;
};

// One training sequence: input, microphone and the truncated true filter
// (first L taps of the active response) before and after the switch.
struct TrainingSequence {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> truth_pre;
  std::vector<double> truth_post;
  std::size_t switch_block = 0;
  std::size_t num_blocks = 0;
};

TrainingSequence make_sequence(const scenario::Scenario& s);

// Intermediates of one block needed by the backward pass.
struct BlockRecord {
  Spectrum x_spec;
  Spectrum e_spec;
  neural::StepCache net;
  control::MaskPair applied;
  std::vector<double> step;
  std::vector<double> denominator;
  std::vector<double> taps;  // filter after the update
  double upsilon = 0.0;
  bool upsilon_floored = false;
  double mu_max = 0.0;
};

struct DifferentiableTrace {
  LossConfig config;
  neural::NetworkParameters params;
  neural::NormalizationStats stats;
  TrainingSequence sequence;
  std::vector<BlockRecord> blocks;
  double loss = 0.0;
};

struct LossResult {
  double loss = 0.0;
  DifferentiableTrace trace;
};

// Runs the masked FDAF over the sequence and returns
// (1/T) sum_t 10 log10(max(NESD_t, loss_floor)) with the full trace.
// Throws TrainingDiverged on a non-finite loss.
LossResult sequence_loss(const TrainingSequence& seq,
                         const neural::NetworkParameters& params,
                         const neural::NormalizationStats& stats,
                         const LossConfig& config);

// Recomputes the loss from the inputs stored in the trace.
double replay(const DifferentiableTrace& trace);

// Reverse-mode gradient of `loss_adjoint * loss` with respect to theta.
std::vector<double> gradient(const DifferentiableTrace& trace,
                             double loss_adjoint = 1.0);

// Feature statistics over every block of every sequence.
neural::NormalizationStats estimate_sequence_normalization(
    std::span<const TrainingSequence> corpus, const FrameDims& dims,
    double eps = neural::kDefaultLogFloor,
    double sigma_floor = neural::kDefaultSigmaFloor);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 10.0;  // global L2 threshold, 0 disables
};

struct OptimizerState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;
};

OptimizerState make_optimizer_state(std::size_t num_params);

// In-place ADAM step with bias correction after optional clipping. Returns
// the gradient norm before clipping.
double adam_update(OptimizerState& opt, neural::NetworkParameters& params,
                   std::span<const double> grad, const AdamConfig& config);

struct TrainConfig {
  LossConfig loss;
  AdamConfig adam;
  std::size_t epochs = 10;
  std::size_t batch_size = 4;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::size_t first_epoch = 0;  // for resumed runs
  std::filesystem::path log_path;  // append-only CSV, empty disables
};

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double grad_norm = 0.0;  // mean pre-clip norm over the epoch's steps
  double wall_time_s = 0.0;
  std::size_t optimizer_steps = 0;
};

struct TrainResult {
  std::vector<EpochLog> log;
  std::size_t epochs_completed = 0;
};

using EpochCallback =
    std::function<void(const EpochLog&, const neural::NetworkParameters&,
                       const OptimizerState&)>;

// Epochs of shuffled mini-batch ADAM. `params` and `opt` are updated in
// place; `on_epoch` runs after every completed epoch. On divergence throws
// TrainingDiverged, leaving params at the last completed step.
TrainResult train(std::span<const TrainingSequence> corpus,
                  const neural::NormalizationStats& stats,
                  neural::NetworkParameters& params, OptimizerState& opt,
                  const TrainConfig& config,
                  const EpochCallback& on_epoch = nullptr);

}  // namespace deepfdaf::training

#endif  // DEEPFDAF_TRAINING_H_
