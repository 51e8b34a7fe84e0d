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

#include <cstdio>
#include <string>

#include "deepfdaf/error.h"
#include "deepfdaf/pipeline.h"

namespace deepfdaf::pipeline {

FixedFdafController::FixedFdafController(const FrameDims& dims, double mu_fdaf,
                                         double lambda_x, double reg)
    : mu_(mu_fdaf), lambda_x_(lambda_x), reg_(reg), psi_xx_(dims.fft_size) {
  if (!(mu_fdaf > 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "fdaf: mu_fdaf must be > 0");
  }
}

StepSizeDiag FixedFdafController::compute(const Spectrum& x_spec,
                                          const Spectrum& /*e_spec*/) {
  psi_xx_ = control::psd_xx_update(psi_xx_, x_spec, lambda_x_);
  return control::fdaf_step(psi_xx_, mu_, reg_);
}

KalmanController::KalmanController(const FrameDims& dims, double a,
                                   double psi_dw_init, double noise_smoothing,
                                   double reg)
    : overlap_ratio_(dims.overlap_ratio()),
      noise_smoothing_(noise_smoothing),
      reg_(reg),
      state_(control::initial_kalman_state(dims, a, psi_dw_init)) {}

std::string KalmanController::name() const {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "kf_%g", state_.a);
  return buf;
}

StepSizeDiag KalmanController::compute(const Spectrum& x_spec,
                                       const Spectrum& /*e_spec*/) {
  return control::kalman_step(state_, x_spec, overlap_ratio_, reg_);
}

void KalmanController::observe_update(const Spectrum& x_spec,
                                      const Spectrum& e_spec,
                                      const StepSizeDiag& step,
                                      const filter::FilterState& updated) {
  state_ = control::kalman_predict_correct(state_, step, x_spec, updated.w_hat,
                                           e_spec, overlap_ratio_,
                                           noise_smoothing_);
}

MaskedFdafController::MaskedFdafController(
    const FrameDims& dims, control::Variant variant,
    const control::MaskedFdafParams& params,
    std::shared_ptr<const MaskNetwork> network)
    : dims_(dims),
      variant_(variant),
      params_(params),
      network_(std::move(network)),
      state_(control::initial_masked_state(dims)) {
  const bool needs_net = params_.step_mask == control::MaskSource::kNetwork ||
                         params_.error_mask == control::MaskSource::kNetwork;
  if (needs_net) {
    if (!network_) {
      throw Error(ErrorKind::kInvalidConfig,
                  std::string(control::variant_name(variant)) +
                      " requires a trained network");
    }
    if (network_->params.dims().fft_size != dims.fft_size) {
      throw Error(ErrorKind::kInvalidDimension,
                  "network fft_size does not match the frame size");
    }
    recurrent_ = neural::initial_recurrent_state(network_->params.dims());
  }
}

StepSizeDiag MaskedFdafController::compute(const Spectrum& x_spec,
                                           const Spectrum& e_spec) {
  const control::MaskPair* net_masks = nullptr;
  neural::ForwardResult fwd;
  if (!recurrent_.h1.empty()) {
    const std::vector<double> feat = neural::compute_features(
        e_spec, x_spec, network_->stats, network_->eps);
    fwd = neural::forward(network_->params, recurrent_, feat);
    recurrent_ = std::move(fwd.state);
    net_masks = &fwd.masks;
  }
  control::MaskedStep step = control::masked_fdaf_step(
      state_, x_spec, e_spec, net_masks, params_, dims_.overlap_ratio());
  state_ = std::move(step.next);
  masks_ = std::move(step.applied);
  return std::move(step.step);
}

BlockProcessor::BlockProcessor(const FrameDims& dims,
                               std::unique_ptr<StepSizeController> controller)
    : dims_(dims),
      controller_(std::move(controller)),
      frames_(dims),
      state_(filter::initial_state(dims)) {}

BlockOutput BlockProcessor::process(std::span<const double> x_block,
                                    std::span<const double> y_block) {
  const Spectrum x_spec = spectral::analyze(frames_.push(x_block));
  filter::PriorError pe = filter::prior_error(state_, x_spec, y_block, dims_);
  const StepSizeDiag step = controller_->compute(x_spec, pe.e_spec);
  state_ = filter::update(state_, step, x_spec, pe.e_spec, dims_);
  if (!state_.last_update_rejected) {
    controller_->observe_update(x_spec, pe.e_spec, step, state_);
  }
  BlockOutput out;
  out.d_hat = std::move(pe.d_hat);
  out.e_block = std::move(pe.e_block);
  out.update_rejected = state_.last_update_rejected;
  return out;
}

}  // namespace deepfdaf::pipeline
