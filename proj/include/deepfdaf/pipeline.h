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

#ifndef DEEPFDAF_PIPELINE_H_
#define DEEPFDAF_PIPELINE_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "deepfdaf/adaptive_filter.h"
#include "deepfdaf/controllers.h"
#include "deepfdaf/neural.h"
#include "deepfdaf/spectral.h"

namespace deepfdaf::pipeline {

// Stateful producer of one step-size diagonal per block.
class StepSizeController {
 public:
  virtual ~StepSizeController() = default;

  virtual std::string name() const = 0;
  virtual StepSizeDiag compute(const Spectrum& x_spec,
                               const Spectrum& e_spec) = 0;
  // Called after the filter update of the block.
  virtual void observe_update(const Spectrum& /*x_spec*/,
                              const Spectrum& /*e_spec*/,
                              const StepSizeDiag& /*step*/,
                              const filter::FilterState& /*updated*/) {}
  // Masks applied in the last compute(), if any.
  virtual const control::MaskPair* last_masks() const { return nullptr; }
};

class FixedFdafController : public StepSizeController {
 public:
  FixedFdafController(const FrameDims& dims, double mu_fdaf, double lambda_x,
                      double reg = control::kDefaultRegularization);

  std::string name() const override { return "fdaf"; }
  StepSizeDiag compute(const Spectrum& x_spec, const Spectrum& e_spec) override;

 private:
  double mu_;
  double lambda_x_;
  double reg_;
  PsdDiag psi_xx_;
};

class KalmanController : public StepSizeController {
 public:
  KalmanController(const FrameDims& dims, double a, double psi_dw_init,
                   double noise_smoothing,
                   double reg = control::kDefaultRegularization);

  std::string name() const override;
  StepSizeDiag compute(const Spectrum& x_spec, const Spectrum& e_spec) override;
  void observe_update(const Spectrum& x_spec, const Spectrum& e_spec,
                      const StepSizeDiag& step,
                      const filter::FilterState& updated) override;

  const control::KalmanState& state() const { return state_; }

 private:
  double overlap_ratio_;
  double noise_smoothing_;
  double reg_;
  control::KalmanState state_;
};

// Trained network and the feature normalization it was trained with.
struct MaskNetwork {
  neural::NetworkParameters params;
  neural::NormalizationStats stats;
  double eps = neural::kDefaultLogFloor;
};

// EA-FDAF and the DNN-FDAF variants. `network` may be null only when the
// parameters use no network mask.
class MaskedFdafController : public StepSizeController {
 public:
  MaskedFdafController(const FrameDims& dims, control::Variant variant,
                       const control::MaskedFdafParams& params,
                       std::shared_ptr<const MaskNetwork> network);

  std::string name() const override { return control::variant_name(variant_); }
  StepSizeDiag compute(const Spectrum& x_spec, const Spectrum& e_spec) override;
  const control::MaskPair* last_masks() const override { return &masks_; }

 private:
  FrameDims dims_;
  control::Variant variant_;
  control::MaskedFdafParams params_;
  std::shared_ptr<const MaskNetwork> network_;
  control::MaskedFdafState state_;
  neural::RecurrentState recurrent_;
  control::MaskPair masks_;
};

struct BlockOutput {
  std::vector<double> d_hat;
  std::vector<double> e_block;
  bool update_rejected = false;
};

// One adaptive filter stream: prior error, step-size, filter update.
class BlockProcessor {
 public:
  BlockProcessor(const FrameDims& dims,
                 std::unique_ptr<StepSizeController> controller);

  // Consumes R new input and microphone samples.
  BlockOutput process(std::span<const double> x_block,
                      std::span<const double> y_block);

  const filter::FilterState& filter_state() const { return state_; }
  const StepSizeController& controller() const { return *controller_; }
  const FrameDims& dims() const { return dims_; }

 private:
  FrameDims dims_;
  std::unique_ptr<StepSizeController> controller_;
  spectral::FrameBuffer frames_;
  filter::FilterState state_;
};

}  // namespace deepfdaf::pipeline

#endif  // DEEPFDAF_PIPELINE_H_
