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

#ifndef DEEPFDAF_CONTROLLERS_H_
#define DEEPFDAF_CONTROLLERS_H_

#include <span>
#include <string>
#include <vector>

#include "deepfdaf/spectral.h"

namespace deepfdaf::control {

// Denominator floor of every step-size quotient.
inline constexpr double kDefaultRegularization = 1e-10;

// Per-bin masks on the M/2+1 nonredundant bins, entries in [0, 1].
struct MaskPair {
  std::vector<double> m_mu;
  std::vector<double> m_e;
};

struct KalmanState {
  PsdDiag psi_dw;  // diag of the estimation-error covariance
  PsdDiag psi_nn;  // noise PSD estimate
  double a = 0.99;  // state transition parameter
};

KalmanState initial_kalman_state(const FrameDims& dims, double a,
                                 double psi_dw_init);

// mu_fdaf / (psi_xx + reg).
StepSizeDiag fdaf_step(const PsdDiag& psi_xx, double mu_fdaf,
                       double reg = kDefaultRegularization);

// psi_dw / (|x|^2 psi_dw + (M/R) psi_nn + reg).
StepSizeDiag kalman_step(const KalmanState& ks, const Spectrum& x_spec,
                         double overlap_ratio,
                         double reg = kDefaultRegularization);

// Correction, prediction and noise-PSD tracking after a filter update.
// `noise_smoothing` is the recursive averaging factor of the noise PSD.
KalmanState kalman_predict_correct(const KalmanState& ks,
                                   const StepSizeDiag& step,
                                   const Spectrum& x_spec,
                                   const Spectrum& w_hat,
                                   const Spectrum& e_spec,
                                   double overlap_ratio,
                                   double noise_smoothing = 0.5);

// lambda_x * prev + (1 - lambda_x) |x|^2.
PsdDiag psd_xx_update(const PsdDiag& prev, const Spectrum& x_spec,
                      double lambda_x);

// lambda_p * prev + (1 - lambda_p) |m_e .* e|^2.
PsdDiag masked_error_psd(const PsdDiag& prev, const Spectrum& e_spec,
                         std::span<const double> m_e, double lambda_p);

// mu_max m_mu / (psi_xx + (M/R) psi_pp + reg).
StepSizeDiag dnn_fdaf_step(const PsdDiag& psi_xx, const PsdDiag& psi_pp,
                           std::span<const double> m_mu, double mu_max,
                           double overlap_ratio,
                           double reg = kDefaultRegularization);

// Throws kInvalidMask if `mask` has the wrong length or leaves [0, 1].
void validate_mask(std::span<const double> mask, std::size_t num_bins);

// Which quantity a mask slot takes: the network output or a constant.
enum class MaskSource { kNetwork, kOne, kZero };

// The masked FDAF family of step-size rules. The EA-FDAF baseline is the
// member with both masks fixed to one.
enum class Variant {
  kEaFdaf,
  kDnnNoErrorMask,    // M^e = 0
  kDnnUnitStepMask,   // M^mu = I
  kDnnFdaf,
};

const char* variant_name(Variant v);
// Accepts ea_fdaf, dnn_fdaf_no_me, dnn_fdaf_mmu1, dnn_fdaf.
Variant parse_variant(const std::string& name);
bool uses_network(Variant v);

struct MaskedFdafParams {
  double lambda_x = 0.5;
  double lambda_p = 0.0;
  double mu_max = 1.0;
  double reg = kDefaultRegularization;
  MaskSource step_mask = MaskSource::kNetwork;
  MaskSource error_mask = MaskSource::kNetwork;
};

// Parameter row of the given variant (lambda_x, lambda_p, mu_max and mask
// sources).
MaskedFdafParams variant_params(Variant v);

struct MaskedFdafState {
  PsdDiag psi_xx;
  PsdDiag psi_pp;
};

MaskedFdafState initial_masked_state(const FrameDims& dims);

struct MaskedStep {
  MaskedFdafState next;
  StepSizeDiag step;
  MaskPair applied;  // masks after substituting constants
};

// One block of the masked step-size rule. `network_masks` may be null when
// neither mask source is kNetwork.
MaskedStep masked_fdaf_step(const MaskedFdafState& state,
                            const Spectrum& x_spec, const Spectrum& e_spec,
                            const MaskPair* network_masks,
                            const MaskedFdafParams& params,
                            double overlap_ratio);

}  // namespace deepfdaf::control

#endif  // DEEPFDAF_CONTROLLERS_H_
