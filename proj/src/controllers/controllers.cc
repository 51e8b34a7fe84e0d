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

#include "deepfdaf/controllers.h"

#include <cmath>
#include <string>

#include "deepfdaf/error.h"

namespace deepfdaf::control {
namespace {

template <typename Tag>
void require_bins(const BinDiag<Tag>& d, std::size_t fft_size,
                  const char* what) {
  if (d.size() != fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                std::string(what) + ": size " + std::to_string(d.size()) +
                    " != " + std::to_string(fft_size));
  }
}

void require_spectrum(const Spectrum& s, std::size_t fft_size,
                      const char* what) {
  if (s.size() != fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                std::string(what) + ": spectrum size mismatch");
  }
}

std::vector<double> constant_mask(std::size_t n, MaskSource src) {
  return std::vector<double>(n, src == MaskSource::kOne ? 1.0 : 0.0);
}

}  // namespace

KalmanState initial_kalman_state(const FrameDims& dims, double a,
                                 double psi_dw_init) {
  if (!(a > 0.0 && a <= 1.0)) {
    throw Error(ErrorKind::kInvalidConfig, "kalman: A must lie in (0, 1]");
  }
  if (!(psi_dw_init >= 0.0) || !std::isfinite(psi_dw_init)) {
    throw Error(ErrorKind::kInvalidConfig,
                "kalman: initial uncertainty must be finite and >= 0");
  }
  KalmanState ks;
  ks.psi_dw = PsdDiag(dims.fft_size, psi_dw_init);
  ks.psi_nn = PsdDiag(dims.fft_size, 0.0);
  ks.a = a;
  return ks;
}

StepSizeDiag fdaf_step(const PsdDiag& psi_xx, double mu_fdaf, double reg) {
  if (!(mu_fdaf > 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "fdaf_step: mu_fdaf must be > 0");
  }
  StepSizeDiag step(psi_xx.size());
  auto out = step.values();
  auto p = psi_xx.values();
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = mu_fdaf / (p[k] + reg);
  return step;
}

StepSizeDiag kalman_step(const KalmanState& ks, const Spectrum& x_spec,
                         double overlap_ratio, double reg) {
  require_bins(ks.psi_dw, x_spec.size(), "kalman_step psi_dw");
  require_bins(ks.psi_nn, x_spec.size(), "kalman_step psi_nn");
  StepSizeDiag step(x_spec.size());
  auto out = step.values();
  auto dw = ks.psi_dw.values();
  auto nn = ks.psi_nn.values();
  auto x = x_spec.bins();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = dw[k] / (std::norm(x[k]) * dw[k] + overlap_ratio * nn[k] + reg);
  }
  return step;
}

KalmanState kalman_predict_correct(const KalmanState& ks,
                                   const StepSizeDiag& step,
                                   const Spectrum& x_spec,
                                   const Spectrum& w_hat,
                                   const Spectrum& e_spec,
                                   double overlap_ratio,
                                   double noise_smoothing) {
  const std::size_t m = x_spec.size();
  require_bins(ks.psi_dw, m, "kalman_predict_correct psi_dw");
  require_bins(step, m, "kalman_predict_correct step");
  require_spectrum(w_hat, m, "kalman_predict_correct w_hat");
  require_spectrum(e_spec, m, "kalman_predict_correct e");
  KalmanState next = ks;
  auto dw = next.psi_dw.values();
  auto nn = next.psi_nn.values();
  auto mu = step.values();
  auto x = x_spec.bins();
  auto w = w_hat.bins();
  auto e = e_spec.bins();
  const double a2 = ks.a * ks.a;
  const double inv_ratio = 1.0 / overlap_ratio;
  for (std::size_t k = 0; k < dw.size(); ++k) {
    const double corrected =
        (1.0 - mu[k] * std::norm(x[k]) * inv_ratio) * dw[k];
    dw[k] = a2 * corrected + (1.0 - a2) * std::norm(w[k]);
    nn[k] = noise_smoothing * nn[k] +
            (1.0 - noise_smoothing) * std::norm(e[k]) * inv_ratio;
  }
  return next;
}

PsdDiag psd_xx_update(const PsdDiag& prev, const Spectrum& x_spec,
                      double lambda_x) {
  require_bins(prev, x_spec.size(), "psd_xx_update");
  PsdDiag next(prev.size());
  auto out = next.values();
  auto p = prev.values();
  auto x = x_spec.bins();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = lambda_x * p[k] + (1.0 - lambda_x) * std::norm(x[k]);
  }
  return next;
}

void validate_mask(std::span<const double> mask, std::size_t num_bins) {
  if (mask.size() != num_bins) {
    throw Error(ErrorKind::kInvalidMask,
                "mask length " + std::to_string(mask.size()) + " != " +
                    std::to_string(num_bins));
  }
  for (double v : mask) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorKind::kInvalidMask, "mask entry outside [0, 1]");
    }
  }
}

PsdDiag masked_error_psd(const PsdDiag& prev, const Spectrum& e_spec,
                         std::span<const double> m_e, double lambda_p) {
  require_bins(prev, e_spec.size(), "masked_error_psd");
  validate_mask(m_e, e_spec.num_bins());
  PsdDiag next(prev.size());
  auto out = next.values();
  auto p = prev.values();
  auto e = e_spec.bins();
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double masked = m_e[k] * m_e[k] * std::norm(e[k]);
    out[k] = lambda_p * p[k] + (1.0 - lambda_p) * masked;
  }
  return next;
}

StepSizeDiag dnn_fdaf_step(const PsdDiag& psi_xx, const PsdDiag& psi_pp,
                           std::span<const double> m_mu, double mu_max,
                           double overlap_ratio, double reg) {
  require_bins(psi_pp, psi_xx.size(), "dnn_fdaf_step psi_pp");
  validate_mask(m_mu, psi_xx.num_bins());
  if (!(mu_max >= 0.0)) {
    throw Error(ErrorKind::kInvalidConfig, "dnn_fdaf_step: mu_max must be >= 0");
  }
  StepSizeDiag step(psi_xx.size());
  auto out = step.values();
  auto xx = psi_xx.values();
  auto pp = psi_pp.values();
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = mu_max * m_mu[k] / (xx[k] + overlap_ratio * pp[k] + reg);
  }
  return step;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::kEaFdaf: return "ea_fdaf";
    case Variant::kDnnNoErrorMask: return "dnn_fdaf_no_me";
    case Variant::kDnnUnitStepMask: return "dnn_fdaf_mmu1";
    case Variant::kDnnFdaf: return "dnn_fdaf";
  }
  return "?";
}

Variant parse_variant(const std::string& name) {
  for (Variant v : {Variant::kEaFdaf, Variant::kDnnNoErrorMask,
                    Variant::kDnnUnitStepMask, Variant::kDnnFdaf}) {
    if (name == variant_name(v)) return v;
  }
  throw Error(ErrorKind::kInvalidConfig, "unknown masked-FDAF variant: " + name);
}

bool uses_network(Variant v) { return v != Variant::kEaFdaf; }

MaskedFdafParams variant_params(Variant v) {
  MaskedFdafParams p;
  p.lambda_x = 0.5;
  switch (v) {
    case Variant::kEaFdaf:
      p.lambda_p = 0.5;
      p.mu_max = 0.75;
      p.step_mask = MaskSource::kOne;
      p.error_mask = MaskSource::kOne;
      break;
    case Variant::kDnnNoErrorMask:
      p.lambda_p = 0.0;
      p.mu_max = 1.0;
      p.step_mask = MaskSource::kNetwork;
      p.error_mask = MaskSource::kZero;
      break;
    case Variant::kDnnUnitStepMask:
      p.lambda_p = 0.0;
      p.mu_max = 0.5;
      p.step_mask = MaskSource::kOne;
      p.error_mask = MaskSource::kNetwork;
      break;
    case Variant::kDnnFdaf:
      p.lambda_p = 0.0;
      p.mu_max = 1.0;
      p.step_mask = MaskSource::kNetwork;
      p.error_mask = MaskSource::kNetwork;
      break;
  }
  return p;
}

MaskedFdafState initial_masked_state(const FrameDims& dims) {
  return {PsdDiag(dims.fft_size, 0.0), PsdDiag(dims.fft_size, 0.0)};
}

MaskedStep masked_fdaf_step(const MaskedFdafState& state,
                            const Spectrum& x_spec, const Spectrum& e_spec,
                            const MaskPair* network_masks,
                            const MaskedFdafParams& params,
                            double overlap_ratio) {
  const std::size_t bins = x_spec.num_bins();
  const bool needs_net = params.step_mask == MaskSource::kNetwork ||
                         params.error_mask == MaskSource::kNetwork;
  if (needs_net && network_masks == nullptr) {
    throw Error(ErrorKind::kInvalidMask,
                "masked_fdaf_step: network masks required");
  }
  MaskedStep out;
  out.applied.m_mu = params.step_mask == MaskSource::kNetwork
                         ? network_masks->m_mu
                         : constant_mask(bins, params.step_mask);
  out.applied.m_e = params.error_mask == MaskSource::kNetwork
                        ? network_masks->m_e
                        : constant_mask(bins, params.error_mask);
  out.next.psi_xx = psd_xx_update(state.psi_xx, x_spec, params.lambda_x);
  out.next.psi_pp = masked_error_psd(state.psi_pp, e_spec, out.applied.m_e,
                                     params.lambda_p);
  out.step = dnn_fdaf_step(out.next.psi_xx, out.next.psi_pp, out.applied.m_mu,
                           params.mu_max, overlap_ratio, params.reg);
  return out;
}

}  // namespace deepfdaf::control
