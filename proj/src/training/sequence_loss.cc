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

#include <cmath>
#include <numbers>
#include <string>

#include "deepfdaf/adaptive_filter.h"
#include "deepfdaf/error.h"
#include "deepfdaf/training.h"

namespace deepfdaf::training {
namespace {

bool network_drives(const control::MaskedFdafParams& p) {
  return p.step_mask == control::MaskSource::kNetwork ||
         p.error_mask == control::MaskSource::kNetwork;
}

void check_sequence(const TrainingSequence& seq, const FrameDims& dims) {
  dims.validate();
  const std::size_t l = dims.filter_length();
  if (seq.num_blocks == 0) {
    throw Error(ErrorKind::kInvalidInput, "training sequence has no blocks");
  }
  if (seq.x.size() < seq.num_blocks * dims.hop ||
      seq.y.size() < seq.num_blocks * dims.hop) {
    throw Error(ErrorKind::kInvalidDimension,
                "training sequence shorter than num_blocks * hop");
  }
  if (seq.truth_pre.size() != l || seq.truth_post.size() != l) {
    throw Error(ErrorKind::kInvalidDimension,
                "true filters must have L = " + std::to_string(l) + " taps");
  }
}

template <typename T>
bool all_finite(std::span<const T> v) {
  for (const T& x : v) {
    if constexpr (std::is_same_v<T, Complex>) {
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    } else {
      if (!std::isfinite(x)) return false;
    }
  }
  return true;
}

bool all_finite(std::span<const Complex> v) { return all_finite<Complex>(v); }
bool all_finite(const std::vector<double>& v) {
  return all_finite<double>(std::span<const double>(v));
}

}  // namespace

double nesd(std::span<const double> w_true, std::span<const double> w_hat) {
  if (w_true.size() != w_hat.size()) {
    throw Error(ErrorKind::kInvalidDimension, "nesd: length mismatch");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < w_true.size(); ++i) {
    const double diff = w_true[i] - w_hat[i];
    num += diff * diff;
    den += w_true[i] * w_true[i];
  }
  if (!(den > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "nesd: true filter has zero norm");
  }
  return num / den;
}

TrainingSequence make_sequence(const scenario::Scenario& s) {
  const std::size_t l = s.dims.filter_length();
  if (s.air_pre.size() < l || s.air_post.size() < l) {
    throw Error(ErrorKind::kInvalidInput, "scenario AIR shorter than L");
  }
  TrainingSequence seq;
  seq.num_blocks = s.num_blocks();
  seq.x.assign(s.x.begin(), s.x.begin() + static_cast<std::ptrdiff_t>(
                                              seq.num_blocks * s.dims.hop));
  seq.y.assign(s.y.begin(), s.y.begin() + static_cast<std::ptrdiff_t>(
                                              seq.num_blocks * s.dims.hop));
  seq.truth_pre.assign(s.air_pre.begin(),
                       s.air_pre.begin() + static_cast<std::ptrdiff_t>(l));
  seq.truth_post.assign(s.air_post.begin(),
                        s.air_post.begin() + static_cast<std::ptrdiff_t>(l));
  seq.switch_block = s.switch_block;
  return seq;
}

LossResult sequence_loss(const TrainingSequence& seq,
                         const neural::NetworkParameters& params,
                         const neural::NormalizationStats& stats,
                         const LossConfig& config) {
  const FrameDims& dims = config.dims;
  check_sequence(seq, dims);
  const bool use_net = network_drives(config.params);
  if (use_net && params.dims().fft_size != dims.fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                "network fft_size does not match the frame size");
  }
  const std::size_t r = dims.hop;
  const double ratio = dims.overlap_ratio();

  LossResult result;
  DifferentiableTrace& trace = result.trace;
  trace.config = config;
  trace.params = params;
  trace.stats = stats;
  trace.sequence = seq;
  trace.blocks.resize(seq.num_blocks);

  spectral::FrameBuffer frames(dims);
  filter::FilterState fs = filter::initial_state(dims);
  control::MaskedFdafState ms = control::initial_masked_state(dims);
  neural::RecurrentState rs;
  if (use_net) rs = neural::initial_recurrent_state(params.dims());

  double sum = 0.0;
  for (std::size_t b = 0; b < seq.num_blocks; ++b) {
    BlockRecord& rec = trace.blocks[b];
    const std::span<const double> x_block(seq.x.data() + b * r, r);
    const std::span<const double> y_block(seq.y.data() + b * r, r);
    rec.x_spec = spectral::analyze(frames.push(x_block));
    filter::PriorError pe = filter::prior_error(fs, rec.x_spec, y_block, dims);
    rec.e_spec = std::move(pe.e_spec);
    if (!all_finite(rec.e_spec.bins())) {
      throw TrainingDiverged(b, "non-finite error spectrum at block " +
                                    std::to_string(b));
    }

    neural::ForwardResult fwd;
    if (use_net) {
      const std::vector<double> feat = neural::compute_features(
          rec.e_spec, rec.x_spec, stats, config.eps);
      fwd = neural::forward(params, rs, feat, &rec.net);
      if (!all_finite(fwd.masks.m_mu) || !all_finite(fwd.masks.m_e)) {
        throw TrainingDiverged(b, "non-finite mask at block " +
                                      std::to_string(b));
      }
      rs = fwd.state;
    }
    control::MaskedFdafParams block_params = config.params;
    if (b < config.frozen_prefix) block_params.mu_max = 0.0;
    rec.mu_max = block_params.mu_max;

    control::MaskedStep step = control::masked_fdaf_step(
        ms, rec.x_spec, rec.e_spec, use_net ? &fwd.masks : nullptr,
        block_params, ratio);
    ms = std::move(step.next);
    rec.applied = std::move(step.applied);
    const auto mu = step.step.values();
    rec.step.assign(mu.begin(), mu.end());
    rec.denominator.resize(rec.step.size());
    const auto xx = ms.psi_xx.values();
    const auto pp = ms.psi_pp.values();
    for (std::size_t k = 0; k < rec.denominator.size(); ++k) {
      rec.denominator[k] = xx[k] + ratio * pp[k] + block_params.reg;
    }

    fs = filter::update(fs, step.step, rec.x_spec, rec.e_spec, dims);
    if (fs.last_update_rejected) {
      throw TrainingDiverged(b, "filter update rejected at block " +
                                    std::to_string(b));
    }
    rec.taps = fs.taps;
    const std::vector<double>& truth =
        b < seq.switch_block ? seq.truth_pre : seq.truth_post;
    rec.upsilon = nesd(truth, rec.taps);
    rec.upsilon_floored = !(rec.upsilon > config.loss_floor);
    const double term =
        10.0 * std::log10(rec.upsilon_floored ? config.loss_floor : rec.upsilon);
    if (!std::isfinite(term)) {
      throw TrainingDiverged(b, "non-finite loss at block " +
                                    std::to_string(b));
    }
    sum += term;
  }
  trace.loss = sum / static_cast<double>(seq.num_blocks);
  result.loss = trace.loss;
  return result;
}

double replay(const DifferentiableTrace& trace) {
  return sequence_loss(trace.sequence, trace.params, trace.stats, trace.config)
      .loss;
}

std::vector<double> gradient(const DifferentiableTrace& trace,
                             double loss_adjoint) {
  const LossConfig& config = trace.config;
  const FrameDims& dims = config.dims;
  const control::MaskedFdafParams& mp = config.params;
  std::vector<double> grad(trace.params.size(), 0.0);
  if (!network_drives(mp) || trace.blocks.empty()) return grad;

  const std::size_t m = dims.fft_size;
  const std::size_t l = dims.filter_length();
  const std::size_t h = dims.num_bins();
  const double ratio = dims.overlap_ratio();
  const std::size_t t_count = trace.blocks.size();
  const double term_scale =
      loss_adjoint / static_cast<double>(t_count) * 10.0 / std::numbers::ln10;
  const bool step_from_net = mp.step_mask == control::MaskSource::kNetwork;
  const bool error_from_net = mp.error_mask == control::MaskSource::kNetwork;
  const TrainingSequence& seq = trace.sequence;

  // Adjoints carried from block b+1 into block b.
  std::vector<Complex> g_w(h);   // filter spectrum after block b
  std::vector<double> g_pp(h, 0.0);  // masked error PSD after block b
  neural::RecurrentGrad carry = neural::zero_recurrent_grad(trace.params.dims());

  std::vector<double> g_taps(l);
  std::vector<double> g_frame(m);
  std::vector<Complex> g_v(h);
  std::vector<Complex> g_e(h);
  std::vector<Complex> g_a(h);
  std::vector<double> g_mmu(h);
  std::vector<double> g_me(h);
  std::vector<double> g_feat;

  for (std::size_t b = t_count; b-- > 0;) {
    const BlockRecord& rec = trace.blocks[b];
    const auto x = rec.x_spec.bins();
    const auto e = rec.e_spec.bins();

    // NESD term and the filter's use in block b+1.
    const std::vector<double>& truth =
        b < seq.switch_block ? seq.truth_pre : seq.truth_post;
    std::fill(g_taps.begin(), g_taps.end(), 0.0);
    if (!rec.upsilon_floored) {
      double truth_energy = 0.0;
      for (double v : truth) truth_energy += v * v;
      const double coef = term_scale / rec.upsilon * (-2.0 / truth_energy);
      for (std::size_t i = 0; i < l; ++i) {
        g_taps[i] = coef * (truth[i] - rec.taps[i]);
      }
    }
    spectral::analyze_adjoint(g_w, g_frame);
    for (std::size_t i = 0; i < l; ++i) g_taps[i] += g_frame[i];

    // taps = first L samples of F^-1 (w_prev + G).
    std::fill(g_frame.begin(), g_frame.end(), 0.0);
    std::copy(g_taps.begin(), g_taps.end(), g_frame.begin());
    spectral::synthesize_adjoint(g_frame, g_v);
    std::vector<Complex> g_w_prev = g_v;

    // G = step .* conj(X) .* E.
    std::fill(g_e.begin(), g_e.end(), Complex{});
    std::fill(g_mmu.begin(), g_mmu.end(), 0.0);
    std::fill(g_me.begin(), g_me.end(), 0.0);
    for (std::size_t k = 0; k < h; ++k) {
      const double g_step = (g_v[k] * x[k] * std::conj(e[k])).real();
      g_e[k] += rec.step[k] * x[k] * g_v[k];
      if (step_from_net) g_mmu[k] = g_step * rec.mu_max / rec.denominator[k];
      const double g_den = -g_step * rec.step[k] / rec.denominator[k];
      const double g_pp_total = g_pp[k] + ratio * g_den;
      const double g_q = (1.0 - mp.lambda_p) * g_pp_total;
      g_pp[k] = mp.lambda_p * g_pp_total;
      const double me = rec.applied.m_e[k];
      if (error_from_net) g_me[k] = g_q * 2.0 * me * std::norm(e[k]);
      g_e[k] += g_q * me * me * 2.0 * e[k];
    }

    neural::backward(trace.params, rec.net, g_mmu, g_me, carry, grad, &g_feat);
    const std::vector<double>& sigma = trace.stats.sigma;
    for (std::size_t k = 0; k < h; ++k) {
      const double power = std::norm(e[k]);
      if (power > config.eps) {
        g_e[k] += 2.0 * g_feat[k] / (sigma[k] * power) * e[k];
      }
    }

    // E = F [0; y - d_hat], d_hat = last R samples of F^-1 (X .* w_prev).
    spectral::analyze_adjoint(g_e, g_frame);
    for (std::size_t i = 0; i < l; ++i) g_frame[i] = 0.0;
    for (std::size_t i = l; i < m; ++i) g_frame[i] = -g_frame[i];
    spectral::synthesize_adjoint(g_frame, g_a);
    for (std::size_t k = 0; k < h; ++k) g_w_prev[k] += std::conj(x[k]) * g_a[k];

    g_w = std::move(g_w_prev);
    if (config.truncation > 0 && b % config.truncation == 0) {
      std::fill(g_w.begin(), g_w.end(), Complex{});
      std::fill(g_pp.begin(), g_pp.end(), 0.0);
      carry = neural::zero_recurrent_grad(trace.params.dims());
    }
  }
  return grad;
}

}  // namespace deepfdaf::training
