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

#include "deepfdaf/adaptive_filter.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "deepfdaf/error.h"

namespace deepfdaf::filter {
namespace {

void check_spectrum(const Spectrum& s, const FrameDims& dims,
                    const char* what) {
  if (s.size() != dims.fft_size) {
    throw Error(ErrorKind::kInvalidDimension,
                std::string(what) + ": spectrum size " +
                    std::to_string(s.size()) + " != fft_size " +
                    std::to_string(dims.fft_size));
  }
}

bool all_finite(std::span<const Complex> v) {
  return std::all_of(v.begin(), v.end(), [](const Complex& c) {
    return std::isfinite(c.real()) && std::isfinite(c.imag());
  });
}

}  // namespace

FilterState initial_state(const FrameDims& dims) {
  dims.validate();
  FilterState state;
  state.w_hat = Spectrum(dims.fft_size);
  state.taps.assign(dims.filter_length(), 0.0);
  return state;
}

PriorError prior_error(const FilterState& state, const Spectrum& x_spec,
                       std::span<const double> y_block, const FrameDims& dims) {
  check_spectrum(x_spec, dims, "prior_error x");
  check_spectrum(state.w_hat, dims, "prior_error w_hat");
  if (y_block.size() != dims.hop) {
    throw Error(ErrorKind::kInvalidDimension,
                "prior_error: y block length " +
                    std::to_string(y_block.size()) + " != hop " +
                    std::to_string(dims.hop));
  }
  PriorError out;
  out.d_hat = spectral::overlap_save_convolve(x_spec, state.w_hat, dims.hop);
  out.e_block.resize(dims.hop);
  for (std::size_t i = 0; i < dims.hop; ++i) {
    out.e_block[i] = y_block[i] - out.d_hat[i];
  }
  out.e_spec = spectral::analyze_front_padded(out.e_block, dims.fft_size);
  return out;
}

FilterState update(const FilterState& state, const StepSizeDiag& step,
                   const Spectrum& x_spec, const Spectrum& e_spec,
                   const FrameDims& dims) {
  check_spectrum(x_spec, dims, "update x");
  check_spectrum(e_spec, dims, "update e");
  check_spectrum(state.w_hat, dims, "update w_hat");
  if (step.size() != dims.fft_size) {
    throw Error(ErrorKind::kInvalidDimension, "update: step-size size mismatch");
  }
  const auto mu = step.values();
  const bool finite =
      all_finite(x_spec.bins()) && all_finite(e_spec.bins()) &&
      std::all_of(mu.begin(), mu.end(),
                  [](double v) { return std::isfinite(v); });
  if (!finite) {
    FilterState rejected = state;
    rejected.last_update_rejected = true;
    return rejected;
  }
  if (std::any_of(mu.begin(), mu.end(), [](double v) { return v < 0.0; })) {
    throw Error(ErrorKind::kInvalidInput, "update: negative step-size");
  }

  Spectrum unconstrained(dims.fft_size);
  auto v = unconstrained.bins();
  const auto w = state.w_hat.bins();
  const auto x = x_spec.bins();
  const auto e = e_spec.bins();
  for (std::size_t k = 0; k < v.size(); ++k) {
    v[k] = w[k] + mu[k] * std::conj(x[k]) * e[k];
  }
  // w_hat already satisfies the constraint, so projecting the sum equals
  // w_hat + Q3 * gradient.
  std::vector<double> td = spectral::synthesize(unconstrained);
  td.resize(dims.filter_length());

  FilterState next;
  next.w_hat = spectral::filter_spectrum(td, dims.fft_size);
  next.taps = std::move(td);
  next.block_index = state.block_index + 1;
  return next;
}

}  // namespace deepfdaf::filter
