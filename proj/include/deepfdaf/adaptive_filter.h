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

#ifndef DEEPFDAF_ADAPTIVE_FILTER_H_
#define DEEPFDAF_ADAPTIVE_FILTER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "deepfdaf/spectral.h"

namespace deepfdaf::filter {

// Frequency-domain adaptive filter estimate. `w_hat` always corresponds to a
// zero-padded L-tap FIR; `taps` caches those L taps.
struct FilterState {
  Spectrum w_hat;
  std::vector<double> taps;
  std::uint64_t block_index = 0;
  bool last_update_rejected = false;
};

FilterState initial_state(const FrameDims& dims);

struct PriorError {
  Spectrum e_spec;            // F_M [0; y - d_hat]
  std::vector<double> d_hat;  // echo estimate, R samples
  std::vector<double> e_block;
};

// Error of the block against the previous estimate.
PriorError prior_error(const FilterState& state, const Spectrum& x_spec,
                       std::span<const double> y_block, const FrameDims& dims);

// w_hat + Q3 (step .* conj(x) .* e). A non-finite input leaves the state
// unchanged with `last_update_rejected` set. Negative step-sizes throw
// kInvalidInput.
FilterState update(const FilterState& state, const StepSizeDiag& step,
                   const Spectrum& x_spec, const Spectrum& e_spec,
                   const FrameDims& dims);

}  // namespace deepfdaf::filter

#endif  // DEEPFDAF_ADAPTIVE_FILTER_H_
