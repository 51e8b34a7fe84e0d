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

#include "deepfdaf/error.h"
#include "deepfdaf/training.h"

namespace deepfdaf::training {

OptimizerState make_optimizer_state(std::size_t num_params) {
  OptimizerState s;
  s.m.assign(num_params, 0.0);
  s.v.assign(num_params, 0.0);
  return s;
}

double adam_update(OptimizerState& opt, neural::NetworkParameters& params,
                   std::span<const double> grad, const AdamConfig& config) {
  const std::size_t n = params.size();
  if (grad.size() != n || opt.m.size() != n || opt.v.size() != n) {
    throw Error(ErrorKind::kInvalidDimension, "adam: size mismatch");
  }
  double sq = 0.0;
  for (double g : grad) sq += g * g;
  const double norm = std::sqrt(sq);
  if (!std::isfinite(norm)) {
    throw TrainingDiverged(0, "non-finite gradient");
  }
  const double scale =
      config.clip_norm > 0.0 && norm > config.clip_norm ? config.clip_norm / norm
                                                        : 1.0;
  ++opt.step;
  const double t = static_cast<double>(opt.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  std::span<double> theta = params.flat();
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i] * scale;
    opt.m[i] = config.beta1 * opt.m[i] + (1.0 - config.beta1) * g;
    opt.v[i] = config.beta2 * opt.v[i] + (1.0 - config.beta2) * g * g;
    const double m_hat = opt.m[i] / c1;
    const double v_hat = opt.v[i] / c2;
    theta[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
  return norm;
}

}  // namespace deepfdaf::training
