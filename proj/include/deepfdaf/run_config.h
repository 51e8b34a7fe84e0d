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

#ifndef DEEPFDAF_RUN_CONFIG_H_
#define DEEPFDAF_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "deepfdaf/controllers.h"
#include "deepfdaf/scenario.h"
#include "deepfdaf/spectral.h"
#include "deepfdaf/training.h"

namespace deepfdaf::io {

// Parsed controller name: "fdaf", "kf" (uses the configured A), "kf_<A>",
// or one of the masked FDAF variant names.
struct ControllerSpec {
  enum class Kind { kFdaf, kKalman, kMasked };
  Kind kind = Kind::kFdaf;
  double kalman_a = 0.0;
  control::Variant variant = control::Variant::kEaFdaf;
};

// Throws kInvalidConfig for unknown names.
ControllerSpec parse_controller(const std::string& name, double default_a);

// Every tunable of a command line run. Loaded from an INI file with the
// sections [frame], [control], [kalman], [network], [training], [scenario],
// [metrics] and [eval]; unknown sections or keys are rejected.
struct RunConfig {
  FrameDims frame{256, 128};

  std::string controller = "dnn_fdaf";
  double mu_fdaf = 0.5;
  double lambda_x = 0.5;
  std::optional<double> lambda_p;  // overrides the variant default
  std::optional<double> mu_max;
  double reg = control::kDefaultRegularization;

  double kalman_a = 0.99;
  double psi_dw_init = 1.0;
  double noise_smoothing = 0.5;

  std::size_t hidden = 32;
  double log_floor = neural::kDefaultLogFloor;
  double sigma_floor = neural::kDefaultSigmaFloor;
  std::uint64_t init_seed = 1;

  std::size_t epochs = 10;
  std::size_t batch_size = 4;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double clip_norm = 10.0;
  std::size_t truncation = 0;
  std::size_t frozen_prefix = 0;
  double loss_floor = 1e-8;
  std::uint64_t train_seed = 1;
  std::size_t threads = 1;
  std::size_t corpus_size = 200;  // on-the-fly training scenarios

  scenario::ScenarioConfig scenario;  // dims mirror `frame`
  std::uint64_t scenario_seed = 1000;

  double erle_smoothing = 0.99;

  std::vector<std::string> eval_controllers = {"fdaf", "kf_0.99", "dnn_fdaf"};

  // Throws kInvalidConfig.
  void validate() const;
  control::MaskedFdafParams masked_params(control::Variant v) const;
  training::LossConfig loss_config() const;
  training::TrainConfig train_config() const;
};

RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
// Sets one "section.key" field from its text value. Call validate() once all
// overrides are applied, since related fields may change together.
void apply_override(RunConfig& c, const std::string& dotted_key,
                    const std::string& value);
// Canonical text; parse_run_config(serialize_run_config(c)) == c.
std::string serialize_run_config(const RunConfig& c);
bool operator==(const RunConfig& a, const RunConfig& b);

// FNV-1a over the canonical text.
std::uint64_t config_hash(const RunConfig& c);

}  // namespace deepfdaf::io

#endif  // DEEPFDAF_RUN_CONFIG_H_
