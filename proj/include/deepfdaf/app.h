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

#ifndef DEEPFDAF_APP_H_
#define DEEPFDAF_APP_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "deepfdaf/checkpoint.h"
#include "deepfdaf/metrics.h"
#include "deepfdaf/pipeline.h"
#include "deepfdaf/run_config.h"
#include "deepfdaf/scenario.h"

namespace deepfdaf::app {

inline constexpr const char* kVersion = "0.1.0";

// Builds the named controller. Masked variants that use the network require
// `network`; throws kInvalidConfig otherwise.
std::unique_ptr<pipeline::StepSizeController> make_controller(
    const std::string& name, const io::RunConfig& config,
    std::shared_ptr<const pipeline::MaskNetwork> network);

// Loads the network of a checkpoint and checks it against the frame config.
std::shared_ptr<const pipeline::MaskNetwork> load_network(
    const std::filesystem::path& checkpoint, const io::RunConfig& config);

struct RunOutput {
  metrics::MetricSeries series;
  // Per-block bin averages of the applied masks; empty for unmasked rules.
  std::vector<double> mean_m_mu;
  std::vector<double> mean_m_e;
};

// Streams one scenario through a controller, tracking NESD_ZP against the
// active K-tap response and ERLE against the noise-free echo.
RunOutput run_scenario(const scenario::Scenario& s,
                       std::unique_ptr<pipeline::StepSizeController> controller,
                       double erle_smoothing);

// Subdirectories holding meta.json, in lexicographic order.
std::vector<std::filesystem::path> list_scenarios(
    const std::filesystem::path& dir);

void write_manifest(const std::filesystem::path& path,
                    const std::string& command, const io::RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>&
                        extra = {});

// Writes `count` scenarios with seeds scenario_seed + i to
// out_dir/scenario_NNNN.
void cmd_simulate(const io::RunConfig& config, std::size_t count,
                  const std::filesystem::path& out_dir);

struct TrainOptions {
  std::filesystem::path scenario_dir;  // empty: generate corpus_size scenarios
  std::filesystem::path checkpoint;    // written after every epoch
  std::filesystem::path resume;        // optional checkpoint to continue
};

struct TrainSummary {
  std::size_t epochs_completed = 0;
  double last_loss = 0.0;
};

// The checkpoint holds the initialization before the first epoch, so a
// divergence leaves the last good state on disk. `config.epochs` is the total
// epoch count; a resumed run only trains the remaining epochs.
TrainSummary cmd_train(const io::RunConfig& config, const TrainOptions& opts);

struct EvalOptions {
  std::vector<std::string> controllers;  // empty: config.eval_controllers
  std::filesystem::path scenario_dir;
  std::filesystem::path checkpoint;
  std::filesystem::path out_dir;
};

// Writes <out>/<controller>/<scenario>.csv, <out>/<controller>_aggregate.csv,
// <out>/<controller>_masks.csv for masked rules, and <out>/plot.gp.
std::vector<metrics::MetricSeries> cmd_eval(const io::RunConfig& config,
                                            const EvalOptions& opts);

struct ProcessOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path x_wav;
  std::filesystem::path y_wav;
  std::filesystem::path out_prefix;
  std::filesystem::path truth_air;  // optional raw f64 response
  std::filesystem::path echo_wav;   // optional noise-free echo for ERLE
};

struct ProcessSummary {
  std::size_t blocks = 0;
  double mean_block_ms = 0.0;
  double max_block_ms = 0.0;
  std::size_t rejected_blocks = 0;  // blocks whose filter update was skipped
};

// Writes <prefix>e.wav, <prefix>d_hat.wav, <prefix>block_times.csv and, with
// a truth response, <prefix>metrics.csv.
ProcessSummary cmd_process(const io::RunConfig& config,
                           const ProcessOptions& opts);

std::string cmd_inspect_checkpoint(const std::filesystem::path& path);

}  // namespace deepfdaf::app

#endif  // DEEPFDAF_APP_H_
