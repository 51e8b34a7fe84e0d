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

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "deepfdaf/app.h"
#include "deepfdaf/error.h"
#include "deepfdaf/run_config.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDiverged = 4;

int exit_code(deepfdaf::ErrorKind kind) {
  switch (kind) {
    case deepfdaf::ErrorKind::kInvalidConfig:
      return kExitConfig;
    case deepfdaf::ErrorKind::kTrainingDiverged:
    case deepfdaf::ErrorKind::kUpdateRejected:
      return kExitDiverged;
    default:
      return kExitData;
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s + ",") {
    if (c == ',') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else if (c != ' ') {
      item += c;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  namespace fs = std::filesystem;
  using namespace deepfdaf;

  CLI::App cli{"Frequency-domain adaptive filter with learned step-size control"};
  cli.require_subcommand(1);
  cli.set_version_flag("--version", app::kVersion);
  std::string config_path;
  std::vector<std::string> overrides;
  cli.add_option("-c,--config", config_path, "INI run configuration");
  cli.add_option("--set", overrides, "Override as section.key=value")
      ->allow_extra_args(false);

  auto* simulate = cli.add_subcommand("simulate", "Generate scenarios");
  std::size_t count = 1;
  std::string out;
  simulate->add_option("-n,--count", count, "Number of scenarios");
  simulate->add_option("-o,--out", out, "Output directory")->required();

  auto* train = cli.add_subcommand("train", "Train the mask network");
  app::TrainOptions topts;
  train->add_option("-o,--out", topts.checkpoint, "Checkpoint path")->required();
  train->add_option("-s,--scenarios", topts.scenario_dir,
                    "Scenario directory (default: generate on the fly)");
  train->add_option("--resume", topts.resume, "Checkpoint to continue from");

  auto* eval = cli.add_subcommand("eval", "Evaluate controllers on scenarios");
  app::EvalOptions eopts;
  std::string controllers;
  eval->add_option("-s,--scenarios", eopts.scenario_dir, "Scenario directory")
      ->required();
  eval->add_option("-o,--out", eopts.out_dir, "Output directory")->required();
  eval->add_option("--controllers", controllers, "Comma-separated names");
  eval->add_option("--checkpoint", eopts.checkpoint, "Network checkpoint");

  auto* process = cli.add_subcommand("process", "Filter a WAV pair");
  app::ProcessOptions popts;
  process->add_option("--x", popts.x_wav, "Input (far-end) WAV")->required();
  process->add_option("--y", popts.y_wav, "Microphone WAV")->required();
  process->add_option("-o,--out", popts.out_prefix, "Output prefix")->required();
  process->add_option("--checkpoint", popts.checkpoint, "Network checkpoint");
  process->add_option("--truth", popts.truth_air, "True response (raw f64)");
  process->add_option("--echo", popts.echo_wav, "Noise-free echo WAV");

  auto* inspect =
      cli.add_subcommand("inspect-checkpoint", "Describe a checkpoint file");
  std::string ckpt_path;
  inspect->add_option("checkpoint", ckpt_path, "Checkpoint path")->required();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kExitConfig;
  }

  try {
    io::RunConfig config;
    if (!config_path.empty()) config = io::load_run_config(config_path);
    for (const std::string& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos) {
        throw Error(ErrorKind::kInvalidConfig,
                    "--set expects section.key=value, got '" + o + "'");
      }
      io::apply_override(config, o.substr(0, eq), o.substr(eq + 1));
    }
    config.validate();

    if (*simulate) {
      app::cmd_simulate(config, count, out);
    } else if (*train) {
      const app::TrainSummary s = app::cmd_train(config, topts);
      std::printf("trained %zu epochs, last loss %.4f dB\n", s.epochs_completed,
                  s.last_loss);
    } else if (*eval) {
      eopts.controllers = split_list(controllers);
      for (const auto& agg : app::cmd_eval(config, eopts)) {
        double sum = 0.0;
        for (double v : agg.nesd_zp_db) sum += v;
        std::printf("%-16s mean NESD_ZP %.2f dB over %zu blocks\n",
                    agg.run_id.c_str(),
                    sum / static_cast<double>(agg.nesd_zp_db.size()),
                    agg.nesd_zp_db.size());
      }
    } else if (*process) {
      const app::ProcessSummary s = app::cmd_process(config, popts);
      std::printf("%zu blocks, mean %.3f ms/block, max %.3f ms/block\n",
                  s.blocks, s.mean_block_ms, s.max_block_ms);
      if (s.rejected_blocks > 0) {
        std::fprintf(stderr, "warning: %zu blocks had non-finite data\n",
                     s.rejected_blocks);
      }
    } else if (*inspect) {
      std::cout << app::cmd_inspect_checkpoint(ckpt_path);
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitOk;
}
