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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "deepfdaf/error.h"
#include "deepfdaf/training.h"

namespace deepfdaf::training {
namespace {

constexpr std::uint64_t kShuffleStream = 0x5348;

struct ItemResult {
  double loss = 0.0;
  std::vector<double> grad;
  std::exception_ptr error;
};

void run_item(const TrainingSequence& seq,
              const neural::NetworkParameters& params,
              const neural::NormalizationStats& stats, const LossConfig& cfg,
              ItemResult& out) {
  try {
    LossResult r = sequence_loss(seq, params, stats, cfg);
    out.loss = r.loss;
    out.grad = gradient(r.trace);
  } catch (...) {
    out.error = std::current_exception();
  }
}

}  // namespace

neural::NormalizationStats estimate_sequence_normalization(
    std::span<const TrainingSequence> corpus, const FrameDims& dims,
    double eps, double sigma_floor) {
  neural::NormalizationAccumulator acc(dims, eps);
  for (const TrainingSequence& seq : corpus) {
    spectral::FrameBuffer frames(dims);
    for (std::size_t b = 0; b < seq.num_blocks; ++b) {
      const std::span<const double> x(seq.x.data() + b * dims.hop, dims.hop);
      const std::span<const double> y(seq.y.data() + b * dims.hop, dims.hop);
      acc.add(frames.push(x), y);
    }
  }
  return acc.finalize(sigma_floor);
}

TrainResult train(std::span<const TrainingSequence> corpus,
                  const neural::NormalizationStats& stats,
                  neural::NetworkParameters& params, OptimizerState& opt,
                  const TrainConfig& config, const EpochCallback& on_epoch) {
  if (corpus.empty()) {
    throw Error(ErrorKind::kInvalidInput, "training corpus is empty");
  }
  if (config.batch_size == 0) {
    throw Error(ErrorKind::kInvalidConfig, "batch_size must be positive");
  }
  if (opt.m.size() != params.size()) opt = make_optimizer_state(params.size());

  std::ofstream log_file;
  if (!config.log_path.empty()) {
    const bool fresh = !std::filesystem::exists(config.log_path);
    log_file.open(config.log_path, std::ios::app);
    if (!log_file) {
      throw Error(ErrorKind::kIo,
                  "cannot open training log " + config.log_path.string());
    }
    if (fresh) log_file << "epoch,mean_loss,grad_norm,wall_time_s,steps\n";
  }

  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  TrainResult result;
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t e = 0; e < config.epochs; ++e) {
    const std::size_t epoch = config.first_epoch + e;
    const auto start = std::chrono::steady_clock::now();
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(scenario::derive_seed(config.seed, kShuffleStream, epoch));
    std::shuffle(order.begin(), order.end(), rng);

    EpochLog entry;
    entry.epoch = epoch;
    double loss_sum = 0.0;
    double norm_sum = 0.0;
    for (std::size_t first = 0; first < order.size();
         first += config.batch_size) {
      const std::size_t count =
          std::min(config.batch_size, order.size() - first);
      std::vector<ItemResult> items(count);
      for (std::size_t i = 0; i < count; i += threads) {
        std::vector<std::thread> pool;
        const std::size_t end = std::min(count, i + threads);
        for (std::size_t j = i + 1; j < end; ++j) {
          pool.emplace_back(run_item, std::cref(corpus[order[first + j]]),
                            std::cref(params), std::cref(stats),
                            std::cref(config.loss), std::ref(items[j]));
        }
        run_item(corpus[order[first + i]], params, stats, config.loss,
                 items[i]);
        for (auto& t : pool) t.join();
      }
      std::vector<double> grad(params.size(), 0.0);
      for (const ItemResult& item : items) {
        if (item.error) std::rethrow_exception(item.error);
        loss_sum += item.loss;
        for (std::size_t p = 0; p < grad.size(); ++p) grad[p] += item.grad[p];
      }
      for (double& g : grad) g /= static_cast<double>(count);
      try {
        norm_sum += adam_update(opt, params, grad, config.adam);
      } catch (const TrainingDiverged&) {
        throw TrainingDiverged(0, "non-finite gradient in epoch " +
                                      std::to_string(epoch));
      }
      ++entry.optimizer_steps;
    }
    entry.mean_loss = loss_sum / static_cast<double>(corpus.size());
    entry.grad_norm = norm_sum / static_cast<double>(entry.optimizer_steps);
    entry.wall_time_s = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    result.log.push_back(entry);
    result.epochs_completed = e + 1;
    if (log_file) {
      log_file << entry.epoch << ',' << entry.mean_loss << ','
               << entry.grad_norm << ',' << entry.wall_time_s << ','
               << entry.optimizer_steps << '\n';
      log_file.flush();
    }
    if (on_epoch) on_epoch(entry, params, opt);
  }
  return result;
}

}  // namespace deepfdaf::training
