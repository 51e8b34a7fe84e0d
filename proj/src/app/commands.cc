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

#include "deepfdaf/app.h"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>
#include <thread>

#include "deepfdaf/error.h"
#include "deepfdaf/training.h"
#include "deepfdaf/wav.h"

namespace deepfdaf::app {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIo, "cannot create directory " + dir.string());
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, v);
  return buf;
}

std::string scenario_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scenario_%04zu", i);
  return buf;
}

double mean_of(std::span<const double> v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool needs_network(const std::string& name, const io::RunConfig& config) {
  const io::ControllerSpec spec = io::parse_controller(name, config.kalman_a);
  return spec.kind == io::ControllerSpec::Kind::kMasked &&
         control::uses_network(spec.variant);
}

std::vector<double> read_raw_f64(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  if (bytes.empty() || bytes.size() % sizeof(double) != 0) {
    throw Error(ErrorKind::kInvalidInput,
                path.string() + ": expected raw little-endian doubles");
  }
  std::vector<double> v(bytes.size() / sizeof(double));
  std::memcpy(v.data(), bytes.data(), bytes.size());
  return v;
}

void write_gnuplot(const fs::path& out_dir,
                   const std::vector<std::string>& controllers) {
  std::ofstream gp(out_dir / "plot.gp");
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set terminal pngcairo size 1000,700\n"
     << "set output 'nesd_zp.png'\n"
     << "set xlabel 'time [s]'\nset ylabel 'NESD_ZP [dB]'\n"
     << "plot ";
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    gp << (i ? ", \\\n     " : "") << "'" << controllers[i]
       << "_aggregate.csv' using 2:3 with lines title '" << controllers[i]
       << "'";
  }
  gp << "\nset output 'erle.png'\nset ylabel 'ERLE [dB]'\nplot ";
  for (std::size_t i = 0; i < controllers.size(); ++i) {
    gp << (i ? ", \\\n     " : "") << "'" << controllers[i]
       << "_aggregate.csv' using 2:4 with lines title '" << controllers[i]
       << "'";
  }
  gp << '\n';
}

}  // namespace

std::unique_ptr<pipeline::StepSizeController> make_controller(
    const std::string& name, const io::RunConfig& config,
    std::shared_ptr<const pipeline::MaskNetwork> network) {
  const io::ControllerSpec spec = io::parse_controller(name, config.kalman_a);
  switch (spec.kind) {
    case io::ControllerSpec::Kind::kFdaf:
      return std::make_unique<pipeline::FixedFdafController>(
          config.frame, config.mu_fdaf, config.lambda_x, config.reg);
    case io::ControllerSpec::Kind::kKalman:
      return std::make_unique<pipeline::KalmanController>(
          config.frame, spec.kalman_a, config.psi_dw_init,
          config.noise_smoothing, config.reg);
    case io::ControllerSpec::Kind::kMasked:
      break;
  }
  if (control::uses_network(spec.variant) && !network) {
    throw Error(ErrorKind::kInvalidConfig,
                "controller " + name + " requires a checkpoint");
  }
  return std::make_unique<pipeline::MaskedFdafController>(
      config.frame, spec.variant, config.masked_params(spec.variant),
      control::uses_network(spec.variant) ? network : nullptr);
}

std::shared_ptr<const pipeline::MaskNetwork> load_network(
    const fs::path& checkpoint, const io::RunConfig& config) {
  io::Checkpoint c = io::load_checkpoint(checkpoint);
  if (!(c.frame == config.frame)) {
    throw Error(ErrorKind::kInvalidConfig,
                "checkpoint frame (M=" + std::to_string(c.frame.fft_size) +
                    ", R=" + std::to_string(c.frame.hop) +
                    ") does not match the config");
  }
  auto net = std::make_shared<pipeline::MaskNetwork>();
  net->params = std::move(c.params);
  net->stats = std::move(c.stats);
  net->eps = config.log_floor;
  return net;
}

RunOutput run_scenario(const scenario::Scenario& s,
                       std::unique_ptr<pipeline::StepSizeController> controller,
                       double erle_smoothing) {
  const std::size_t r = s.dims.hop;
  const std::size_t blocks = s.num_blocks();
  pipeline::BlockProcessor proc(s.dims, std::move(controller));
  metrics::ErleTracker erle(erle_smoothing);
  RunOutput out;
  out.series.block_period_s = static_cast<double>(r) / s.sample_rate;
  out.series.nesd_zp_db.reserve(blocks);
  out.series.erle_db.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::span<const double> x(s.x.data() + b * r, r);
    const pipeline::BlockOutput bo = proc.process(x, s.mic_block(b));
    out.series.nesd_zp_db.push_back(
        metrics::nesd_zero_padded_db(s.active_air(b), proc.filter_state().taps));
    out.series.erle_db.push_back(
        erle.update(std::span<const double>(s.d.data() + b * r, r), bo.d_hat));
    if (const control::MaskPair* m = proc.controller().last_masks()) {
      out.mean_m_mu.push_back(mean_of(m->m_mu));
      out.mean_m_e.push_back(mean_of(m->m_e));
    }
  }
  return out;
}

std::vector<fs::path> list_scenarios(const fs::path& dir) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::kInvalidInput,
                "scenario directory not found: " + dir.string());
  }
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "meta.json")) {
      out.push_back(entry.path());
    }
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) {
    throw Error(ErrorKind::kInvalidInput, "no scenarios in " + dir.string());
  }
  return out;
}

void write_manifest(const fs::path& path, const std::string& command,
                    const io::RunConfig& config,
                    const std::vector<std::pair<std::string, std::string>>& extra) {
  json m = {
      {"tool", "deepfdaf"},
      {"version", kVersion},
      {"command", command},
      {"config_hash", hex64(io::config_hash(config))},
      {"config", io::serialize_run_config(config)},
      {"seeds",
       {{"scenario", config.scenario_seed},
        {"init", config.init_seed},
        {"training", config.train_seed}}},
  };
  for (const auto& [k, v] : extra) m[k] = v;
  std::ofstream out(path);
  out << m.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
}

void cmd_simulate(const io::RunConfig& config, std::size_t count,
                  const fs::path& out_dir) {
  config.validate();
  ensure_dir(out_dir);
  for (std::size_t i = 0; i < count; ++i) {
    const scenario::Scenario s =
        scenario::build_scenario(config.scenario, config.scenario_seed + i);
    scenario::write_scenario(out_dir / scenario_name(i), s);
  }
  write_manifest(out_dir / "manifest.json", "simulate", config,
                 {{"count", std::to_string(count)}});
}

TrainSummary cmd_train(const io::RunConfig& config, const TrainOptions& opts) {
  config.validate();
  if (opts.checkpoint.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "train: no output checkpoint given");
  }
  const training::TrainConfig base = config.train_config();
  if (!control::uses_network(base.loss.variant)) {
    throw Error(ErrorKind::kInvalidConfig,
                "train: controller " + config.controller + " has no network");
  }
  if (opts.checkpoint.has_parent_path()) ensure_dir(opts.checkpoint.parent_path());

  std::vector<training::TrainingSequence> corpus;
  if (!opts.scenario_dir.empty()) {
    for (const fs::path& dir : list_scenarios(opts.scenario_dir)) {
      const scenario::Scenario s = scenario::read_scenario(dir);
      if (!(s.dims == config.frame)) {
        throw Error(ErrorKind::kInvalidInput,
                    dir.string() + ": frame differs from the config");
      }
      corpus.push_back(training::make_sequence(s));
    }
  } else {
    for (std::size_t i = 0; i < config.corpus_size; ++i) {
      corpus.push_back(training::make_sequence(
          scenario::build_scenario(config.scenario, config.scenario_seed + i)));
    }
  }

  io::Checkpoint ckpt;
  ckpt.frame = config.frame;
  ckpt.variant = control::variant_name(base.loss.variant);
  ckpt.seed = config.init_seed;
  training::OptimizerState opt;
  if (!opts.resume.empty()) {
    io::Checkpoint prev = io::load_checkpoint(opts.resume);
    if (!(prev.frame == config.frame) || prev.params.dims().hidden != config.hidden) {
      throw Error(ErrorKind::kInvalidConfig,
                  "resume checkpoint dimensions differ from the config");
    }
    ckpt.epoch = prev.epoch;
    ckpt.last_loss = prev.last_loss;
    ckpt.stats = std::move(prev.stats);
    ckpt.params = std::move(prev.params);
    opt = prev.optimizer ? std::move(*prev.optimizer)
                         : training::make_optimizer_state(ckpt.params.size());
  } else {
    ckpt.stats = training::estimate_sequence_normalization(
        corpus, config.frame, config.log_floor, config.sigma_floor);
    ckpt.params = neural::initialize_parameters(
        neural::NetworkDims{config.frame.fft_size, config.hidden},
        config.init_seed);
    opt = training::make_optimizer_state(ckpt.params.size());
  }
  ckpt.optimizer = opt;
  io::save_checkpoint(opts.checkpoint, ckpt);

  fs::path log_path = opts.checkpoint;
  log_path += ".log.csv";
  fs::path manifest_path = opts.checkpoint;
  manifest_path += ".manifest.json";
  write_manifest(manifest_path, "train", config,
                 {{"checkpoint", opts.checkpoint.string()},
                  {"scenario_dir", opts.scenario_dir.string()},
                  {"resume", opts.resume.string()}});

  training::TrainConfig tc = base;
  tc.first_epoch = ckpt.epoch;
  tc.epochs = config.epochs > ckpt.epoch ? config.epochs - ckpt.epoch : 0;
  tc.log_path = log_path;
  TrainSummary summary;
  summary.last_loss = ckpt.last_loss;
  neural::NetworkParameters params = ckpt.params;
  training::train(corpus, ckpt.stats, params, opt, tc,
                  [&](const training::EpochLog& log,
                      const neural::NetworkParameters& p,
                      const training::OptimizerState& o) {
                    ckpt.params = p;
                    ckpt.optimizer = o;
                    ckpt.epoch = log.epoch + 1;
                    ckpt.last_loss = log.mean_loss;
                    io::save_checkpoint(opts.checkpoint, ckpt);
                    ++summary.epochs_completed;
                    summary.last_loss = log.mean_loss;
                    std::fprintf(stderr,
                                 "epoch %zu  loss %.4f dB  grad %.3g  %.1f s\n",
                                 log.epoch, log.mean_loss, log.grad_norm,
                                 log.wall_time_s);
                  });
  return summary;
}

std::vector<metrics::MetricSeries> cmd_eval(const io::RunConfig& config,
                                            const EvalOptions& opts) {
  config.validate();
  const std::vector<std::string> controllers =
      opts.controllers.empty() ? config.eval_controllers : opts.controllers;
  if (controllers.empty()) {
    throw Error(ErrorKind::kInvalidConfig, "eval: no controllers selected");
  }
  bool want_net = false;
  for (const auto& name : controllers) want_net |= needs_network(name, config);
  std::shared_ptr<const pipeline::MaskNetwork> network;
  if (want_net) {
    if (opts.checkpoint.empty()) {
      throw Error(ErrorKind::kInvalidConfig,
                  "eval: a checkpoint is required for DNN controllers");
    }
    network = load_network(opts.checkpoint, config);
  }

  std::vector<scenario::Scenario> scenarios;
  std::vector<std::string> ids;
  for (const fs::path& dir : list_scenarios(opts.scenario_dir)) {
    scenarios.push_back(scenario::read_scenario(dir));
    if (!(scenarios.back().dims == config.frame)) {
      throw Error(ErrorKind::kInvalidInput,
                  dir.string() + ": frame differs from the config");
    }
    ids.push_back(dir.filename().string());
  }
  ensure_dir(opts.out_dir);

  const std::size_t pairs = controllers.size() * scenarios.size();
  std::vector<RunOutput> results(pairs);
  std::vector<std::exception_ptr> errors(pairs);
  auto work = [&](std::size_t worker, std::size_t stride) {
    for (std::size_t i = worker; i < pairs; i += stride) {
      const std::size_t c = i / scenarios.size();
      const std::size_t s = i % scenarios.size();
      try {
        results[i] = run_scenario(
            scenarios[s], make_controller(controllers[c], config, network),
            config.erle_smoothing);
        results[i].series.run_id = ids[s];
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, config.threads);
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < threads; ++w) pool.emplace_back(work, w, threads);
  work(0, threads);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<metrics::MetricSeries> aggregates;
  for (std::size_t c = 0; c < controllers.size(); ++c) {
    const std::string& name = controllers[c];
    ensure_dir(opts.out_dir / name);
    std::vector<metrics::MetricSeries> runs;
    std::vector<std::vector<double>> m_mu;
    std::vector<std::vector<double>> m_e;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      RunOutput& r = results[c * scenarios.size() + s];
      metrics::write_series_csv(opts.out_dir / name / (ids[s] + ".csv"), r.series);
      runs.push_back(r.series);
      if (!r.mean_m_mu.empty()) {
        m_mu.push_back(std::move(r.mean_m_mu));
        m_e.push_back(std::move(r.mean_m_e));
      }
    }
    std::size_t shortest = runs.front().nesd_zp_db.size();
    for (const auto& r : runs) shortest = std::min(shortest, r.nesd_zp_db.size());
    for (auto& r : runs) {
      r.nesd_zp_db.resize(shortest);
      r.erle_db.resize(shortest);
    }
    aggregates.push_back(metrics::aggregate_series(runs, name));
    metrics::write_series_csv(opts.out_dir / (name + "_aggregate.csv"),
                              aggregates.back());
    if (!m_mu.empty()) {
      for (auto& v : m_mu) v.resize(shortest);
      for (auto& v : m_e) v.resize(shortest);
      const std::vector<double> mu = metrics::aggregate(m_mu);
      const std::vector<double> me = metrics::aggregate(m_e);
      std::ofstream out(opts.out_dir / (name + "_masks.csv"));
      out << "block_index,mean_m_mu,mean_m_e\n" << std::setprecision(10);
      for (std::size_t b = 0; b < shortest; ++b) {
        out << b << ',' << mu[b] << ',' << me[b] << '\n';
      }
    }
  }
  write_gnuplot(opts.out_dir, controllers);
  std::string list;
  for (const auto& name : controllers) list += (list.empty() ? "" : ",") + name;
  write_manifest(opts.out_dir / "manifest.json", "eval", config,
                 {{"controllers", list},
                  {"scenario_dir", opts.scenario_dir.string()},
                  {"checkpoint", opts.checkpoint.string()}});
  return aggregates;
}

ProcessSummary cmd_process(const io::RunConfig& config,
                           const ProcessOptions& opts) {
  config.validate();
  std::shared_ptr<const pipeline::MaskNetwork> network;
  if (needs_network(config.controller, config)) {
    if (opts.checkpoint.empty()) {
      throw Error(ErrorKind::kInvalidConfig,
                  "process: controller " + config.controller +
                      " requires a checkpoint");
    }
    network = load_network(opts.checkpoint, config);
  }
  const io::WavData x = io::read_wav(opts.x_wav);
  const io::WavData y = io::read_wav(opts.y_wav);
  const double rate = config.scenario.sample_rate;
  for (const io::WavData* w : {&x, &y}) {
    if (std::lround(w->sample_rate) != std::lround(rate)) {
      throw Error(ErrorKind::kInvalidInput,
                  "process: WAV sample rate " + std::to_string(w->sample_rate) +
                      " differs from the configured " + std::to_string(rate));
    }
  }
  if (x.samples.size() != y.samples.size()) {
    throw Error(ErrorKind::kInvalidInput, "process: x and y differ in length");
  }
  std::vector<double> truth;
  if (!opts.truth_air.empty()) {
    truth = read_raw_f64(opts.truth_air);
    if (truth.size() < config.frame.filter_length()) {
      throw Error(ErrorKind::kInvalidInput,
                  "process: truth response shorter than L");
    }
  }
  std::vector<double> echo;
  if (!opts.echo_wav.empty()) {
    echo = io::read_wav(opts.echo_wav).samples;
    if (echo.size() != x.samples.size()) {
      throw Error(ErrorKind::kInvalidInput, "process: echo length mismatch");
    }
  }

  const std::size_t r = config.frame.hop;
  const std::size_t blocks = x.samples.size() / r;
  pipeline::BlockProcessor proc(config.frame,
                                make_controller(config.controller, config, network));
  metrics::ErleTracker erle(config.erle_smoothing);
  metrics::MetricSeries series;
  series.run_id = opts.out_prefix.filename().string();
  series.block_period_s = static_cast<double>(r) / rate;
  std::vector<double> e_track(blocks * r);
  std::vector<double> d_hat_track(blocks * r);
  std::vector<double> times_ms(blocks);
  std::size_t rejected = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::span<const double> xb(x.samples.data() + b * r, r);
    const std::span<const double> yb(y.samples.data() + b * r, r);
    const auto start = std::chrono::steady_clock::now();
    const pipeline::BlockOutput out = proc.process(xb, yb);
    times_ms[b] = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - start)
                      .count();
    if (out.update_rejected) ++rejected;
    std::copy(out.e_block.begin(), out.e_block.end(), e_track.begin() + b * r);
    std::copy(out.d_hat.begin(), out.d_hat.end(), d_hat_track.begin() + b * r);
    if (!truth.empty()) {
      series.nesd_zp_db.push_back(
          metrics::nesd_zero_padded_db(truth, proc.filter_state().taps));
    }
    if (!echo.empty()) {
      series.erle_db.push_back(erle.update(
          std::span<const double>(echo.data() + b * r, r), out.d_hat));
    }
  }

  const std::string prefix = opts.out_prefix.string();
  if (opts.out_prefix.has_parent_path()) ensure_dir(opts.out_prefix.parent_path());
  io::write_wav(prefix + "e.wav", e_track, rate);
  io::write_wav(prefix + "d_hat.wav", d_hat_track, rate);
  {
    std::ofstream t(prefix + "block_times.csv");
    t << "block_index,wall_time_ms\n" << std::setprecision(6);
    for (std::size_t b = 0; b < blocks; ++b) t << b << ',' << times_ms[b] << '\n';
    if (!t) throw Error(ErrorKind::kIo, "cannot write " + prefix + "block_times.csv");
  }
  if (!truth.empty() || !echo.empty()) {
    metrics::write_series_csv(prefix + "metrics.csv", series);
  }

  ProcessSummary summary;
  summary.blocks = blocks;
  summary.rejected_blocks = rejected;
  if (blocks > 0) {
    summary.mean_block_ms = mean_of(times_ms);
    summary.max_block_ms = *std::max_element(times_ms.begin(), times_ms.end());
  }
  write_manifest(prefix + "manifest.json", "process", config,
                 {{"checkpoint", opts.checkpoint.string()},
                  {"x", opts.x_wav.string()},
                  {"y", opts.y_wav.string()},
                  {"mean_block_ms", std::to_string(summary.mean_block_ms)},
                  {"rejected_blocks", std::to_string(rejected)}});
  return summary;
}

std::string cmd_inspect_checkpoint(const fs::path& path) {
  const io::Checkpoint c = io::load_checkpoint(path);
  std::ostringstream out;
  out << "format version   " << c.version << '\n'
      << "frame            M=" << c.frame.fft_size << " R=" << c.frame.hop
      << " L=" << c.frame.filter_length() << '\n'
      << "hidden           P=" << c.params.dims().hidden << '\n'
      << "variant          " << c.variant << '\n'
      << "seed             " << c.seed << '\n'
      << "epochs           " << c.epoch << '\n'
      << "last loss        " << c.last_loss << " dB\n"
      << "parameters       " << c.params.size() << '\n'
      << "optimizer state  "
      << (c.optimizer ? "yes, step " + std::to_string(c.optimizer->step) : "no")
      << '\n';
  out << "tensors:\n";
  for (const auto& t : c.params.layout()) {
    const auto v = c.params.tensor(t.name);
    double sq = 0.0;
    for (double x : v) sq += x * x;
    out << "  " << std::left << std::setw(18) << t.name << ' ' << t.rows;
    if (t.cols != 1) out << 'x' << t.cols;
    out << "  rms " << std::sqrt(sq / static_cast<double>(v.size())) << '\n';
  }
  return out.str();
}

}  // namespace deepfdaf::app
