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

#ifndef DEEPFDAF_SCENARIO_H_
#define DEEPFDAF_SCENARIO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "deepfdaf/spectral.h"

namespace deepfdaf::scenario {

enum class SourceKind { kWhite, kAr1Modulated };

const char* source_kind_name(SourceKind kind);
SourceKind parse_source_kind(const std::string& name);

struct ScenarioConfig {
  double sample_rate = 16000.0;
  FrameDims dims{256, 128};
  std::size_t air_length = 512;  // K, must exceed L
  double duration_s = 10.0;
  bool with_switch = true;
  double switch_lo_s = 7.2;
  double switch_hi_s = 8.8;
  bool with_speech_noise = true;
  double speech_snr_lo_db = -10.0;
  double speech_snr_hi_db = 10.0;
  bool with_white_noise = true;
  double white_snr_lo_db = 25.0;
  double white_snr_hi_db = 35.0;
  double t60_lo_s = 0.12;
  double t60_hi_s = 0.78;
  SourceKind input_kind = SourceKind::kAr1Modulated;
  SourceKind noise_kind = SourceKind::kAr1Modulated;
  double input_rms = 0.1;

  std::size_t num_blocks() const;
  // Throws kInvalidConfig.
  void validate() const;
};

// Random quantities drawn for one side of the switch.
struct SegmentDraw {
  std::uint64_t seed = 0;
  double t60_s = 0.0;
  double speech_snr_db = 0.0;
  double white_snr_db = 0.0;
};

struct Scenario {
  double sample_rate = 16000.0;
  FrameDims dims;
  std::uint64_t seed = 0;
  std::size_t switch_block = 0;  // first block using air_post
  SegmentDraw pre;
  SegmentDraw post;
  std::vector<double> air_pre;   // K taps, unit energy
  std::vector<double> air_post;
  std::vector<double> x;  // input
  std::vector<double> d;  // noise-free echo
  std::vector<double> n;  // noise
  std::vector<double> y;  // d + n
  // Noise components before summation; empty for imported scenarios.
  std::vector<double> n_speech;
  std::vector<double> n_white;

  std::size_t num_blocks() const { return x.size() / dims.hop; }
  std::size_t switch_sample() const { return switch_block * dims.hop; }
  const std::vector<double>& active_air(std::size_t block) const {
    return block < switch_block ? air_pre : air_post;
  }
  // Input frame of block b: x[(b+1)R - M, (b+1)R), zeros before the start.
  std::vector<double> input_frame(std::size_t block) const;
  std::span<const double> mic_block(std::size_t block) const;
};

// Stateless 64-bit seed mixing; distinct (base, stream, index) triples give
// independent generator seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          std::uint64_t index = 0);

// Exponentially decaying white-noise response with an onset delay of 8-32
// samples, normalized to unit energy. `t60_s` may be +inf.
std::vector<double> synth_air(std::size_t length, double t60_s,
                              double sample_rate, std::uint64_t seed);

std::vector<double> synth_source(SourceKind kind, std::size_t num_samples,
                                 double sample_rate, std::uint64_t seed);

// Noise scaled so that 10 log10(|clean|^2 / |scaled|^2) = snr_db.
std::vector<double> mix_at_snr(std::span<const double> clean_ref,
                               std::span<const double> noise, double snr_db);

// d[t] = sum_k air(t)[k] x[t-k] with air_pre before `switch_sample` and
// air_post from it on.
std::vector<double> convolve_switched(std::span<const double> x,
                                      std::span<const double> air_pre,
                                      std::span<const double> air_post,
                                      std::size_t switch_sample);

Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed);

// Builds the echo and observation from explicit tracks.
Scenario assemble_scenario(const FrameDims& dims, double sample_rate,
                           std::vector<double> x, std::vector<double> air_pre,
                           std::vector<double> air_post,
                           std::size_t switch_block, std::vector<double> noise);

// Directory with x.wav, y.wav, n.wav (32-bit float), air_pre.f64,
// air_post.f64 (raw little-endian doubles) and meta.json.
void write_scenario(const std::filesystem::path& dir, const Scenario& s);
// Rebuilds d and y from the stored x, n and AIRs.
Scenario read_scenario(const std::filesystem::path& dir);

}  // namespace deepfdaf::scenario

#endif  // DEEPFDAF_SCENARIO_H_
