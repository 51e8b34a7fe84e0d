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

#include "deepfdaf/scenario.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "deepfdaf/error.h"

namespace deepfdaf::scenario {
namespace {

enum Stream : std::uint64_t {
  kSwitchStream = 0,
  kPreStream = 1,
  kPostStream = 2,
  kDrawStream = 10,
  kAirStream = 11,
  kInputStream = 12,
  kSpeechStream = 13,
  kWhiteStream = 14,
};

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

float to_f32(double v) { return static_cast<float>(v); }

void quantize_f32(std::vector<double>& v) {
  for (double& s : v) s = static_cast<double>(to_f32(s));
}

double energy(std::span<const double> v) {
  double e = 0.0;
  for (double s : v) e += s * s;
  return e;
}

void scale_to_rms(std::vector<double>& v, double rms) {
  const double e = energy(v);
  if (e <= 0.0) return;
  const double g = rms / std::sqrt(e / static_cast<double>(v.size()));
  for (double& s : v) s *= g;
}

// On/off gate with raised-cosine ramps: active 0.8-2.5 s, pauses 0.15-0.6 s.
std::vector<double> pause_gate(std::size_t n, double fs, std::mt19937_64& rng) {
  std::vector<double> gate(n, 0.0);
  const std::size_t ramp = std::max<std::size_t>(1, std::lround(0.01 * fs));
  std::size_t pos = 0;
  while (pos < n) {
    const std::size_t active = std::lround(uniform(rng, 0.8, 2.5) * fs);
    const std::size_t pause = std::lround(uniform(rng, 0.15, 0.6) * fs);
    const std::size_t end = std::min(n, pos + active);
    for (std::size_t t = pos; t < end; ++t) {
      const std::size_t from_start = t - pos;
      const std::size_t to_end = pos + active - 1 - t;
      const std::size_t edge = std::min(from_start, to_end);
      gate[t] = edge >= ramp
                    ? 1.0
                    : 0.5 - 0.5 * std::cos(std::numbers::pi *
                                           static_cast<double>(edge) /
                                           static_cast<double>(ramp));
    }
    pos += active + pause;
  }
  return gate;
}

}  // namespace

const char* source_kind_name(SourceKind kind) {
  return kind == SourceKind::kWhite ? "white" : "ar1_modulated";
}

SourceKind parse_source_kind(const std::string& name) {
  if (name == "white") return SourceKind::kWhite;
  if (name == "ar1_modulated") return SourceKind::kAr1Modulated;
  throw Error(ErrorKind::kInvalidConfig, "unknown source kind '" + name + "'");
}

std::size_t ScenarioConfig::num_blocks() const {
  return static_cast<std::size_t>(
      std::floor(duration_s * sample_rate / static_cast<double>(dims.hop)));
}

void ScenarioConfig::validate() const {
  try {
    dims.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::kInvalidConfig, e.what());
  }
  auto fail = [](const std::string& msg) {
    throw Error(ErrorKind::kInvalidConfig, msg);
  };
  if (!(sample_rate > 0.0)) fail("sample_rate must be positive");
  if (air_length <= dims.filter_length()) fail("air_length K must exceed L");
  if (!(duration_s > 0.0) || num_blocks() == 0) fail("duration too short");
  if (with_switch) {
    if (!(switch_lo_s < switch_hi_s && switch_hi_s < duration_s)) {
      fail("switch window must satisfy lo < hi < duration");
    }
    const double r = static_cast<double>(dims.hop);
    if (std::ceil(switch_lo_s * sample_rate / r) >
        std::floor(switch_hi_s * sample_rate / r)) {
      fail("switch window contains no block boundary");
    }
  }
  if (speech_snr_lo_db > speech_snr_hi_db) fail("empty speech SNR range");
  if (white_snr_lo_db > white_snr_hi_db) fail("empty white SNR range");
  if (!(t60_lo_s > 0.0) || t60_lo_s > t60_hi_s) fail("invalid t60 range");
  if (!(input_rms > 0.0)) fail("input_rms must be positive");
}

std::vector<double> Scenario::input_frame(std::size_t block) const {
  const std::size_t m = dims.fft_size;
  std::vector<double> frame(m, 0.0);
  const std::size_t end = (block + 1) * dims.hop;
  for (std::size_t i = 0; i < m; ++i) {
    if (end + i >= m && end + i - m < x.size()) frame[i] = x[end + i - m];
  }
  return frame;
}

std::span<const double> Scenario::mic_block(std::size_t block) const {
  if ((block + 1) * dims.hop > y.size()) {
    throw Error(ErrorKind::kInvalidDimension, "block index out of range");
  }
  return std::span<const double>(y).subspan(block * dims.hop, dims.hop);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                          std::uint64_t index) {
  std::uint64_t z = splitmix64(base);
  z = splitmix64(z ^ (stream * 0xd1b54a32d192ed03ULL));
  return splitmix64(z ^ (index * 0x8cb92ba72f3d8dd7ULL));
}

std::vector<double> synth_air(std::size_t length, double t60_s,
                              double sample_rate, std::uint64_t seed) {
  if (length == 0) throw Error(ErrorKind::kInvalidInput, "synth_air: K = 0");
  if (!(t60_s > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "synth_air: t60 must be positive");
  }
  std::mt19937_64 rng(seed);
  const std::size_t onset = std::min<std::size_t>(
      length - 1, std::uniform_int_distribution<std::size_t>(8, 32)(rng));
  std::normal_distribution<double> gauss;
  const double rate = 3.0 * std::numbers::ln10 / (t60_s * sample_rate);
  std::vector<double> h(length, 0.0);
  for (std::size_t t = onset; t < length; ++t) {
    const double env =
        std::isinf(t60_s) ? 1.0 : std::exp(-rate * static_cast<double>(t - onset));
    h[t] = gauss(rng) * env;
  }
  const double e = energy(h);
  for (double& v : h) v /= std::sqrt(e);
  return h;
}

std::vector<double> synth_source(SourceKind kind, std::size_t num_samples,
                                 double sample_rate, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<double> out(num_samples);
  if (kind == SourceKind::kWhite) {
    for (double& v : out) v = gauss(rng);
    return out;
  }
  constexpr double kPole = 0.9;
  const double drive = std::sqrt(1.0 - kPole * kPole);
  double state = gauss(rng);
  const double freq = uniform(rng, 0.5, 4.0);
  const double phase = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  const double depth = uniform(rng, 0.3, 0.8);
  const std::vector<double> gate = pause_gate(num_samples, sample_rate, rng);
  for (std::size_t t = 0; t < num_samples; ++t) {
    state = kPole * state + drive * gauss(rng);
    const double env =
        1.0 + depth * std::sin(2.0 * std::numbers::pi * freq *
                                   static_cast<double>(t) / sample_rate +
                               phase);
    out[t] = state * env * gate[t];
  }
  return out;
}

std::vector<double> mix_at_snr(std::span<const double> clean_ref,
                               std::span<const double> noise, double snr_db) {
  const double ec = energy(clean_ref);
  const double en = energy(noise);
  if (!(ec > 0.0) || !(en > 0.0)) {
    throw Error(ErrorKind::kInvalidInput, "mix_at_snr: zero-energy input");
  }
  const double g = std::sqrt(ec / en * std::pow(10.0, -snr_db / 10.0));
  std::vector<double> out(noise.begin(), noise.end());
  for (double& v : out) v *= g;
  return out;
}

std::vector<double> convolve_switched(std::span<const double> x,
                                      std::span<const double> air_pre,
                                      std::span<const double> air_post,
                                      std::size_t switch_sample) {
  std::vector<double> d(x.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    const std::span<const double> h = t < switch_sample ? air_pre : air_post;
    const std::size_t taps = std::min(h.size(), t + 1);
    double acc = 0.0;
    for (std::size_t k = 0; k < taps; ++k) acc += h[k] * x[t - k];
    d[t] = acc;
  }
  return d;
}

Scenario build_scenario(const ScenarioConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t r = cfg.dims.hop;
  const std::size_t blocks = cfg.num_blocks();
  const std::size_t n = blocks * r;

  Scenario s;
  s.sample_rate = cfg.sample_rate;
  s.dims = cfg.dims;
  s.seed = seed;
  if (cfg.with_switch) {
    std::mt19937_64 rng(derive_seed(seed, kSwitchStream));
    const double rr = static_cast<double>(r);
    const auto lo = static_cast<std::size_t>(
        std::ceil(cfg.switch_lo_s * cfg.sample_rate / rr));
    const auto hi = static_cast<std::size_t>(
        std::floor(cfg.switch_hi_s * cfg.sample_rate / rr));
    s.switch_block = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  } else {
    s.switch_block = blocks;
  }
  const std::size_t split = std::min(n, s.switch_block * r);

  auto draw = [&](std::uint64_t stream) {
    SegmentDraw g;
    g.seed = derive_seed(seed, stream);
    std::mt19937_64 rng(derive_seed(g.seed, kDrawStream));
    g.t60_s = uniform(rng, cfg.t60_lo_s, cfg.t60_hi_s);
    g.speech_snr_db = uniform(rng, cfg.speech_snr_lo_db, cfg.speech_snr_hi_db);
    g.white_snr_db = uniform(rng, cfg.white_snr_lo_db, cfg.white_snr_hi_db);
    return g;
  };
  s.pre = draw(kPreStream);
  s.post = cfg.with_switch ? draw(kPostStream) : s.pre;

  s.air_pre = synth_air(cfg.air_length, s.pre.t60_s, cfg.sample_rate,
                        derive_seed(s.pre.seed, kAirStream));
  s.air_post = cfg.with_switch
                   ? synth_air(cfg.air_length, s.post.t60_s, cfg.sample_rate,
                               derive_seed(s.post.seed, kAirStream))
                   : s.air_pre;

  struct Segment {
    std::size_t begin;
    std::size_t end;
    const SegmentDraw* draw;
  };
  std::vector<Segment> segments;
  if (split > 0) segments.push_back({0, split, &s.pre});
  if (split < n) segments.push_back({split, n, &s.post});

  s.x.assign(n, 0.0);
  for (const Segment& seg : segments) {
    std::vector<double> src =
        synth_source(cfg.input_kind, seg.end - seg.begin, cfg.sample_rate,
                     derive_seed(seg.draw->seed, kInputStream));
    scale_to_rms(src, cfg.input_rms);
    std::copy(src.begin(), src.end(), s.x.begin() + seg.begin);
  }
  quantize_f32(s.x);
  s.d = convolve_switched(s.x, s.air_pre, s.air_post, split);

  s.n_speech.assign(n, 0.0);
  s.n_white.assign(n, 0.0);
  for (const Segment& seg : segments) {
    const std::size_t len = seg.end - seg.begin;
    const std::span<const double> clean(s.d.data() + seg.begin, len);
    if (cfg.with_speech_noise) {
      const std::vector<double> raw =
          synth_source(cfg.noise_kind, len, cfg.sample_rate,
                       derive_seed(seg.draw->seed, kSpeechStream));
      const std::vector<double> scaled =
          mix_at_snr(clean, raw, seg.draw->speech_snr_db);
      std::copy(scaled.begin(), scaled.end(), s.n_speech.begin() + seg.begin);
    }
    if (cfg.with_white_noise) {
      const std::vector<double> raw =
          synth_source(SourceKind::kWhite, len, cfg.sample_rate,
                       derive_seed(seg.draw->seed, kWhiteStream));
      const std::vector<double> scaled =
          mix_at_snr(clean, raw, seg.draw->white_snr_db);
      std::copy(scaled.begin(), scaled.end(), s.n_white.begin() + seg.begin);
    }
  }
  s.n.resize(n);
  s.y.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    s.n[t] = static_cast<double>(to_f32(s.n_speech[t] + s.n_white[t]));
    s.y[t] = s.d[t] + s.n[t];
  }
  return s;
}

Scenario assemble_scenario(const FrameDims& dims, double sample_rate,
                           std::vector<double> x, std::vector<double> air_pre,
                           std::vector<double> air_post,
                           std::size_t switch_block, std::vector<double> noise) {
  dims.validate();
  if (noise.size() != x.size()) {
    throw Error(ErrorKind::kInvalidDimension,
                "noise and input tracks differ in length");
  }
  if (air_pre.size() < dims.filter_length() ||
      air_post.size() < dims.filter_length()) {
    throw Error(ErrorKind::kInvalidDimension, "AIR shorter than L");
  }
  Scenario s;
  s.sample_rate = sample_rate;
  s.dims = dims;
  s.x = std::move(x);
  s.air_pre = std::move(air_pre);
  s.air_post = std::move(air_post);
  s.switch_block = std::min(switch_block, s.num_blocks());
  s.n = std::move(noise);
  s.d = convolve_switched(s.x, s.air_pre, s.air_post,
                          std::min(s.switch_block * dims.hop, s.x.size()));
  s.y.resize(s.x.size());
  for (std::size_t t = 0; t < s.y.size(); ++t) s.y[t] = s.d[t] + s.n[t];
  return s;
}

}  // namespace deepfdaf::scenario
