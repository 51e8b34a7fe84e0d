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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "deepfdaf/error.h"
#include "deepfdaf/scenario.h"
#include "oracle.h"

namespace deepfdaf::scenario {
namespace {

double energy(std::span<const double> v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

double segment_snr_db(std::span<const double> clean,
                      std::span<const double> noise, std::size_t begin,
                      std::size_t end) {
  return 10.0 * std::log10(energy(clean.subspan(begin, end - begin)) /
                           energy(noise.subspan(begin, end - begin)));
}

ScenarioConfig ShortConfig() {
  ScenarioConfig cfg;
  cfg.duration_s = 2.0;
  cfg.switch_lo_s = 0.8;
  cfg.switch_hi_s = 1.2;
  return cfg;
}

TEST(ScenarioTest, DeriveSeedSeparatesStreams) {
  EXPECT_EQ(derive_seed(7, 1, 2), derive_seed(7, 1, 2));
  EXPECT_NE(derive_seed(7, 1, 2), derive_seed(7, 2, 1));
  EXPECT_NE(derive_seed(7, 1, 0), derive_seed(8, 1, 0));
}

TEST(ScenarioTest, SynthAirIsDeterministicAndUnitEnergy) {
  const auto a = synth_air(512, 0.3, 16000.0, 42);
  const auto b = synth_air(512, 0.3, 16000.0, 42);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(energy(a), 1.0, 1e-12);
  const auto flat =
      synth_air(512, std::numeric_limits<double>::infinity(), 16000.0, 3);
  EXPECT_NEAR(energy(flat), 1.0, 1e-12);
}

TEST(ScenarioTest, SynthAirOnsetDelayWithinRange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto h = synth_air(256, 0.1, 16000.0, seed);
    std::size_t onset = 0;
    while (h[onset] == 0.0) ++onset;
    EXPECT_GE(onset, 8u);
    EXPECT_LE(onset, 32u);
  }
}

// Least-squares slope of the windowed log energy against the envelope slope
// of -60 dB per t60, expressed over a t60/3 window.
TEST(ScenarioTest, SynthAirDecayMatchesEnvelope) {
  const double fs = 16000.0;
  for (double t60 : {0.05, 0.3}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const std::size_t k = static_cast<std::size_t>(t60 * fs);
      const auto h = synth_air(k, t60, fs, seed);
      const std::size_t win = 40;
      std::vector<double> t, db;
      for (std::size_t s = 32; s + win <= k; s += win) {
        t.push_back((static_cast<double>(s) + win / 2.0) / fs);
        db.push_back(10.0 * std::log10(energy(std::span(h).subspan(s, win))));
      }
      const double tm = std::accumulate(t.begin(), t.end(), 0.0) / t.size();
      const double dm = std::accumulate(db.begin(), db.end(), 0.0) / db.size();
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < t.size(); ++i) {
        num += (t[i] - tm) * (db[i] - dm);
        den += (t[i] - tm) * (t[i] - tm);
      }
      const double slope = num / den;
      EXPECT_NEAR(slope * t60 / 3.0, -20.0, 1.0) << t60 << " " << seed;
    }
  }
}

TEST(ScenarioTest, WhiteSourceHasUnitVariance) {
  const auto w = synth_source(SourceKind::kWhite, 16000, 16000.0, 5);
  ASSERT_EQ(w.size(), 16000u);
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / w.size();
  double var = 0.0;
  for (double v : w) var += (v - mean) * (v - mean);
  EXPECT_NEAR(var / (w.size() - 1), 1.0, 0.05);
  EXPECT_EQ(w, synth_source(SourceKind::kWhite, 16000, 16000.0, 5));
}

TEST(ScenarioTest, ModulatedSourceIsCorrelatedAndNonstationary) {
  const auto s = synth_source(SourceKind::kAr1Modulated, 32000, 16000.0, 9);
  EXPECT_EQ(s, synth_source(SourceKind::kAr1Modulated, 32000, 16000.0, 9));
  double r0 = 0.0, r1 = 0.0;
  for (std::size_t t = 0; t + 1 < s.size(); ++t) {
    r0 += s[t] * s[t];
    r1 += s[t] * s[t + 1];
  }
  EXPECT_GT(r1, 0.8 * r0);
  std::vector<double> frame_db;
  for (std::size_t b = 0; b + 800 <= s.size(); b += 800) {
    frame_db.push_back(
        10.0 * std::log10(energy(std::span(s).subspan(b, 800)) + 1e-30));
  }
  const auto [lo, hi] = std::minmax_element(frame_db.begin(), frame_db.end());
  EXPECT_GT(*hi - *lo, 6.0);
}

TEST(ScenarioTest, MixAtSnrExamples) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<double> clean(1000), noise(1000);
  for (double& v : clean) v = g(rng);
  for (double& v : noise) v = 3.0 * g(rng);
  EXPECT_NEAR(energy(mix_at_snr(clean, noise, 0.0)), energy(clean),
              1e-9 * energy(clean));
  EXPECT_NEAR(energy(mix_at_snr(clean, noise, 20.0)), energy(clean) / 100.0,
              1e-9 * energy(clean));
  const double e1 = energy(mix_at_snr(clean, noise, 7.0));
  std::vector<double> clean2 = clean;
  for (double& v : clean2) v *= 2.0;
  EXPECT_NEAR(energy(mix_at_snr(clean2, noise, 7.0)), 4.0 * e1, 1e-9 * e1);
  for (double snr : {-10.0, 3.3, 35.0}) {
    EXPECT_NEAR(
        10.0 * std::log10(energy(clean) / energy(mix_at_snr(clean, noise, snr))),
        snr, 1e-9);
  }
  const std::vector<double> zero(1000, 0.0);
  EXPECT_THROW(mix_at_snr(zero, noise, 0.0), Error);
  EXPECT_THROW(mix_at_snr(clean, zero, 0.0), Error);
}

TEST(ScenarioTest, ConvolveSwitchedMatchesDirectConvolution) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g;
  std::vector<double> x(300), a(20), b(20);
  for (double& v : x) v = g(rng);
  for (double& v : a) v = g(rng);
  for (double& v : b) v = g(rng);
  const auto d = convolve_switched(x, a, b, 128);
  const auto da = oracle::direct_convolution(x, a);
  const auto db = oracle::direct_convolution(x, b);
  for (std::size_t t = 0; t < x.size(); ++t) {
    EXPECT_NEAR(d[t], t < 128 ? da[t] : db[t], 1e-12);
  }
}

TEST(ScenarioTest, DefaultScenarioSwitchesInsideWindow) {
  ScenarioConfig cfg;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Scenario s = build_scenario(cfg, seed);
    const double t_switch = static_cast<double>(s.switch_sample()) / 16000.0;
    EXPECT_GE(t_switch, 7.2);
    EXPECT_LE(t_switch, 8.8);
    EXPECT_EQ(s.x.size(), s.y.size());
    EXPECT_EQ(s.x.size(), s.n.size());
    EXPECT_EQ(s.x.size(), s.d.size());
  }
}

TEST(ScenarioTest, BuildIsDeterministic) {
  const ScenarioConfig cfg = ShortConfig();
  const Scenario a = build_scenario(cfg, 77);
  const Scenario b = build_scenario(cfg, 77);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.y, b.y);
  EXPECT_EQ(a.air_pre, b.air_pre);
  EXPECT_EQ(a.air_post, b.air_post);
  EXPECT_EQ(a.switch_block, b.switch_block);
  const Scenario c = build_scenario(cfg, 78);
  EXPECT_NE(a.x, c.x);
}

TEST(ScenarioTest, ObservationAndSegmentProperties) {
  ScenarioConfig cfg = ShortConfig();
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const Scenario s = build_scenario(cfg, seed);
    const std::size_t sw = s.switch_sample();
    for (std::size_t t = 0; t < s.y.size(); ++t) {
      ASSERT_EQ(s.y[t], s.d[t] + s.n[t]);
    }
    const std::size_t l = cfg.dims.filter_length();
    for (const auto* air : {&s.air_pre, &s.air_post}) {
      ASSERT_EQ(air->size(), cfg.air_length);
      EXPECT_GT(energy(std::span(*air).subspan(l)), 0.0);
    }
    EXPECT_NE(s.air_pre, s.air_post);
    const std::size_t n = s.y.size();
    EXPECT_NEAR(segment_snr_db(s.d, s.n_speech, 0, sw), s.pre.speech_snr_db,
                0.1);
    EXPECT_NEAR(segment_snr_db(s.d, s.n_speech, sw, n), s.post.speech_snr_db,
                0.1);
    EXPECT_NEAR(segment_snr_db(s.d, s.n_white, 0, sw), s.pre.white_snr_db, 0.1);
    EXPECT_NEAR(segment_snr_db(s.d, s.n_white, sw, n), s.post.white_snr_db,
                0.1);
    for (const SegmentDraw* d : {&s.pre, &s.post}) {
      EXPECT_GE(d->speech_snr_db, -10.0);
      EXPECT_LE(d->speech_snr_db, 10.0);
      EXPECT_GE(d->white_snr_db, 25.0);
      EXPECT_LE(d->white_snr_db, 35.0);
      EXPECT_GE(d->t60_s, 0.12);
      EXPECT_LE(d->t60_s, 0.78);
    }
  }
}

TEST(ScenarioTest, InputFrameAndMicBlock) {
  const Scenario s = build_scenario(ShortConfig(), 3);
  const auto f0 = s.input_frame(0);
  ASSERT_EQ(f0.size(), 256u);
  for (std::size_t i = 0; i < 128; ++i) EXPECT_EQ(f0[i], 0.0);
  for (std::size_t i = 0; i < 128; ++i) EXPECT_EQ(f0[128 + i], s.x[i]);
  const auto f5 = s.input_frame(5);
  for (std::size_t i = 0; i < 256; ++i) EXPECT_EQ(f5[i], s.x[6 * 128 - 256 + i]);
  const auto y5 = s.mic_block(5);
  ASSERT_EQ(y5.size(), 128u);
  EXPECT_EQ(y5[0], s.y[5 * 128]);
}

TEST(ScenarioTest, InvalidConfigsRejected) {
  ScenarioConfig cfg;
  cfg.air_length = 128;  // K must exceed L
  EXPECT_THROW(build_scenario(cfg, 1), Error);
  cfg = ScenarioConfig();
  cfg.switch_hi_s = 12.0;
  EXPECT_THROW(build_scenario(cfg, 1), Error);
  cfg = ScenarioConfig();
  cfg.speech_snr_lo_db = 20.0;
  EXPECT_THROW(build_scenario(cfg, 1), Error);
}

TEST(ScenarioTest, DirectoryRoundTrip) {
  const Scenario s = build_scenario(ShortConfig(), 21);
  const auto dir = std::filesystem::temp_directory_path() / "deepfdaf_scn_rt";
  std::filesystem::remove_all(dir);
  write_scenario(dir, s);
  const Scenario r = read_scenario(dir);
  EXPECT_EQ(r.switch_block, s.switch_block);
  EXPECT_EQ(r.seed, s.seed);
  EXPECT_EQ(r.air_pre, s.air_pre);
  EXPECT_EQ(r.air_post, s.air_post);
  EXPECT_EQ(r.x, s.x);
  EXPECT_EQ(r.n, s.n);
  EXPECT_EQ(r.d, s.d);
  EXPECT_EQ(r.y, s.y);
  EXPECT_DOUBLE_EQ(r.pre.speech_snr_db, s.pre.speech_snr_db);
  EXPECT_DOUBLE_EQ(r.post.t60_s, s.post.t60_s);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace deepfdaf::scenario
