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

#include <random>
#include <vector>

#include "deepfdaf/error.h"
#include "deepfdaf/spectral.h"
#include "oracle.h"

namespace deepfdaf {
namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

std::vector<Complex> random_bins(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Complex> v(n);
  for (Complex& x : v) x = {g(rng), g(rng)};
  return v;
}

TEST(FrameDimsTest, DerivedSizes) {
  const FrameDims d{256, 128};
  EXPECT_EQ(d.filter_length(), 128u);
  EXPECT_EQ(d.num_bins(), 129u);
  EXPECT_DOUBLE_EQ(d.overlap_ratio(), 2.0);
  const FrameDims full{3072, 1024};
  EXPECT_EQ(full.filter_length(), 2048u);
  EXPECT_DOUBLE_EQ(full.overlap_ratio(), 3.0);
}

TEST(FrameDimsTest, RejectsOddOrDegenerateSizes) {
  EXPECT_THROW((FrameDims{255, 128}.validate()), Error);
  EXPECT_THROW((FrameDims{256, 0}.validate()), Error);
  EXPECT_THROW((FrameDims{256, 256}.validate()), Error);
  EXPECT_NO_THROW((FrameDims{64, 32}.validate()));
}

TEST(SpectralTest, AnalyzeMatchesNaiveDft) {
  std::mt19937_64 rng(1);
  for (std::size_t m : {2u, 8u, 32u, 64u, 96u}) {
    const auto x = random_vector(m, rng);
    const Spectrum s = spectral::analyze(x);
    const oracle::CVec ref = oracle::naive_dft(x);
    for (std::size_t k = 0; k < m; ++k) {
      EXPECT_NEAR(std::abs(s[k] - ref[static_cast<Eigen::Index>(k)]), 0.0, 1e-11)
          << "M=" << m << " k=" << k;
    }
  }
}

TEST(SpectralTest, ImpulseHasFlatSpectrum) {
  std::vector<double> x(16, 0.0);
  x[0] = 1.0;
  const Spectrum s = spectral::analyze(x);
  for (std::size_t k = 0; k < 16; ++k) {
    EXPECT_NEAR(s[k].real(), 1.0, 1e-15);
    EXPECT_NEAR(s[k].imag(), 0.0, 1e-15);
  }
}

TEST(SpectralTest, SynthesizeInvertsAnalyze) {
  std::mt19937_64 rng(2);
  const auto x = random_vector(64, rng);
  const auto back = spectral::synthesize(spectral::analyze(x));
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(back[i], x[i], 1e-13);
}

TEST(SpectralTest, SpectrumMirrorsConjugateBins) {
  std::mt19937_64 rng(3);
  const Spectrum s = spectral::analyze(random_vector(32, rng));
  EXPECT_EQ(s.num_bins(), 17u);
  for (std::size_t k = 1; k < 32; ++k) {
    EXPECT_EQ(s[k], std::conj(s[32 - k]));
  }
  const auto full = s.to_full();
  const auto half = spectral::select_nonredundant(s);
  ASSERT_EQ(half.size(), 17u);
  EXPECT_EQ(spectral::mirror_to_full(half), s);
  EXPECT_EQ(full.size(), 32u);
}

TEST(SpectralTest, MirrorDropsImaginaryEdgeBins) {
  std::vector<Complex> half(5, Complex{1.0, 2.0});
  const Spectrum s = spectral::mirror_to_full(half);
  EXPECT_EQ(s[0].imag(), 0.0);
  EXPECT_EQ(s[4].imag(), 0.0);
  EXPECT_EQ(s[1], Complex(1.0, 2.0));
  EXPECT_EQ(s[7], Complex(1.0, -2.0));
}

TEST(SpectralTest, FrontPaddedAnalysisMatchesDenseEmbedding) {
  std::mt19937_64 rng(4);
  const auto block = random_vector(16, rng);
  const Spectrum s = spectral::analyze_front_padded(block, 32);
  const oracle::RVec frame =
      oracle::tail_embed(32, 16) * Eigen::Map<const oracle::RVec>(block.data(), 16);
  const oracle::CVec ref = oracle::dft_matrix(32) * frame.cast<Complex>();
  for (std::size_t k = 0; k < 32; ++k) {
    EXPECT_NEAR(std::abs(s[k] - ref[static_cast<Eigen::Index>(k)]), 0.0, 1e-12);
  }
}

TEST(SpectralTest, FilterSpectrumRoundTripsTaps) {
  std::mt19937_64 rng(5);
  const auto taps = random_vector(20, rng);
  const Spectrum w = spectral::filter_spectrum(taps, 32);
  const auto back = spectral::filter_taps(w, 12);
  ASSERT_EQ(back.size(), 20u);
  for (std::size_t i = 0; i < taps.size(); ++i) EXPECT_NEAR(back[i], taps[i], 1e-13);
}

TEST(SpectralTest, FirConstraintIsIdempotentProjection) {
  std::mt19937_64 rng(6);
  const Spectrum w = spectral::analyze(random_vector(32, rng));
  const Spectrum p = spectral::enforce_fir_constraint(w, 16);
  const auto td = spectral::synthesize(p);
  for (std::size_t i = 16; i < 32; ++i) EXPECT_NEAR(td[i], 0.0, 1e-13);
  const Spectrum pp = spectral::enforce_fir_constraint(p, 16);
  for (std::size_t k = 0; k < 32; ++k) EXPECT_NEAR(std::abs(pp[k] - p[k]), 0.0, 1e-13);
}

TEST(SpectralTest, OverlapSaveBlockMatchesDirectConvolution) {
  std::mt19937_64 rng(7);
  const std::size_t m = 32, r = 16, l = 16;
  const auto h = random_vector(l, rng);
  const auto x = random_vector(10 * r, rng);
  const auto ref = oracle::direct_convolution(x, h);
  const Spectrum w = spectral::filter_spectrum(h, m);
  spectral::FrameBuffer frames(FrameDims{m, r});
  for (std::size_t b = 0; b < 10; ++b) {
    const Spectrum xs = spectral::analyze(
        frames.push(std::span<const double>(x.data() + b * r, r)));
    const auto y = spectral::overlap_save_convolve(xs, w, r);
    for (std::size_t i = 0; i < r; ++i) EXPECT_NEAR(y[i], ref[b * r + i], 1e-12);
  }
}

TEST(SpectralTest, ZeroFilterGivesZeroOutput) {
  std::mt19937_64 rng(8);
  const Spectrum xs = spectral::analyze(random_vector(16, rng));
  const auto y = spectral::overlap_save_convolve(xs, Spectrum(16), 8);
  for (double v : y) EXPECT_EQ(v, 0.0);
}

TEST(SpectralTest, AnalyzeAdjointSatisfiesDotProductIdentity) {
  std::mt19937_64 rng(9);
  for (std::size_t m : {8u, 32u}) {
    const auto v = random_vector(m, rng);
    const auto g = random_bins(m / 2 + 1, rng);
    const Spectrum a = spectral::analyze(v);
    double lhs = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      lhs += (std::conj(g[k]) * a.bins()[k]).real();
    }
    std::vector<double> adj(m);
    spectral::analyze_adjoint(g, adj);
    double rhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) rhs += adj[i] * v[i];
    EXPECT_NEAR(lhs, rhs, 1e-11);
  }
}

TEST(SpectralTest, SynthesizeAdjointSatisfiesDotProductIdentity) {
  std::mt19937_64 rng(10);
  for (std::size_t m : {8u, 32u}) {
    auto half = random_bins(m / 2 + 1, rng);
    half.front().imag(0.0);
    half.back().imag(0.0);
    const auto s = spectral::synthesize(spectral::mirror_to_full(half));
    const auto g = random_vector(m, rng);
    double lhs = 0.0;
    for (std::size_t i = 0; i < m; ++i) lhs += g[i] * s[i];
    std::vector<Complex> adj(m / 2 + 1);
    spectral::synthesize_adjoint(g, adj);
    double rhs = 0.0;
    for (std::size_t k = 0; k < adj.size(); ++k) {
      rhs += (std::conj(adj[k]) * half[k]).real();
    }
    EXPECT_NEAR(lhs, rhs, 1e-12);
    EXPECT_EQ(adj.front().imag(), 0.0);
    EXPECT_EQ(adj.back().imag(), 0.0);
  }
}

TEST(FrameBufferTest, SlidesByHop) {
  spectral::FrameBuffer fb(FrameDims{8, 4});
  const std::vector<double> a{1, 2, 3, 4};
  const std::vector<double> b{5, 6, 7, 8};
  auto f = fb.push(a);
  EXPECT_EQ(std::vector<double>(f.begin(), f.end()),
            (std::vector<double>{0, 0, 0, 0, 1, 2, 3, 4}));
  f = fb.push(b);
  EXPECT_EQ(std::vector<double>(f.begin(), f.end()),
            (std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8}));
  fb.reset();
  for (double v : fb.frame()) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(fb.push(std::vector<double>(3)), Error);
}

}  // namespace
}  // namespace deepfdaf
