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

#include <limits>
#include <random>

#include "deepfdaf/adaptive_filter.h"
#include "deepfdaf/error.h"
#include "oracle.h"

namespace deepfdaf::filter {
namespace {

constexpr int kM = 32;
constexpr int kR = 16;
const FrameDims kDims{kM, kR};

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

oracle::CVec full(const Spectrum& s) {
  oracle::CVec v(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) v[static_cast<Eigen::Index>(k)] = s[k];
  return v;
}

TEST(AdaptiveFilterTest, InitialStateIsZero) {
  const FilterState s = initial_state(kDims);
  EXPECT_EQ(s.taps, std::vector<double>(kM - kR, 0.0));
  EXPECT_EQ(s.block_index, 0u);
  for (std::size_t k = 0; k < s.w_hat.size(); ++k) EXPECT_EQ(s.w_hat[k], Complex{});
}

TEST(AdaptiveFilterTest, ZeroFilterErrorEqualsObservation) {
  std::mt19937_64 rng(1);
  const FilterState s = initial_state(kDims);
  const Spectrum x = spectral::analyze(random_vector(kM, rng));
  const auto y = random_vector(kR, rng);
  const PriorError pe = prior_error(s, x, y, kDims);
  for (int i = 0; i < kR; ++i) {
    EXPECT_EQ(pe.d_hat[i], 0.0);
    EXPECT_DOUBLE_EQ(pe.e_block[i], y[i]);
  }
}

TEST(AdaptiveFilterTest, PriorErrorAndUpdateMatchDenseMatrices) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 0.05);
  const oracle::CMat f = oracle::dft_matrix(kM);
  const oracle::CMat fi = oracle::idft_matrix(kM);
  const oracle::RMat q1 = oracle::tail_embed(kM, kR);
  const oracle::RMat q2 = oracle::head_embed(kM, kM - kR);
  const oracle::CMat g = f * (q2 * q2.transpose()).cast<Complex>() * fi;

  FilterState s = initial_state(kDims);
  oracle::CVec w = oracle::CVec::Zero(kM);
  for (int b = 0; b < 6; ++b) {
    const auto frame = random_vector(kM, rng);
    const auto y = random_vector(kR, rng);
    const Spectrum x = spectral::analyze(frame);
    const PriorError pe = prior_error(s, x, y, kDims);

    const oracle::CVec xd =
        f * Eigen::Map<const oracle::RVec>(frame.data(), kM).cast<Complex>();
    const oracle::RVec d_hat =
        (q1.transpose().cast<Complex>() * fi * xd.asDiagonal() * w).real();
    const oracle::RVec e =
        Eigen::Map<const oracle::RVec>(y.data(), kR) - d_hat;
    const oracle::CVec e_spec = f * (q1 * e).cast<Complex>();
    for (int i = 0; i < kR; ++i) {
      EXPECT_NEAR(pe.d_hat[i], d_hat[i], 1e-11);
      EXPECT_NEAR(pe.e_block[i], e[i], 1e-11);
    }
    const oracle::CVec e_lib = full(pe.e_spec);
    EXPECT_LT((e_lib - e_spec).cwiseAbs().maxCoeff(), 1e-10);

    StepSizeDiag step(kM);
    for (double& v : step.values()) v = u(rng);
    s = update(s, step, x, pe.e_spec, kDims);
    oracle::RVec lam(kM);
    for (int k = 0; k < kM; ++k) lam[k] = step[static_cast<std::size_t>(k)];
    w = g * (w + lam.cast<Complex>().cwiseProduct(xd.conjugate()).cwiseProduct(
                     e_spec));
    EXPECT_LT((full(s.w_hat) - w).cwiseAbs().maxCoeff(), 1e-10);
    const oracle::RVec taps = (q2.transpose().cast<Complex>() * fi * w).real();
    for (int i = 0; i < kM - kR; ++i) EXPECT_NEAR(s.taps[i], taps[i], 1e-11);
    EXPECT_EQ(s.block_index, static_cast<std::uint64_t>(b + 1));
    EXPECT_FALSE(s.last_update_rejected);
  }
}

TEST(AdaptiveFilterTest, UpdatedFilterStaysFir) {
  std::mt19937_64 rng(3);
  FilterState s = initial_state(kDims);
  const Spectrum x = spectral::analyze(random_vector(kM, rng));
  const PriorError pe = prior_error(s, x, random_vector(kR, rng), kDims);
  s = update(s, StepSizeDiag(kM, 0.1), x, pe.e_spec, kDims);
  const auto td = spectral::synthesize(s.w_hat);
  for (int i = kM - kR; i < kM; ++i) EXPECT_NEAR(td[i], 0.0, 1e-13);
}

TEST(AdaptiveFilterTest, ZeroStepKeepsFilter) {
  std::mt19937_64 rng(4);
  FilterState s = initial_state(kDims);
  s.taps = random_vector(kM - kR, rng);
  s.w_hat = spectral::filter_spectrum(s.taps, kM);
  const Spectrum x = spectral::analyze(random_vector(kM, rng));
  const PriorError pe = prior_error(s, x, random_vector(kR, rng), kDims);
  const FilterState next = update(s, StepSizeDiag(kM, 0.0), x, pe.e_spec, kDims);
  for (std::size_t i = 0; i < s.taps.size(); ++i) {
    EXPECT_NEAR(next.taps[i], s.taps[i], 1e-14);
  }
}

TEST(AdaptiveFilterTest, NonFiniteInputIsRejected) {
  std::mt19937_64 rng(5);
  const FilterState s = initial_state(kDims);
  const Spectrum x = spectral::analyze(random_vector(kM, rng));
  const PriorError pe = prior_error(s, x, random_vector(kR, rng), kDims);
  StepSizeDiag step(kM, 0.1);
  step.values()[3] = std::numeric_limits<double>::infinity();
  const FilterState next = update(s, step, x, pe.e_spec, kDims);
  EXPECT_TRUE(next.last_update_rejected);
  EXPECT_EQ(next.taps, s.taps);
  EXPECT_EQ(next.w_hat, s.w_hat);
}

TEST(AdaptiveFilterTest, NegativeStepThrows) {
  std::mt19937_64 rng(6);
  const FilterState s = initial_state(kDims);
  const Spectrum x = spectral::analyze(random_vector(kM, rng));
  const PriorError pe = prior_error(s, x, random_vector(kR, rng), kDims);
  EXPECT_THROW(update(s, StepSizeDiag(kM, -0.1), x, pe.e_spec, kDims), Error);
}

TEST(AdaptiveFilterTest, WrongBlockSizeThrows) {
  const FilterState s = initial_state(kDims);
  const Spectrum x(kM);
  EXPECT_THROW(prior_error(s, x, std::vector<double>(kR + 1), kDims), Error);
  EXPECT_THROW(prior_error(s, Spectrum(kM * 2), std::vector<double>(kR), kDims),
               Error);
}

TEST(AdaptiveFilterTest, NormalizedUpdateIdentifiesFir) {
  std::mt19937_64 rng(7);
  const auto h = random_vector(kM - kR, rng);
  const auto x = random_vector(400 * kR, rng);
  const auto y = oracle::direct_convolution(x, h);
  FilterState s = initial_state(kDims);
  spectral::FrameBuffer frames(kDims);
  PsdDiag psi(kM);
  for (int b = 0; b < 400; ++b) {
    const Spectrum xs = spectral::analyze(
        frames.push(std::span<const double>(x.data() + b * kR, kR)));
    const PriorError pe = prior_error(
        s, xs, std::span<const double>(y.data() + b * kR, kR), kDims);
    StepSizeDiag step(kM);
    for (std::size_t k = 0; k < step.num_bins(); ++k) {
      psi.values()[k] = 0.5 * psi.values()[k] + 0.5 * std::norm(xs.bins()[k]);
      step.values()[k] = 0.5 / (psi.values()[k] + 1e-10);
    }
    s = update(s, step, xs, pe.e_spec, kDims);
  }
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    err += (h[i] - s.taps[i]) * (h[i] - s.taps[i]);
    ref += h[i] * h[i];
  }
  EXPECT_LT(10.0 * std::log10(err / ref), -100.0);
}

}  // namespace
}  // namespace deepfdaf::filter
