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

#include "deepfdaf/controllers.h"
#include "deepfdaf/error.h"

namespace deepfdaf::control {
namespace {

// Spectrum of length 4 (3 stored bins) with the given bin values.
Spectrum spectrum4(Complex b0, Complex b1, Complex b2) {
  Spectrum s(4);
  s.bins()[0] = b0;
  s.bins()[1] = b1;
  s.bins()[2] = b2;
  return s;
}

TEST(ControllersTest, FdafStepIsMuOverPsd) {
  PsdDiag psi(4);
  psi.values()[0] = 1.0;
  psi.values()[1] = 3.0;
  psi.values()[2] = 0.0;
  const StepSizeDiag s = fdaf_step(psi, 0.5, 1e-10);
  EXPECT_DOUBLE_EQ(s[0], 0.5 / (1.0 + 1e-10));
  EXPECT_DOUBLE_EQ(s[1], 0.5 / (3.0 + 1e-10));
  EXPECT_DOUBLE_EQ(s[3], s[1]);
  EXPECT_DOUBLE_EQ(s[2], 0.5 / 1e-10);
  EXPECT_THROW(fdaf_step(psi, 0.0), Error);
}

TEST(ControllersTest, PsdRecursion) {
  PsdDiag prev(4, 2.0);
  const Spectrum x = spectrum4({1, 0}, {0, 2}, {3, 0});
  const PsdDiag next = psd_xx_update(prev, x, 0.5);
  EXPECT_DOUBLE_EQ(next[0], 0.5 * 2.0 + 0.5 * 1.0);
  EXPECT_DOUBLE_EQ(next[1], 0.5 * 2.0 + 0.5 * 4.0);
  EXPECT_DOUBLE_EQ(next[2], 0.5 * 2.0 + 0.5 * 9.0);
  const PsdDiag same = psd_xx_update(prev, x, 0.0);
  EXPECT_DOUBLE_EQ(same[2], 9.0);
}

TEST(ControllersTest, KalmanStepHandValues) {
  KalmanState ks = initial_kalman_state(FrameDims{4, 2}, 0.5, 1.0);
  ks.psi_nn.values()[1] = 0.5;
  const Spectrum x = spectrum4({2, 0}, {0, 2}, {1, 1});
  const StepSizeDiag s = kalman_step(ks, x, 2.0, 0.0);
  EXPECT_DOUBLE_EQ(s[0], 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0 / (4.0 + 2.0 * 0.5));
  EXPECT_DOUBLE_EQ(s[2], 1.0 / 2.0);
}

TEST(ControllersTest, KalmanPredictCorrectHandValues) {
  KalmanState ks = initial_kalman_state(FrameDims{4, 2}, 0.5, 1.0);
  ks.psi_nn.values()[0] = 4.0;
  const Spectrum x = spectrum4({2, 0}, {0, 0}, {0, 0});
  const Spectrum w = spectrum4({0, 1}, {3, 0}, {0, 0});
  const Spectrum e = spectrum4({2, 0}, {0, 0}, {0, 0});
  StepSizeDiag step(4, 0.0);
  step.values()[0] = 0.2;
  const KalmanState next = kalman_predict_correct(ks, step, x, w, e, 2.0, 0.5);
  // corrected = (1 - 0.2 * 4 / 2) * 1 = 0.6; predicted = 0.25 * 0.6 + 0.75 * 1
  EXPECT_DOUBLE_EQ(next.psi_dw[0], 0.25 * 0.6 + 0.75 * 1.0);
  // bin 1: corrected 1, |w|^2 = 9
  EXPECT_DOUBLE_EQ(next.psi_dw[1], 0.25 * 1.0 + 0.75 * 9.0);
  // noise: 0.5 * 4 + 0.5 * 4 / 2
  EXPECT_DOUBLE_EQ(next.psi_nn[0], 3.0);
  EXPECT_DOUBLE_EQ(next.psi_nn[1], 0.0);
}

TEST(ControllersTest, KalmanWithUnitTransitionKeepsCorrectedCovariance) {
  KalmanState ks = initial_kalman_state(FrameDims{4, 2}, 1.0, 2.0);
  const Spectrum x = spectrum4({1, 0}, {1, 0}, {1, 0});
  const StepSizeDiag step(4, 0.5);
  const KalmanState next =
      kalman_predict_correct(ks, step, x, Spectrum(4), Spectrum(4), 2.0);
  for (std::size_t k = 0; k < 4; ++k) EXPECT_DOUBLE_EQ(next.psi_dw[k], 2.0 * 0.75);
}

TEST(ControllersTest, MaskedErrorPsdHandValues) {
  PsdDiag prev(4, 1.0);
  const Spectrum e = spectrum4({2, 0}, {0, 1}, {1, 1});
  const std::vector<double> m{0.5, 1.0, 0.0};
  const PsdDiag next = masked_error_psd(prev, e, m, 0.25);
  EXPECT_DOUBLE_EQ(next[0], 0.25 + 0.75 * 1.0);
  EXPECT_DOUBLE_EQ(next[1], 0.25 + 0.75 * 1.0);
  EXPECT_DOUBLE_EQ(next[2], 0.25);
}

TEST(ControllersTest, DnnStepHandValues) {
  PsdDiag xx(4, 1.0);
  PsdDiag pp(4, 0.5);
  const std::vector<double> m_mu{1.0, 0.5, 0.0};
  const StepSizeDiag s = dnn_fdaf_step(xx, pp, m_mu, 0.8, 3.0, 0.0);
  EXPECT_DOUBLE_EQ(s[0], 0.8 / 2.5);
  EXPECT_DOUBLE_EQ(s[1], 0.4 / 2.5);
  EXPECT_DOUBLE_EQ(s[2], 0.0);
  EXPECT_THROW(dnn_fdaf_step(xx, pp, m_mu, -1.0, 3.0), Error);
}

TEST(ControllersTest, MaskValidation) {
  EXPECT_NO_THROW(validate_mask(std::vector<double>{0.0, 0.5, 1.0}, 3));
  EXPECT_THROW(validate_mask(std::vector<double>{0.0, 1.5, 1.0}, 3), Error);
  EXPECT_THROW(validate_mask(std::vector<double>{0.0, 0.5}, 3), Error);
  EXPECT_THROW(validate_mask(std::vector<double>{0.0, std::nan(""), 1.0}, 3),
               Error);
}

TEST(ControllersTest, VariantRows) {
  const MaskedFdafParams ea = variant_params(Variant::kEaFdaf);
  EXPECT_EQ(ea.lambda_x, 0.5);
  EXPECT_EQ(ea.lambda_p, 0.5);
  EXPECT_EQ(ea.mu_max, 0.75);
  EXPECT_EQ(ea.step_mask, MaskSource::kOne);
  EXPECT_EQ(ea.error_mask, MaskSource::kOne);
  const MaskedFdafParams no_me = variant_params(Variant::kDnnNoErrorMask);
  EXPECT_EQ(no_me.lambda_p, 0.0);
  EXPECT_EQ(no_me.mu_max, 1.0);
  EXPECT_EQ(no_me.step_mask, MaskSource::kNetwork);
  EXPECT_EQ(no_me.error_mask, MaskSource::kZero);
  const MaskedFdafParams mmu1 = variant_params(Variant::kDnnUnitStepMask);
  EXPECT_EQ(mmu1.mu_max, 0.5);
  EXPECT_EQ(mmu1.step_mask, MaskSource::kOne);
  EXPECT_EQ(mmu1.error_mask, MaskSource::kNetwork);
  const MaskedFdafParams full = variant_params(Variant::kDnnFdaf);
  EXPECT_EQ(full.lambda_p, 0.0);
  EXPECT_EQ(full.mu_max, 1.0);
  EXPECT_EQ(full.step_mask, MaskSource::kNetwork);
  EXPECT_EQ(full.error_mask, MaskSource::kNetwork);
}

TEST(ControllersTest, VariantNamesRoundTrip) {
  for (Variant v : {Variant::kEaFdaf, Variant::kDnnNoErrorMask,
                    Variant::kDnnUnitStepMask, Variant::kDnnFdaf}) {
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  }
  EXPECT_STREQ(variant_name(Variant::kDnnUnitStepMask), "dnn_fdaf_mmu1");
  EXPECT_THROW(parse_variant("dnn"), Error);
  EXPECT_FALSE(uses_network(Variant::kEaFdaf));
  EXPECT_TRUE(uses_network(Variant::kDnnNoErrorMask));
}

TEST(ControllersTest, EaFdafStepUsesUnitMasks) {
  const FrameDims dims{4, 2};
  MaskedFdafState st = initial_masked_state(dims);
  const Spectrum x = spectrum4({1, 0}, {0, 1}, {2, 0});
  const Spectrum e = spectrum4({0, 2}, {1, 0}, {0, 0});
  const MaskedStep out = masked_fdaf_step(st, x, e, nullptr,
                                          variant_params(Variant::kEaFdaf), 2.0);
  // psi_xx = 0.5 |x|^2, psi_pp = 0.5 |e|^2, step = 0.75 / (psi_xx + 2 psi_pp)
  EXPECT_DOUBLE_EQ(out.next.psi_xx[0], 0.5);
  EXPECT_DOUBLE_EQ(out.next.psi_pp[0], 2.0);
  EXPECT_NEAR(out.step[0], 0.75 / (0.5 + 4.0 + 1e-10), 1e-15);
  EXPECT_NEAR(out.step[1], 0.75 / (0.5 + 1.0 + 1e-10), 1e-15);
  EXPECT_NEAR(out.step[2], 0.75 / (2.0 + 1e-10), 1e-15);
  EXPECT_EQ(out.applied.m_mu, std::vector<double>(3, 1.0));
  EXPECT_EQ(out.applied.m_e, std::vector<double>(3, 1.0));
}

TEST(ControllersTest, NetworkMasksRequiredWhenConfigured) {
  const FrameDims dims{4, 2};
  const MaskedFdafState st = initial_masked_state(dims);
  const Spectrum x = spectrum4({1, 0}, {1, 0}, {1, 0});
  EXPECT_THROW(masked_fdaf_step(st, x, x, nullptr,
                                variant_params(Variant::kDnnFdaf), 2.0),
               Error);
  const MaskPair bad{{0.5, 0.5, 2.0}, {0.5, 0.5, 0.5}};
  EXPECT_THROW(masked_fdaf_step(st, x, x, &bad,
                                variant_params(Variant::kDnnFdaf), 2.0),
               Error);
}

TEST(ControllersTest, NoErrorMaskVariantIgnoresErrorPower) {
  const FrameDims dims{4, 2};
  const MaskedFdafState st = initial_masked_state(dims);
  const Spectrum x = spectrum4({1, 0}, {1, 0}, {1, 0});
  const Spectrum e = spectrum4({5, 0}, {5, 0}, {5, 0});
  const MaskPair net{{0.5, 0.5, 0.5}, {1.0, 1.0, 1.0}};
  const MaskedStep out = masked_fdaf_step(
      st, x, e, &net, variant_params(Variant::kDnnNoErrorMask), 2.0);
  EXPECT_EQ(out.applied.m_e, std::vector<double>(3, 0.0));
  EXPECT_DOUBLE_EQ(out.next.psi_pp[0], 0.0);
  EXPECT_NEAR(out.step[0], 0.5 / 0.5, 1e-9);
}

}  // namespace
}  // namespace deepfdaf::control
