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

// Reference implementations built from explicit dense matrices and textbook
// formulas. They share no code with the library beyond plain data types.

#ifndef DEEPFDAF_TESTS_ORACLE_H_
#define DEEPFDAF_TESTS_ORACLE_H_

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "deepfdaf/neural.h"

namespace deepfdaf::oracle {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline CMat dft_matrix(int m) {
  CMat f(m, m);
  for (int k = 0; k < m; ++k) {
    for (int n = 0; n < m; ++n) {
      const double ang = -2.0 * std::numbers::pi * k * n / m;
      f(k, n) = std::complex<double>(std::cos(ang), std::sin(ang));
    }
  }
  return f;
}

inline CMat idft_matrix(int m) { return dft_matrix(m).adjoint() / m; }

// [0_{(M-R) x R}; I_R]: places a block at the end of a frame.
inline RMat tail_embed(int m, int r) {
  RMat q = RMat::Zero(m, r);
  q.bottomRows(r).setIdentity();
  return q;
}

// [I_L; 0_{(M-L) x L}]: places filter taps at the start of a frame.
inline RMat head_embed(int m, int l) {
  RMat q = RMat::Zero(m, l);
  q.topRows(l).setIdentity();
  return q;
}

inline CVec naive_dft(std::span<const double> x) {
  const int m = static_cast<int>(x.size());
  CVec out(m);
  for (int k = 0; k < m; ++k) {
    std::complex<double> acc = 0.0;
    for (int n = 0; n < m; ++n) {
      const double ang = -2.0 * std::numbers::pi * k * n / m;
      acc += x[n] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

// y[t] = sum_k h[k] x[t-k], t < x.size().
inline std::vector<double> direct_convolution(std::span<const double> x,
                                              std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t t = 0; t < x.size(); ++t) {
    for (std::size_t k = 0; k < h.size() && k <= t; ++k) y[t] += h[k] * x[t - k];
  }
  return y;
}

inline RVec full_mask(std::span<const double> half, int m) {
  RVec out(m);
  for (int k = 0; k < m; ++k) out[k] = half[k <= m / 2 ? k : m - k];
  return out;
}

struct DenseParams {
  double lambda_x = 0.5;
  double lambda_p = 0.0;
  double mu_max = 1.0;
  double reg = 1e-10;
};

struct DenseBlock {
  CVec x_spec;
  RVec d_hat;
  RVec e;
  CVec e_spec;
  RVec psi_xx;
  RVec psi_pp;
  RVec step;
  CVec w;
  RVec taps;
};

// Masked FDAF over full M-bin vectors with every projection as a matrix.
class DenseMaskedFdaf {
 public:
  DenseMaskedFdaf(int m, int r, const DenseParams& p)
      : m_(m),
        r_(r),
        l_(m - r),
        p_(p),
        f_(dft_matrix(m)),
        fi_(idft_matrix(m)),
        q1_(tail_embed(m, r)),
        q2_(head_embed(m, m - r)),
        frame_(RVec::Zero(m)),
        w_(CVec::Zero(m)),
        psi_xx_(RVec::Zero(m)),
        psi_pp_(RVec::Zero(m)) {}

  DenseBlock step(const RVec& x_block, const RVec& y_block, const RVec& m_mu,
                  const RVec& m_e) {
    DenseBlock b;
    frame_.head(m_ - r_) = frame_.tail(m_ - r_).eval();
    frame_.tail(r_) = x_block;
    b.x_spec = f_ * frame_.cast<std::complex<double>>();
    const CMat xd = b.x_spec.asDiagonal();
    b.d_hat = (q1_.transpose().cast<std::complex<double>>() * fi_ * xd * w_).real();
    b.e = y_block - b.d_hat;
    b.e_spec = f_ * (q1_ * b.e).cast<std::complex<double>>();
    psi_xx_ = p_.lambda_x * psi_xx_ +
              (1.0 - p_.lambda_x) * b.x_spec.cwiseAbs2();
    const CVec masked = m_e.cast<std::complex<double>>().cwiseProduct(b.e_spec);
    psi_pp_ = p_.lambda_p * psi_pp_ + (1.0 - p_.lambda_p) * masked.cwiseAbs2();
    b.psi_xx = psi_xx_;
    b.psi_pp = psi_pp_;
    const double ratio = static_cast<double>(m_) / r_;
    b.step = p_.mu_max * m_mu.array() /
             (psi_xx_.array() + ratio * psi_pp_.array() + p_.reg);
    const CMat lambda = b.step.cast<std::complex<double>>().asDiagonal();
    const CMat g = f_ * (q2_ * q2_.transpose()).cast<std::complex<double>>() * fi_;
    w_ = g * (w_ + lambda * xd.adjoint() * b.e_spec);
    b.w = w_;
    b.taps = (q2_.transpose().cast<std::complex<double>>() * fi_ * w_).real();
    return b;
  }

 private:
  int m_;
  int r_;
  int l_;
  DenseParams p_;
  CMat f_;
  CMat fi_;
  RMat q1_;
  RMat q2_;
  RVec frame_;
  CVec w_;
  RVec psi_xx_;
  RVec psi_pp_;
};

// Two-layer GRU mask estimator evaluated from named weight tensors.
class DenseGruNetwork {
 public:
  explicit DenseGruNetwork(const neural::NetworkParameters& params)
      : params_(params),
        h1_(RVec::Zero(params.dims().hidden)),
        h2_(RVec::Zero(params.dims().hidden)) {}

  std::pair<RVec, RVec> step(const RVec& feat) {
    const RVec z = (mat("input.weight") * feat + vec("input.bias"))
                       .array()
                       .tanh()
                       .matrix();
    h1_ = gru("gru1", z, h1_);
    h2_ = gru("gru2", h1_, h2_);
    auto sig = [](const RVec& a) {
      return RVec((1.0 + (-a.array()).exp()).inverse().matrix());
    };
    return {sig(mat("head_mu.weight") * h2_ + vec("head_mu.bias")),
            sig(mat("head_e.weight") * h2_ + vec("head_e.bias"))};
  }

 private:
  RMat mat(const std::string& name) const {
    const auto& info = params_.info(name);
    const auto data = params_.tensor(name);
    RMat out(info.rows, info.cols);
    for (std::size_t i = 0; i < info.rows; ++i) {
      for (std::size_t j = 0; j < info.cols; ++j) {
        out(i, j) = data[i * info.cols + j];
      }
    }
    return out;
  }
  RVec vec(const std::string& name) const {
    const auto data = params_.tensor(name);
    return Eigen::Map<const RVec>(data.data(), data.size());
  }
  RVec gru(const std::string& layer, const RVec& x, const RVec& h) const {
    auto sig = [](const RVec& a) {
      return RVec((1.0 + (-a.array()).exp()).inverse().matrix());
    };
    const RVec u = sig(mat(layer + ".w_update") * x +
                       mat(layer + ".u_update") * h + vec(layer + ".b_update"));
    const RVec r = sig(mat(layer + ".w_reset") * x +
                       mat(layer + ".u_reset") * h + vec(layer + ".b_reset"));
    const RVec c = (mat(layer + ".w_candidate") * x +
                    mat(layer + ".u_candidate") * r.cwiseProduct(h) +
                    vec(layer + ".b_candidate"))
                       .array()
                       .tanh()
                       .matrix();
    return u.cwiseProduct(h) + (RVec::Ones(h.size()) - u).cwiseProduct(c);
  }

  const neural::NetworkParameters& params_;
  RVec h1_;
  RVec h2_;
};

// Normalized log-power features of the first M/2+1 bins of e and x.
inline RVec dense_features(const CVec& e_spec, const CVec& x_spec,
                           const neural::NormalizationStats& stats, double eps) {
  const int m = static_cast<int>(e_spec.size());
  const int h = m / 2 + 1;
  RVec f(2 * h);
  for (int k = 0; k < h; ++k) {
    f[k] = std::log(std::max(std::norm(e_spec[k]), eps));
    f[h + k] = std::log(std::max(std::norm(x_spec[k]), eps));
  }
  for (int j = 0; j < 2 * h; ++j) f[j] = (f[j] - stats.nu[j]) / stats.sigma[j];
  return f;
}

}  // namespace deepfdaf::oracle

#endif  // DEEPFDAF_TESTS_ORACLE_H_
