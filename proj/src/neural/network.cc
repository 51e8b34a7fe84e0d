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
#include <cmath>
#include <random>
#include <string>

#include <Eigen/Core>

#include "deepfdaf/error.h"
#include "deepfdaf/neural.h"

namespace deepfdaf::neural {
namespace {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;

constexpr const char* kGateNames[3] = {"update", "reset", "candidate"};

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

ConstMatrixMap matrix(const NetworkParameters& p, const std::string& name) {
  const TensorInfo& t = p.info(name);
  return ConstMatrixMap(p.flat().data() + t.offset,
                        static_cast<Eigen::Index>(t.rows),
                        static_cast<Eigen::Index>(t.cols));
}

ConstVectorMap vec(const NetworkParameters& p, const std::string& name) {
  const TensorInfo& t = p.info(name);
  return ConstVectorMap(p.flat().data() + t.offset,
                        static_cast<Eigen::Index>(t.size()));
}

MatrixMap grad_matrix(const NetworkParameters& p, std::span<double> g,
                      const std::string& name) {
  const TensorInfo& t = p.info(name);
  return MatrixMap(g.data() + t.offset, static_cast<Eigen::Index>(t.rows),
                   static_cast<Eigen::Index>(t.cols));
}

VectorMap grad_vec(const NetworkParameters& p, std::span<double> g,
                   const std::string& name) {
  const TensorInfo& t = p.info(name);
  return VectorMap(g.data() + t.offset, static_cast<Eigen::Index>(t.size()));
}

ConstVectorMap view(const std::vector<double>& v) {
  return ConstVectorMap(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

std::string gate_tensor(const std::string& layer, char kind, int gate) {
  return layer + "." + kind + "_" + kGateNames[gate];
}

// Standard GRU cell: u, r gates; c = tanh(Wc x + Uc (r .* h) + bc);
// h' = u .* h + (1 - u) .* c.
std::vector<double> gru_step(const NetworkParameters& p,
                             const std::string& layer,
                             const std::vector<double>& input,
                             const std::vector<double>& h_prev,
                             GruCache* cache) {
  const auto x = view(input);
  const auto h = view(h_prev);
  const Eigen::VectorXd u =
      (matrix(p, gate_tensor(layer, 'w', 0)) * x +
       matrix(p, gate_tensor(layer, 'u', 0)) * h + vec(p, gate_tensor(layer, 'b', 0)))
          .unaryExpr(&sigmoid);
  const Eigen::VectorXd r =
      (matrix(p, gate_tensor(layer, 'w', 1)) * x +
       matrix(p, gate_tensor(layer, 'u', 1)) * h + vec(p, gate_tensor(layer, 'b', 1)))
          .unaryExpr(&sigmoid);
  const Eigen::VectorXd rh = r.cwiseProduct(h);
  const Eigen::VectorXd c =
      (matrix(p, gate_tensor(layer, 'w', 2)) * x +
       matrix(p, gate_tensor(layer, 'u', 2)) * rh +
       vec(p, gate_tensor(layer, 'b', 2)))
          .array()
          .tanh()
          .matrix();
  const Eigen::VectorXd h_next =
      u.cwiseProduct(h) + (Eigen::VectorXd::Ones(u.size()) - u).cwiseProduct(c);
  std::vector<double> out = to_std(h_next);
  if (cache != nullptr) {
    cache->input = input;
    cache->h_prev = h_prev;
    cache->update = to_std(u);
    cache->reset = to_std(r);
    cache->candidate = to_std(c);
    cache->h = out;
  }
  return out;
}

// Returns dLoss/dinput; `grad_h` enters as dLoss/dh' and leaves as
// dLoss/dh_prev.
Eigen::VectorXd gru_backward(const NetworkParameters& p,
                             const std::string& layer, const GruCache& c,
                             std::vector<double>& grad_h,
                             std::span<double> grad_theta) {
  const auto x = view(c.input);
  const auto h = view(c.h_prev);
  const auto u = view(c.update);
  const auto r = view(c.reset);
  const auto cand = view(c.candidate);
  const Eigen::VectorXd gh_next = view(grad_h);
  const Eigen::Index n = u.size();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);

  const Eigen::VectorXd g_u = gh_next.cwiseProduct(h - cand);
  const Eigen::VectorXd g_c = gh_next.cwiseProduct(ones - u);
  Eigen::VectorXd g_h = gh_next.cwiseProduct(u);

  const Eigen::VectorXd a_c =
      g_c.cwiseProduct(ones - cand.cwiseProduct(cand));
  const Eigen::VectorXd rh = r.cwiseProduct(h);
  grad_matrix(p, grad_theta, gate_tensor(layer, 'w', 2)).noalias() +=
      a_c * x.transpose();
  grad_matrix(p, grad_theta, gate_tensor(layer, 'u', 2)).noalias() +=
      a_c * rh.transpose();
  grad_vec(p, grad_theta, gate_tensor(layer, 'b', 2)) += a_c;
  const Eigen::VectorXd g_rh =
      matrix(p, gate_tensor(layer, 'u', 2)).transpose() * a_c;
  Eigen::VectorXd g_x = matrix(p, gate_tensor(layer, 'w', 2)).transpose() * a_c;
  const Eigen::VectorXd g_r = g_rh.cwiseProduct(h);
  g_h += g_rh.cwiseProduct(r);

  const Eigen::VectorXd a_u = g_u.cwiseProduct(u.cwiseProduct(ones - u));
  const Eigen::VectorXd a_r = g_r.cwiseProduct(r.cwiseProduct(ones - r));
  for (int gate = 0; gate < 2; ++gate) {
    const Eigen::VectorXd& a = gate == 0 ? a_u : a_r;
    grad_matrix(p, grad_theta, gate_tensor(layer, 'w', gate)).noalias() +=
        a * x.transpose();
    grad_matrix(p, grad_theta, gate_tensor(layer, 'u', gate)).noalias() +=
        a * h.transpose();
    grad_vec(p, grad_theta, gate_tensor(layer, 'b', gate)) += a;
    g_x.noalias() += matrix(p, gate_tensor(layer, 'w', gate)).transpose() * a;
    g_h.noalias() += matrix(p, gate_tensor(layer, 'u', gate)).transpose() * a;
  }
  grad_h = to_std(g_h);
  return g_x;
}

void check_features(const NetworkParameters& params,
                    std::span<const double> features) {
  if (params.size() == 0) {
    throw Error(ErrorKind::kInvalidDimension, "network has no parameters");
  }
  if (features.size() != params.dims().feature_size()) {
    throw Error(ErrorKind::kInvalidDimension,
                "feature length " + std::to_string(features.size()) +
                    " != " + std::to_string(params.dims().feature_size()));
  }
}

}  // namespace

NetworkParameters::NetworkParameters(const NetworkDims& dims)
    : dims_(dims), layout_(make_layout(dims)), theta_(count(dims), 0.0) {}

std::vector<TensorInfo> NetworkParameters::make_layout(const NetworkDims& dims) {
  dims.validate();
  const std::size_t p = dims.hidden;
  std::vector<TensorInfo> layout;
  std::size_t offset = 0;
  auto add = [&](std::string name, std::size_t rows, std::size_t cols) {
    layout.push_back({std::move(name), rows, cols, offset});
    offset += rows * cols;
  };
  add("input.weight", p, dims.feature_size());
  add("input.bias", p, 1);
  for (const char* layer : {"gru1", "gru2"}) {
    for (const char* gate : kGateNames) {
      add(std::string(layer) + ".w_" + gate, p, p);
      add(std::string(layer) + ".u_" + gate, p, p);
      add(std::string(layer) + ".b_" + gate, p, 1);
    }
  }
  for (const char* head : {"head_mu", "head_e"}) {
    add(std::string(head) + ".weight", dims.mask_size(), p);
    add(std::string(head) + ".bias", dims.mask_size(), 1);
  }
  return layout;
}

std::size_t NetworkParameters::count(const NetworkDims& dims) {
  const std::size_t p = dims.hidden;
  const std::size_t input = p * dims.feature_size() + p;
  const std::size_t gru = 3 * (2 * p * p + p);
  const std::size_t head = dims.mask_size() * p + dims.mask_size();
  return input + 2 * gru + 2 * head;
}

const TensorInfo& NetworkParameters::info(std::string_view name) const {
  for (const TensorInfo& t : layout_) {
    if (t.name == name) return t;
  }
  throw Error(ErrorKind::kInvalidInput,
              "unknown parameter tensor: " + std::string(name));
}

std::span<double> NetworkParameters::tensor(std::string_view name) {
  const TensorInfo& t = info(name);
  return std::span<double>(theta_).subspan(t.offset, t.size());
}

std::span<const double> NetworkParameters::tensor(std::string_view name) const {
  const TensorInfo& t = info(name);
  return std::span<const double>(theta_).subspan(t.offset, t.size());
}

NetworkParameters initialize_parameters(const NetworkDims& dims,
                                        std::uint64_t seed) {
  NetworkParameters params(dims);
  std::mt19937_64 rng(seed);
  for (const TensorInfo& t : params.layout()) {
    if (t.cols == 1) continue;  // biases stay zero
    const double bound = 1.0 / std::sqrt(static_cast<double>(t.cols));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (double& w : params.tensor(t.name)) w = dist(rng);
  }
  return params;
}

NetworkParameters quantize_f32(const NetworkParameters& params) {
  NetworkParameters out = params;
  for (double& v : out.flat()) v = static_cast<double>(static_cast<float>(v));
  return out;
}

RecurrentState initial_recurrent_state(const NetworkDims& dims) {
  return {std::vector<double>(dims.hidden, 0.0),
          std::vector<double>(dims.hidden, 0.0)};
}

RecurrentGrad zero_recurrent_grad(const NetworkDims& dims) {
  return {std::vector<double>(dims.hidden, 0.0),
          std::vector<double>(dims.hidden, 0.0)};
}

ForwardResult forward(const NetworkParameters& params,
                      const RecurrentState& state,
                      std::span<const double> features, StepCache* cache) {
  check_features(params, features);
  const std::size_t p = params.dims().hidden;
  if (state.h1.size() != p || state.h2.size() != p) {
    throw Error(ErrorKind::kInvalidDimension, "recurrent state size mismatch");
  }
  const ConstVectorMap feat(features.data(),
                            static_cast<Eigen::Index>(features.size()));
  const Eigen::VectorXd z_vec =
      (matrix(params, "input.weight") * feat + vec(params, "input.bias"))
          .array()
          .tanh()
          .matrix();
  std::vector<double> z = to_std(z_vec);

  ForwardResult out;
  out.state.h1 = gru_step(params, "gru1", z, state.h1,
                          cache ? &cache->gru1 : nullptr);
  out.state.h2 = gru_step(params, "gru2", out.state.h1, state.h2,
                          cache ? &cache->gru2 : nullptr);
  const auto h2 = view(out.state.h2);
  out.masks.m_mu = to_std(
      (matrix(params, "head_mu.weight") * h2 + vec(params, "head_mu.bias"))
          .unaryExpr(&sigmoid));
  out.masks.m_e = to_std(
      (matrix(params, "head_e.weight") * h2 + vec(params, "head_e.bias"))
          .unaryExpr(&sigmoid));
  if (cache != nullptr) {
    cache->features.assign(features.begin(), features.end());
    cache->z = std::move(z);
    cache->m_mu = out.masks.m_mu;
    cache->m_e = out.masks.m_e;
  }
  return out;
}

void backward(const NetworkParameters& params, const StepCache& cache,
              std::span<const double> grad_m_mu,
              std::span<const double> grad_m_e, RecurrentGrad& carry,
              std::span<double> grad_theta,
              std::vector<double>* grad_features) {
  if (grad_theta.size() != params.size()) {
    throw Error(ErrorKind::kInvalidDimension, "gradient size mismatch");
  }
  const auto h2 = view(cache.gru2.h);
  Eigen::VectorXd g_h2 = view(carry.h2);
  struct Head {
    const char* name;
    const std::vector<double>& mask;
    std::span<const double> grad;
  };
  for (const Head& head : {Head{"head_mu", cache.m_mu, grad_m_mu},
                           Head{"head_e", cache.m_e, grad_m_e}}) {
    const std::vector<double>& m = head.mask;
    std::span<const double> g = head.grad;
    Eigen::VectorXd a(static_cast<Eigen::Index>(m.size()));
    for (std::size_t k = 0; k < m.size(); ++k) {
      a[static_cast<Eigen::Index>(k)] = g[k] * m[k] * (1.0 - m[k]);
    }
    const std::string name(head.name);
    grad_matrix(params, grad_theta, name + ".weight").noalias() +=
        a * h2.transpose();
    grad_vec(params, grad_theta, name + ".bias") += a;
    g_h2.noalias() += matrix(params, name + ".weight").transpose() * a;
  }

  carry.h2 = to_std(g_h2);
  const Eigen::VectorXd g_h1_out =
      gru_backward(params, "gru2", cache.gru2, carry.h2, grad_theta);
  std::vector<double> g_h1 = to_std(view(carry.h1) + g_h1_out);
  const Eigen::VectorXd g_z =
      gru_backward(params, "gru1", cache.gru1, g_h1, grad_theta);
  carry.h1 = std::move(g_h1);

  const auto z = view(cache.z);
  const Eigen::VectorXd a_in =
      g_z.cwiseProduct(Eigen::VectorXd::Ones(z.size()) - z.cwiseProduct(z));
  const auto feat = view(cache.features);
  grad_matrix(params, grad_theta, "input.weight").noalias() +=
      a_in * feat.transpose();
  grad_vec(params, grad_theta, "input.bias") += a_in;
  if (grad_features != nullptr) {
    *grad_features = to_std(matrix(params, "input.weight").transpose() * a_in);
  }
}

}  // namespace deepfdaf::neural
