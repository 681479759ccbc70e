// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/mlp.hpp"

#include <cmath>

#include "hmf/error.hpp"

namespace hmf {

void Mlp::Grads::setZero() {
  for (auto& m : dW) m.setZero();
  for (auto& v : db) v.setZero();
}

Mlp Mlp::create(const std::vector<int>& dims, Rng& rng) {
  if (dims.size() < 2) fail(Err::bad_config, "Mlp needs at least two dims");
  Mlp net;
  for (size_t i = 0; i + 1 < dims.size(); ++i) {
    const int in = dims[i], out = dims[i + 1];
    const double limit = std::sqrt(6.0 / (in + out));
    Eigen::MatrixXd w(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) w(r, c) = rng.uniform(-limit, limit);
    net.W.push_back(std::move(w));
    net.b.push_back(Eigen::VectorXd::Zero(out));
  }
  return net;
}

size_t Mlp::parameter_count() const {
  size_t n = 0;
  for (size_t i = 0; i < W.size(); ++i) n += W[i].size() + b[i].size();
  return n;
}

Mlp::Grads Mlp::zero_grads() const {
  Grads g;
  for (size_t i = 0; i < W.size(); ++i) {
    g.dW.emplace_back(Eigen::MatrixXd::Zero(W[i].rows(), W[i].cols()));
    g.db.emplace_back(Eigen::VectorXd::Zero(b[i].size()));
  }
  return g;
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Cache* cache) const {
  Eigen::MatrixXd h = x;
  if (cache) cache->inputs.clear();
  for (size_t i = 0; i < W.size(); ++i) {
    if (cache) cache->inputs.push_back(h);
    Eigen::MatrixXd z = (W[i] * h).colwise() + b[i];
    if (i + 1 < W.size()) z = z.array().tanh();
    h = std::move(z);
  }
  return h;
}

Eigen::MatrixXd Mlp::backward_input(const Eigen::MatrixXd& dy,
                                    const Cache& cache) const {
  Eigen::MatrixXd d = dy;
  for (size_t i = W.size(); i-- > 0;) {
    // Hidden activations are tanh(z) = the *input* of the next layer.
    if (i + 1 < W.size()) {
      const Eigen::MatrixXd& act = cache.inputs[i + 1];
      d = d.cwiseProduct((1.0 - act.array().square()).matrix());
    }
    d = W[i].transpose() * d;
  }
  return d;
}

Eigen::MatrixXd Mlp::backward(const Eigen::MatrixXd& dy, const Cache& cache,
                              Grads* grads) const {
  Eigen::MatrixXd d = dy;
  for (size_t i = W.size(); i-- > 0;) {
    if (i + 1 < W.size()) {
      const Eigen::MatrixXd& act = cache.inputs[i + 1];
      d = d.cwiseProduct((1.0 - act.array().square()).matrix());
    }
    grads->dW[i] += d * cache.inputs[i].transpose();
    grads->db[i] += d.rowwise().sum();
    if (i > 0) d = W[i].transpose() * d;
  }
  return W[0].transpose() * d;
}

}  // namespace hmf
