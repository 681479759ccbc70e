// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include <Eigen/Core>

#include "hmf/rng.hpp"

namespace hmf {

/// Fully-connected network with tanh hidden activations and a linear output
/// layer. Columns are batch entries throughout. Forward/backward are written
/// out explicitly; the optimizer sees the weights as flat tensors.
struct Mlp {
  std::vector<Eigen::MatrixXd> W;  // layer i: (dims[i+1] x dims[i])
  std::vector<Eigen::VectorXd> b;

  /// Per-layer inputs and post-activation outputs captured during forward,
  /// consumed by the backward passes.
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input to each layer
  };

  struct Grads {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;

    void setZero();
  };

  static Mlp create(const std::vector<int>& dims, Rng& rng);

  int input_dim() const { return static_cast<int>(W.front().cols()); }
  int output_dim() const { return static_cast<int>(W.back().rows()); }
  size_t layer_count() const { return W.size(); }
  size_t parameter_count() const;

  Grads zero_grads() const;

  /// Forward pass; `cache` may be null when no backward pass will follow.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Cache* cache) const;

  /// Propagates dL/d(output) to dL/d(input); requires the forward cache.
  Eigen::MatrixXd backward_input(const Eigen::MatrixXd& dy,
                                 const Cache& cache) const;

  /// Full backward: accumulates parameter gradients into `grads` and returns
  /// dL/d(input).
  Eigen::MatrixXd backward(const Eigen::MatrixXd& dy, const Cache& cache,
                           Grads* grads) const;
};

}  // namespace hmf
