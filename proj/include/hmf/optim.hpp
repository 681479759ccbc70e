// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hmf/autodiff.hpp"
#include "hmf/error.hpp"

namespace hmf {

/// A named, optionally frozen block of optimization variables. Frozen blocks
/// receive no updates and keep bitwise-identical values through a run.
struct VarBlock {
  std::string name;
  std::vector<double> values;
  bool frozen = false;
};

struct VariableSet {
  std::vector<VarBlock> blocks;

  VarBlock& add(std::string name, std::vector<double> values,
                bool frozen = false) {
    blocks.push_back(VarBlock{std::move(name), std::move(values), frozen});
    return blocks.back();
  }

  VarBlock* find(std::string_view name) {
    for (auto& b : blocks)
      if (b.name == name) return &b;
    return nullptr;
  }
  const VarBlock* find(std::string_view name) const {
    for (const auto& b : blocks)
      if (b.name == name) return &b;
    return nullptr;
  }

  VarBlock& at(std::string_view name) {
    VarBlock* b = find(name);
    if (!b) fail(Err::mismatch, "no variable block named " + std::string(name));
    return *b;
  }
  const VarBlock& at(std::string_view name) const {
    const VarBlock* b = find(name);
    if (!b) fail(Err::mismatch, "no variable block named " + std::string(name));
    return *b;
  }

  /// Same block structure, all values zero. The gradient container.
  VariableSet zeros_like() const {
    VariableSet g;
    for (const auto& b : blocks)
      g.add(b.name, std::vector<double>(b.values.size(), 0.0), b.frozen);
    return g;
  }

  size_t total_size() const {
    size_t n = 0;
    for (const auto& b : blocks) n += b.values.size();
    return n;
  }
};

struct ObjectiveEval {
  double value = 0.0;
  std::vector<std::pair<std::string, double>> terms;
};

/// Objective with optional gradient accumulation. When `grads` is non-null it
/// has the same block structure as `vars` and arrives zeroed.
using ObjectiveFn =
    std::function<ObjectiveEval(const VariableSet& vars, VariableSet* grads)>;

/// Gradients of the objective for every unfrozen block; throws
/// NonFiniteGradient on NaN/inf entries.
VariableSet gradient(const ObjectiveFn& objective, const VariableSet& vars);

struct AdamParams {
  double lr = 0.05;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One bias-corrected Adam update over a flat tensor; `step` counts from 1.
void adam_update(std::span<double> x, std::span<const double> g,
                 std::span<double> m, std::span<double> v, long step,
                 const AdamParams& p);

struct AdamState {
  std::vector<std::vector<double>> m, v;
  long step = 0;

  static AdamState init(const VariableSet& vars);
};

void adam_step(AdamState& state, VariableSet& vars, const VariableSet& grads,
               const AdamParams& params);

struct MinimizeOptions {
  int iterations = 300;
  AdamParams adam;
  // Early stop once the relative loss change over `patience` iterations
  // drops below rel_tol.
  double rel_tol = 1e-6;
  int patience = 20;
};

struct MinimizeResult {
  std::vector<double> trace;  // objective before each step
  std::vector<std::vector<std::pair<std::string, double>>> term_trace;
  ObjectiveEval final_eval;   // at the returned variables
  int iterations_run = 0;
  bool converged = false;
};

MinimizeResult minimize(const ObjectiveFn& objective, VariableSet& vars,
                        const MinimizeOptions& options);

// ---------------------------------------------------------------------------
// Tape adapter: express an objective as a graph builder over mirrored blocks
// ---------------------------------------------------------------------------

struct TapeVars {
  std::vector<std::pair<std::string, std::vector<ad::Value>>> blocks;

  std::span<const ad::Value> operator[](std::string_view name) const {
    for (const auto& [n, vals] : blocks)
      if (n == name) return vals;
    fail(Err::mismatch, "no tape block named " + std::string(name));
  }
};

using TapeObjective =
    std::function<ad::Value(ad::Tape& tape, const TapeVars& vars)>;

/// Wraps a tape graph builder as an ObjectiveFn: leaves per variable entry,
/// one reverse sweep for all gradients.
ObjectiveFn make_tape_objective(TapeObjective builder);

}  // namespace hmf
