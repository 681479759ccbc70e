// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/optim.hpp"

#include <cmath>

namespace hmf {

VariableSet gradient(const ObjectiveFn& objective, const VariableSet& vars) {
  VariableSet grads = vars.zeros_like();
  const ObjectiveEval eval = objective(vars, &grads);
  if (!std::isfinite(eval.value))
    fail(Err::nonfinite, "NonFinite: objective value");
  for (const auto& b : grads.blocks) {
    if (b.frozen) continue;
    for (double g : b.values)
      if (!std::isfinite(g))
        fail(Err::nonfinite, "NonFiniteGradient: block " + b.name);
  }
  return grads;
}

void adam_update(std::span<double> x, std::span<const double> g,
                 std::span<double> m, std::span<double> v, long step,
                 const AdamParams& p) {
  if (x.size() != g.size() || x.size() != m.size() || x.size() != v.size())
    fail(Err::mismatch, "ShapeMismatch: adam_update spans");
  const double c1 = 1.0 - std::pow(p.beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(p.beta2, static_cast<double>(step));
  for (size_t i = 0; i < x.size(); ++i) {
    m[i] = p.beta1 * m[i] + (1.0 - p.beta1) * g[i];
    v[i] = p.beta2 * v[i] + (1.0 - p.beta2) * g[i] * g[i];
    const double mhat = m[i] / c1;
    const double vhat = v[i] / c2;
    x[i] -= p.lr * mhat / (std::sqrt(vhat) + p.eps);
  }
}

AdamState AdamState::init(const VariableSet& vars) {
  AdamState s;
  for (const auto& b : vars.blocks) {
    s.m.emplace_back(b.values.size(), 0.0);
    s.v.emplace_back(b.values.size(), 0.0);
  }
  return s;
}

void adam_step(AdamState& state, VariableSet& vars, const VariableSet& grads,
               const AdamParams& params) {
  if (state.m.size() != vars.blocks.size() ||
      grads.blocks.size() != vars.blocks.size())
    fail(Err::mismatch, "ShapeMismatch: adam_step block counts");
  ++state.step;
  for (size_t i = 0; i < vars.blocks.size(); ++i) {
    VarBlock& b = vars.blocks[i];
    const VarBlock& g = grads.blocks[i];
    if (g.values.size() != b.values.size())
      fail(Err::mismatch, "ShapeMismatch: block " + b.name);
    if (b.frozen) continue;
    adam_update(b.values, g.values, state.m[i], state.v[i], state.step,
                params);
  }
}

MinimizeResult minimize(const ObjectiveFn& objective, VariableSet& vars,
                        const MinimizeOptions& options) {
  MinimizeResult result;
  AdamState state = AdamState::init(vars);
  for (int iter = 0; iter < options.iterations; ++iter) {
    VariableSet grads = vars.zeros_like();
    const ObjectiveEval eval = objective(vars, &grads);
    if (!std::isfinite(eval.value)) {
      std::string bad = "total";
      for (const auto& [name, v] : eval.terms)
        if (!std::isfinite(v)) bad = name;
      fail(Err::nonfinite, "NonFinite: objective term '" + bad +
                               "' at iteration " + std::to_string(iter));
    }
    for (const auto& b : grads.blocks) {
      if (b.frozen) continue;
      for (double g : b.values)
        if (!std::isfinite(g))
          fail(Err::nonfinite, "NonFiniteGradient: block " + b.name +
                                   " at iteration " + std::to_string(iter));
    }
    result.trace.push_back(eval.value);
    result.term_trace.push_back(eval.terms);
    adam_step(state, vars, grads, options.adam);
    ++result.iterations_run;

    const int lag = options.patience;
    if (lag > 0 && iter >= lag) {
      const double prev = result.trace[iter - lag];
      if (std::abs(eval.value - prev) <
          options.rel_tol * std::max(1.0, std::abs(prev))) {
        result.converged = true;
        break;
      }
    }
  }
  result.final_eval = objective(vars, nullptr);
  return result;
}

ObjectiveFn make_tape_objective(TapeObjective builder) {
  return [builder = std::move(builder)](const VariableSet& vars,
                                        VariableSet* grads) -> ObjectiveEval {
    ad::Tape tape;
    TapeVars tv;
    for (const auto& b : vars.blocks) {
      std::vector<ad::Value> vals;
      vals.reserve(b.values.size());
      for (double v : b.values) vals.push_back(tape.leaf(v));
      tv.blocks.emplace_back(b.name, std::move(vals));
    }
    const ad::Value root = builder(tape, tv);
    ObjectiveEval eval;
    eval.value = root.val();
    eval.terms = {{"objective", root.val()}};
    if (grads) {
      const auto adj = tape.backward(root);
      for (size_t i = 0; i < vars.blocks.size(); ++i) {
        auto& out = grads->blocks[i].values;
        const auto& leaves = tv.blocks[i].second;
        for (size_t k = 0; k < leaves.size(); ++k)
          out[k] += leaves[k].is_const() ? 0.0 : adj[leaves[k].idx];
      }
    }
    return eval;
  };
}

}  // namespace hmf
