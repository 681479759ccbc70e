// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace hmf::ad {

class Tape;

/// A scalar on the tape. Copyable, 16 bytes. A Value with no node index is a
/// constant and never touches the tape, so doubles mix freely with tracked
/// values through the implicit constructor.
struct Value {
  double v = 0.0;
  int idx = -1;
  Tape* tape = nullptr;

  Value() = default;
  Value(double c) : v(c) {}  // NOLINT: implicit constant lift is the point
  Value(double value, int index, Tape* t) : v(value), idx(index), tape(t) {}

  double val() const { return v; }
  bool is_const() const { return idx < 0; }
};

/// Arena-based reverse-mode tape. Each node stores at most two parents with
/// their local partials; backward() is a single reverse sweep.
class Tape {
 public:
  explicit Tape(std::size_t reserve_nodes = 1 << 16) {
    nodes_.reserve(reserve_nodes);
  }

  Value leaf(double v) {
    nodes_.push_back(Node{-1, -1, 0.0, 0.0});
    return Value(v, static_cast<int>(nodes_.size()) - 1, this);
  }

  Value unary(double v, int p0, double d0) {
    nodes_.push_back(Node{p0, -1, d0, 0.0});
    return Value(v, static_cast<int>(nodes_.size()) - 1, this);
  }

  Value binary(double v, int p0, double d0, int p1, double d1) {
    nodes_.push_back(Node{p0, p1, d0, d1});
    return Value(v, static_cast<int>(nodes_.size()) - 1, this);
  }

  std::size_t size() const { return nodes_.size(); }

  /// Drops all nodes but keeps capacity; invalidates outstanding Values.
  void reset() { nodes_.clear(); }

  /// Reverse sweep from `root`; returns adjoints indexed by node. The span is
  /// owned by the tape and valid until the next backward()/reset().
  std::span<const double> backward(const Value& root) {
    adjoints_.assign(nodes_.size(), 0.0);
    if (root.is_const()) return adjoints_;
    assert(root.tape == this);
    adjoints_[root.idx] = 1.0;
    for (int i = root.idx; i >= 0; --i) {
      const double a = adjoints_[i];
      if (a == 0.0) continue;
      const Node& n = nodes_[i];
      if (n.p0 >= 0) adjoints_[n.p0] += n.d0 * a;
      if (n.p1 >= 0) adjoints_[n.p1] += n.d1 * a;
    }
    return adjoints_;
  }

 private:
  struct Node {
    int p0, p1;
    double d0, d1;
  };
  std::vector<Node> nodes_;
  std::vector<double> adjoints_;
};

inline Tape* tape_of(const Value& a, const Value& b) {
  if (a.tape && b.tape) assert(a.tape == b.tape);
  return a.tape ? a.tape : b.tape;
}

inline Value operator+(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b);
  if (!t) return Value(a.v + b.v);
  return t->binary(a.v + b.v, a.idx, 1.0, b.idx, 1.0);
}

inline Value operator-(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b);
  if (!t) return Value(a.v - b.v);
  return t->binary(a.v - b.v, a.idx, 1.0, b.idx, -1.0);
}

inline Value operator-(const Value& a) {
  if (a.is_const()) return Value(-a.v);
  return a.tape->unary(-a.v, a.idx, -1.0);
}

inline Value operator*(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b);
  if (!t) return Value(a.v * b.v);
  return t->binary(a.v * b.v, a.idx, b.v, b.idx, a.v);
}

inline Value operator/(const Value& a, const Value& b) {
  Tape* t = tape_of(a, b);
  if (!t) return Value(a.v / b.v);
  const double inv = 1.0 / b.v;
  return t->binary(a.v * inv, a.idx, inv, b.idx, -a.v * inv * inv);
}

inline Value& operator+=(Value& a, const Value& b) { return a = a + b; }

inline Value sqrt(const Value& a) {
  const double r = std::sqrt(a.v);
  if (a.is_const()) return Value(r);
  return a.tape->unary(r, a.idx, 0.5 / r);
}

inline Value exp(const Value& a) {
  const double r = std::exp(a.v);
  if (a.is_const()) return Value(r);
  return a.tape->unary(r, a.idx, r);
}

inline Value log(const Value& a) {
  const double r = std::log(a.v);
  if (a.is_const()) return Value(r);
  return a.tape->unary(r, a.idx, 1.0 / a.v);
}

inline Value sin(const Value& a) {
  if (a.is_const()) return Value(std::sin(a.v));
  return a.tape->unary(std::sin(a.v), a.idx, std::cos(a.v));
}

inline Value cos(const Value& a) {
  if (a.is_const()) return Value(std::cos(a.v));
  return a.tape->unary(std::cos(a.v), a.idx, -std::sin(a.v));
}

inline Value tanh(const Value& a) {
  const double r = std::tanh(a.v);
  if (a.is_const()) return Value(r);
  return a.tape->unary(r, a.idx, 1.0 - r * r);
}

inline Value sq(const Value& a) { return a * a; }

/// max(a, c) with subgradient 0 on the clamped side.
inline Value clamp_min(const Value& a, double c) {
  if (a.is_const()) return Value(a.v < c ? c : a.v);
  if (a.v < c) return a.tape->unary(c, a.idx, 0.0);
  return a.tape->unary(a.v, a.idx, 1.0);
}

/// Squared geodesic angle from the rotation-agreement cosine
/// u = (trace(R1^T R2) - 1) / 2. Computed as acos(clamp(u, -1, 1))^2 with an
/// analytically-continued derivative: d/du = -2*theta/sin(theta), which stays
/// finite at theta -> 0 (series) and is magnitude-capped near theta -> pi
/// where the true derivative diverges.
inline Value geodesic_sq_from_cos(const Value& u) {
  const double uc = u.v > 1.0 ? 1.0 : (u.v < -1.0 ? -1.0 : u.v);
  const double theta = std::acos(uc);
  const double val = theta * theta;
  if (u.is_const()) return Value(val);
  double d;
  if (theta < 1e-4) {
    d = -2.0 * (1.0 + theta * theta / 6.0);
  } else {
    const double s = std::sqrt(std::max(1.0 - uc * uc, 1e-24));
    d = -2.0 * theta / std::max(s, 1e-8);
  }
  if (u.v > 1.0 || u.v < -1.0) d = 0.0;  // outside the clamp
  return u.tape->unary(val, u.idx, d);
}

}  // namespace hmf::ad
