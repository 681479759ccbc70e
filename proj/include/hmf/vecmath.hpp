// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>

namespace hmf {

// Small fixed-size vector/matrix types templated on the scalar so the same
// kinematics and loss code runs on plain doubles and on autodiff values.

template <class S>
struct Vec2T {
  S x{}, y{};

  Vec2T() = default;
  Vec2T(S xx, S yy) : x(xx), y(yy) {}

  Vec2T operator+(const Vec2T& o) const { return {x + o.x, y + o.y}; }
  Vec2T operator-(const Vec2T& o) const { return {x - o.x, y - o.y}; }
  S squared_norm() const { return x * x + y * y; }
};

template <class S>
struct Vec3T {
  S x{}, y{}, z{};

  Vec3T() = default;
  Vec3T(S xx, S yy, S zz) : x(xx), y(yy), z(zz) {}

  Vec3T operator+(const Vec3T& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3T operator-(const Vec3T& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3T operator*(const S& s) const { return {x * s, y * s, z * s}; }
  Vec3T& operator+=(const Vec3T& o) {
    x = x + o.x;
    y = y + o.y;
    z = z + o.z;
    return *this;
  }

  S dot(const Vec3T& o) const { return x * o.x + y * o.y + z * o.z; }
  S squared_norm() const { return dot(*this); }

  Vec3T cross(const Vec3T& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
};

/// Row-major 3x3 matrix.
template <class S>
struct Mat3T {
  std::array<S, 9> a{};

  static Mat3T identity() {
    Mat3T m;
    m.a = {S(1), S(0), S(0), S(0), S(1), S(0), S(0), S(0), S(1)};
    return m;
  }

  const S& operator()(int r, int c) const { return a[3 * r + c]; }
  S& operator()(int r, int c) { return a[3 * r + c]; }

  Mat3T operator*(const Mat3T& o) const {
    Mat3T r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) +
                  (*this)(i, 2) * o(2, j);
    return r;
  }

  Vec3T<S> operator*(const Vec3T<S>& v) const {
    return {a[0] * v.x + a[1] * v.y + a[2] * v.z,
            a[3] * v.x + a[4] * v.y + a[5] * v.z,
            a[6] * v.x + a[7] * v.y + a[8] * v.z};
  }

  Mat3T transpose() const {
    Mat3T r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
    return r;
  }

  S trace() const { return a[0] + a[4] + a[8]; }

  /// trace(this^T * o); the rotation-agreement scalar used by geodesic
  /// distances.
  S dot_trace(const Mat3T& o) const {
    S s = a[0] * o.a[0];
    for (int i = 1; i < 9; ++i) s = s + a[i] * o.a[i];
    return s;
  }

  static Mat3T from_columns(const Vec3T<S>& c0, const Vec3T<S>& c1,
                            const Vec3T<S>& c2) {
    Mat3T m;
    m.a = {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
    return m;
  }

  Vec3T<S> col(int j) const { return {a[j], a[3 + j], a[6 + j]}; }
};

using Vec2 = Vec2T<double>;
using Vec3 = Vec3T<double>;
using Mat3 = Mat3T<double>;

}  // namespace hmf
