// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cmath>

#include "hmf/autodiff.hpp"
#include "hmf/error.hpp"
#include "hmf/vecmath.hpp"

namespace hmf {

// ---------------------------------------------------------------------------
// Rotation representations
// ---------------------------------------------------------------------------

/// Axis-angle: radians times unit axis. The I/O-boundary representation.
struct RotationAA {
  Vec3 v{0.0, 0.0, 0.0};

  RotationAA() = default;
  explicit RotationAA(const Vec3& axis_angle) : v(axis_angle) {}
  RotationAA(double x, double y, double z) : v(x, y, z) {}

  double angle() const { return std::sqrt(v.squared_norm()); }

  /// Canonical form with angle in [0, pi].
  RotationAA normalized() const;
};

struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  /// Unit norm, hemisphere-canonical (w >= 0).
  Quaternion normalized() const;
  double dot(const Quaternion& o) const {
    return w * o.w + x * o.x + y * o.y + z * o.z;
  }
};

/// First two columns of a rotation matrix; the continuous parameterization
/// used for all rotation variables during optimization.
struct Rot6D {
  std::array<double, 6> v{1.0, 0.0, 0.0, 0.0, 1.0, 0.0};
};

struct CameraIntrinsics {
  double fx = 1000.0, fy = 1000.0;
  double cx = 500.0, cy = 500.0;
};

struct CameraExtrinsics {
  RotationAA rotation;            // world -> camera
  Vec3 translation{0.0, 0.0, 0.0};
};

// ---------------------------------------------------------------------------
// Conversions (strict, double precision; throw on invalid input)
// ---------------------------------------------------------------------------

Mat3 to_matrix(const RotationAA& r);
Mat3 to_matrix(const Quaternion& q);
Mat3 to_matrix(const Rot6D& r);  // Gram-Schmidt; throws Degenerate6D

RotationAA rotation_aa_from_matrix(const Mat3& m);
Quaternion quaternion_from_matrix(const Mat3& m);
Rot6D rot6d_from_matrix(const Mat3& m);

Quaternion quaternion_from_aa(const RotationAA& r);
RotationAA rotation_aa_from_quaternion(const Quaternion& q);

// ---------------------------------------------------------------------------
// Distances / interpolation / projection
// ---------------------------------------------------------------------------

/// arccos(clamp((trace(R1^T R2) - 1)/2, -1, 1)) in [0, pi].
double geodesic(const Mat3& r1, const Mat3& r2);
double geodesic(const RotationAA& r1, const RotationAA& r2);

/// Shortest-arc spherical interpolation; falls back to normalized lerp for
/// nearly parallel inputs.
Quaternion slerp(const Quaternion& q1, const Quaternion& q2, double t);

/// Pinhole projection of a world point; throws BehindCamera at z <= 1e-6.
Vec2 project(const Vec3& point, const CameraIntrinsics& K,
             const CameraExtrinsics& ext);

// ---------------------------------------------------------------------------
// Scalar-generic cores (instantiated with double and ad::Value)
// ---------------------------------------------------------------------------

inline double clamp_min(double a, double c) { return a < c ? c : a; }
inline double sq(double a) { return a * a; }

inline double geodesic_sq_from_cos(double u) {
  const double uc = u > 1.0 ? 1.0 : (u < -1.0 ? -1.0 : u);
  const double th = std::acos(uc);
  return th * th;
}

constexpr double kDegenerate6dTol = 1e-12;
constexpr double kMinProjectDepth = 1e-6;

/// Gram-Schmidt orthonormalization of the two stored columns. Norms are
/// floored so gradients stay finite even on degenerate optimizer iterates.
template <class S>
Mat3T<S> rot6d_to_matrix_t(const std::array<S, 6>& d) {
  using std::sqrt;
  Vec3T<S> a(d[0], d[1], d[2]);
  Vec3T<S> b(d[3], d[4], d[5]);
  const S inv1 = S(1.0) / sqrt(clamp_min(a.squared_norm(), kDegenerate6dTol));
  const Vec3T<S> b1 = a * inv1;
  const Vec3T<S> r = b - b1 * b1.dot(b);
  const S inv2 = S(1.0) / sqrt(clamp_min(r.squared_norm(), kDegenerate6dTol));
  const Vec3T<S> b2 = r * inv2;
  return Mat3T<S>::from_columns(b1, b2, b1.cross(b2));
}

template <class S>
S geodesic_sq_t(const Mat3T<S>& r1, const Mat3T<S>& r2) {
  const S u = (r1.dot_trace(r2) - S(1.0)) * S(0.5);
  return geodesic_sq_from_cos(u);
}

/// Projection with depth clamped at `min_depth`; never throws. The strict
/// project() wraps this and enforces the depth precondition.
template <class S>
Vec2T<S> project_soft_t(const Vec3T<S>& p_cam, const CameraIntrinsics& K,
                        double min_depth = kMinProjectDepth) {
  const S zs = clamp_min(p_cam.z, min_depth);
  return {S(K.fx) * (p_cam.x / zs) + S(K.cx),
          S(K.fy) * (p_cam.y / zs) + S(K.cy)};
}

}  // namespace hmf
