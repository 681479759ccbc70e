// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace hmf {

namespace {

bool finite3(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

void require_finite(const Vec3& v, const char* what) {
  if (!finite3(v)) fail(Err::nonfinite, std::string("NonFinite: ") + what);
}

}  // namespace

RotationAA RotationAA::normalized() const {
  double theta = angle();
  if (theta < 1e-16) return RotationAA(0.0, 0.0, 0.0);
  Vec3 axis = v * (1.0 / theta);
  theta = std::fmod(theta, 2.0 * M_PI);
  if (theta < 0.0) theta += 2.0 * M_PI;
  if (theta > M_PI) {
    theta = 2.0 * M_PI - theta;
    axis = axis * -1.0;
  }
  return RotationAA(axis * theta);
}

Quaternion Quaternion::normalized() const {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(n > 0.0) || !std::isfinite(n))
    fail(Err::nonfinite, "NonFinite: quaternion normalization");
  const double s = (w < 0.0 ? -1.0 : 1.0) / n;
  return Quaternion{w * s, x * s, y * s, z * s};
}

Mat3 to_matrix(const RotationAA& r) {
  require_finite(r.v, "axis-angle");
  const double t2 = r.v.squared_norm();
  const double theta = std::sqrt(t2);
  // sin(t)/t and (1-cos(t))/t^2 with small-angle series.
  double k1, k2;
  if (theta < 1e-6) {
    k1 = 1.0 - t2 / 6.0;
    k2 = 0.5 - t2 / 24.0;
  } else {
    k1 = std::sin(theta) / theta;
    k2 = (1.0 - std::cos(theta)) / t2;
  }
  const double wx = r.v.x, wy = r.v.y, wz = r.v.z;
  Mat3 m = Mat3::identity();
  m.a = {1.0 - k2 * (wy * wy + wz * wz), k2 * wx * wy - k1 * wz,
         k2 * wx * wz + k1 * wy,
         k2 * wx * wy + k1 * wz, 1.0 - k2 * (wx * wx + wz * wz),
         k2 * wy * wz - k1 * wx,
         k2 * wx * wz - k1 * wy, k2 * wy * wz + k1 * wx,
         1.0 - k2 * (wx * wx + wy * wy)};
  return m;
}

Mat3 to_matrix(const Quaternion& q) {
  if (!std::isfinite(q.w) || !std::isfinite(q.x) || !std::isfinite(q.y) ||
      !std::isfinite(q.z))
    fail(Err::nonfinite, "NonFinite: quaternion");
  const Quaternion u = q.normalized();
  const double w = u.w, x = u.x, y = u.y, z = u.z;
  Mat3 m;
  m.a = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)};
  return m;
}

Mat3 to_matrix(const Rot6D& r) {
  for (double c : r.v)
    if (!std::isfinite(c)) fail(Err::nonfinite, "NonFinite: 6D rotation");
  const Vec3 a(r.v[0], r.v[1], r.v[2]);
  const Vec3 b(r.v[3], r.v[4], r.v[5]);
  const double na2 = a.squared_norm();
  if (na2 < kDegenerate6dTol)
    fail(Err::degenerate, "Degenerate6D: first column near zero");
  const Vec3 b1 = a * (1.0 / std::sqrt(na2));
  const Vec3 rej = b - b1 * b1.dot(b);
  if (rej.squared_norm() < kDegenerate6dTol)
    fail(Err::degenerate, "Degenerate6D: columns parallel");
  return rot6d_to_matrix_t<double>(r.v);
}

Quaternion quaternion_from_matrix(const Mat3& m) {
  // Shepperd's method: branch on the largest of the four squared components.
  Quaternion q;
  const double tr = m.trace();
  if (tr > 0.0) {
    double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m(2, 1) - m(1, 2)) / s;
    q.y = (m(0, 2) - m(2, 0)) / s;
    q.z = (m(1, 0) - m(0, 1)) / s;
  } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
    q.w = (m(2, 1) - m(1, 2)) / s;
    q.x = 0.25 * s;
    q.y = (m(0, 1) + m(1, 0)) / s;
    q.z = (m(0, 2) + m(2, 0)) / s;
  } else if (m(1, 1) > m(2, 2)) {
    double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
    q.w = (m(0, 2) - m(2, 0)) / s;
    q.x = (m(0, 1) + m(1, 0)) / s;
    q.y = 0.25 * s;
    q.z = (m(1, 2) + m(2, 1)) / s;
  } else {
    double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
    q.w = (m(1, 0) - m(0, 1)) / s;
    q.x = (m(0, 2) + m(2, 0)) / s;
    q.y = (m(1, 2) + m(2, 1)) / s;
    q.z = 0.25 * s;
  }
  return q.normalized();
}

RotationAA rotation_aa_from_quaternion(const Quaternion& q_in) {
  const Quaternion q = q_in.normalized();
  const double n = std::sqrt(q.x * q.x + q.y * q.y + q.z * q.z);
  const double theta = 2.0 * std::atan2(n, q.w);
  if (n < 1e-12) return RotationAA(2.0 * q.x, 2.0 * q.y, 2.0 * q.z);
  const double s = theta / n;
  return RotationAA(q.x * s, q.y * s, q.z * s);
}

RotationAA rotation_aa_from_matrix(const Mat3& m) {
  return rotation_aa_from_quaternion(quaternion_from_matrix(m));
}

Rot6D rot6d_from_matrix(const Mat3& m) {
  Rot6D r;
  r.v = {m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1)};
  return r;
}

Quaternion quaternion_from_aa(const RotationAA& r) {
  require_finite(r.v, "axis-angle");
  const double theta = r.angle();
  Quaternion q;
  if (theta < 1e-12) {
    q = Quaternion{1.0, 0.5 * r.v.x, 0.5 * r.v.y, 0.5 * r.v.z};
  } else {
    const double h = 0.5 * theta;
    const double s = std::sin(h) / theta;
    q = Quaternion{std::cos(h), r.v.x * s, r.v.y * s, r.v.z * s};
  }
  return q.normalized();
}

double geodesic(const Mat3& r1, const Mat3& r2) {
  const double u = (r1.dot_trace(r2) - 1.0) * 0.5;
  const double uc = std::clamp(u, -1.0, 1.0);
  const double th = std::acos(uc);
  if (!std::isfinite(th)) fail(Err::nonfinite, "NonFinite: geodesic");
  return th;
}

double geodesic(const RotationAA& r1, const RotationAA& r2) {
  return geodesic(to_matrix(r1), to_matrix(r2));
}

Quaternion slerp(const Quaternion& q1_in, const Quaternion& q2_in, double t) {
  const Quaternion a = q1_in.normalized();
  Quaternion b = q2_in.normalized();
  double d = a.dot(b);
  if (d < 0.0) {  // shortest arc
    b = Quaternion{-b.w, -b.x, -b.y, -b.z};
    d = -d;
  }
  double wa, wb;
  if (d > 1.0 - 1e-7) {
    wa = 1.0 - t;  // nlerp fallback, renormalized below
    wb = t;
  } else {
    const double th = std::acos(std::min(d, 1.0));
    const double s = std::sin(th);
    wa = std::sin((1.0 - t) * th) / s;
    wb = std::sin(t * th) / s;
  }
  Quaternion out{wa * a.w + wb * b.w, wa * a.x + wb * b.x, wa * a.y + wb * b.y,
                 wa * a.z + wb * b.z};
  const double n =
      std::sqrt(out.w * out.w + out.x * out.x + out.y * out.y + out.z * out.z);
  if (!(n > 0.0) || !std::isfinite(n)) fail(Err::nonfinite, "NonFinite: slerp");
  // Scale only; hemisphere is already fixed by the dot-product flip.
  return Quaternion{out.w / n, out.x / n, out.y / n, out.z / n};
}

Vec2 project(const Vec3& point, const CameraIntrinsics& K,
             const CameraExtrinsics& ext) {
  require_finite(point, "project point");
  if (K.fx <= 0.0 || K.fy <= 0.0)
    fail(Err::bad_config, "camera focal lengths must be positive");
  const Mat3 R = to_matrix(ext.rotation);
  const Vec3 pc = R * point + ext.translation;
  if (pc.z <= kMinProjectDepth)
    fail(Err::behind_camera, "BehindCamera: point at or behind the camera");
  return {K.fx * pc.x / pc.z + K.cx, K.fy * pc.y / pc.z + K.cy};
}

}  // namespace hmf
