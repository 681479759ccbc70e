// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "hmf/geometry.hpp"

namespace hmf {

inline constexpr int kNumJoints = 21;      // wrist + 5 x (MCP, PIP, DIP, TIP)
inline constexpr int kNumArticulated = 15; // joints carrying local rotations
inline constexpr int kNumTips = 5;
inline constexpr int kNumShape = 10;

/// Skeleton-only parametric hand: per-joint parent offsets plus a linear
/// shape basis. Joint order: wrist first, then thumb/index/middle/ring/pinky,
/// each proximal to tip.
struct SkeletonSpec {
  std::array<int, kNumJoints> parent{};                       // -1 at wrist
  std::array<Vec3, kNumJoints> rest_offsets{};                // meters
  std::array<std::array<Vec3, kNumShape>, kNumJoints> shape_basis{};
  std::array<int, kNumArticulated> articulated{};             // rotation-bearing
  std::array<int, kNumTips> tips{};                           // leaf joints

  /// Index into the 15-slot pose vector, or -1 for wrist/tips.
  std::array<int, kNumJoints> pose_slot{};

  void rebuild_pose_slots();
  void validate() const;  // throws InvalidTopology
};

/// Per-frame hand parameters.
struct HandState {
  RotationAA global_orient;                       // world orientation of wrist
  Vec3 transl{0.0, 0.0, 0.0};                     // meters
  std::array<RotationAA, kNumArticulated> pose{}; // local joint rotations
  std::array<double, kNumShape> shape{};
};

struct MotionSequence {
  std::vector<HandState> frames;
  double fps = 30.0;
  std::array<double, kNumShape> shape{};  // shared across frames

  size_t size() const { return frames.size(); }
};

using JointArray = std::array<Vec3, kNumJoints>;

/// Shape-conditioned rest offsets (per joint, parent-relative).
std::array<Vec3, kNumJoints> shaped_offsets(
    const SkeletonSpec& spec, std::span<const double> shape);

/// Rest offsets accumulated along the chain: joint positions at identity pose.
JointArray rest_joints(const SkeletonSpec& spec, std::span<const double> shape);

JointArray forward_kinematics(const SkeletonSpec& spec, const HandState& state);

std::vector<JointArray> forward_kinematics(const SkeletonSpec& spec,
                                           const MotionSequence& motion);

/// The bundled synthetic right-hand skeleton (plausible adult bone lengths).
const SkeletonSpec& bundled_skeleton();

SkeletonSpec load_skeleton(const std::string& path);
void save_skeleton(const SkeletonSpec& spec, const std::string& path);

// ---------------------------------------------------------------------------
// Scalar-generic FK core
// ---------------------------------------------------------------------------

/// World joints given per-joint parent-relative offsets, a global rotation,
/// translation, and the 15 local rotations. Tips and the wrist inherit the
/// parent frame.
template <class S>
std::array<Vec3T<S>, kNumJoints> fk_joints_t(
    const SkeletonSpec& spec, const std::array<Vec3T<S>, kNumJoints>& offsets,
    const Mat3T<S>& global_rot, const Vec3T<S>& transl,
    std::span<const Mat3T<S>> local_rots) {
  std::array<Mat3T<S>, kNumJoints> world_rot;
  std::array<Vec3T<S>, kNumJoints> pos;
  for (int j = 0; j < kNumJoints; ++j) {
    const int p = spec.parent[j];
    const Mat3T<S>& parent_rot = (p < 0) ? global_rot : world_rot[p];
    pos[j] = (p < 0) ? transl + global_rot * offsets[j]
                     : pos[p] + parent_rot * offsets[j];
    const int slot = spec.pose_slot[j];
    world_rot[j] = (slot < 0) ? parent_rot : parent_rot * local_rots[slot];
  }
  return pos;
}

template <class S>
std::array<Vec3T<S>, kNumJoints> shaped_offsets_t(
    const SkeletonSpec& spec, std::span<const S> shape) {
  std::array<Vec3T<S>, kNumJoints> out;
  for (int j = 0; j < kNumJoints; ++j) {
    Vec3T<S> o(S(spec.rest_offsets[j].x), S(spec.rest_offsets[j].y),
               S(spec.rest_offsets[j].z));
    for (int k = 0; k < kNumShape; ++k) {
      const Vec3& b = spec.shape_basis[j][k];
      o += Vec3T<S>(S(b.x) * shape[k], S(b.y) * shape[k], S(b.z) * shape[k]);
    }
    out[j] = o;
  }
  return out;
}

}  // namespace hmf
