// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/ingest.hpp"

#include <algorithm>
#include <cmath>

namespace hmf {

std::array<double, kNumJoints> confidence_from_views(
    const AugmentedDetectionSet& set, double gamma) {
  if (set.views.empty()) fail(Err::too_short, "EmptySet: no augmented views");
  if (!(gamma > 0.0)) fail(Err::bad_config, "gamma must be positive");
  const double n = static_cast<double>(set.views.size());
  std::array<double, kNumJoints> alpha{};
  for (int j = 0; j < kNumJoints; ++j) {
    double var = 0.0;
    for (const auto& view : set.views)
      var += (view[j] - set.original[j]).squared_norm();
    var /= n;
    const double sigma = std::min(std::sqrt(var), gamma);
    alpha[j] = 1.0 - sigma / gamma;
  }
  return alpha;
}

Observation blend_keypoints(
    const DetectionSequence& primary,
    std::span<const std::array<Vec2, kNumJoints>> fallback,
    std::span<const uint8_t> fallback_valid, double fallback_conf) {
  const size_t T = primary.frames.size();
  if (fallback.size() != T || fallback_valid.size() != T)
    fail(Err::mismatch, "LengthMismatch: fallback must cover all frames");
  Observation obs;
  obs.frames.resize(T);
  for (size_t t = 0; t < T; ++t) {
    ObservationFrame& out = obs.frames[t];
    if (primary.frames[t].has_value()) {
      const DetectionFrame& det = *primary.frames[t];
      out.present = true;
      out.keypoints = det.keypoints;
      out.conf = det.conf;
      out.source = KeypointSource::primary;
      out.source_tag = det.source;
    } else if (fallback_valid[t]) {
      out.present = true;
      out.keypoints = fallback[t];
      out.conf.fill(fallback_conf);
      out.source = KeypointSource::fallback;
      out.source_tag = "fallback";
    }
  }
  return obs;
}

MotionSequence slerp_fill(const InitialEstimate& init, double threshold) {
  const int T = static_cast<int>(init.motion.frames.size());
  if (static_cast<int>(init.bbox_conf.size()) != T)
    fail(Err::mismatch, "LengthMismatch: bbox confidences");
  std::vector<int> good;
  for (int t = 0; t < T; ++t)
    if (init.bbox_conf[t] >= threshold) good.push_back(t);
  if (good.empty())
    fail(Err::no_confident_frames,
         "NoConfidentFrames: every frame is below the threshold");

  MotionSequence out = init.motion;
  auto interpolate = [&](int l, int r, int t) {
    const HandState& a = init.motion.frames[l];
    const HandState& b = init.motion.frames[r];
    HandState& dst = out.frames[t];
    const double u = static_cast<double>(t - l) / static_cast<double>(r - l);
    dst.global_orient = rotation_aa_from_quaternion(
        slerp(quaternion_from_aa(a.global_orient),
              quaternion_from_aa(b.global_orient), u));
    dst.transl = a.transl + (b.transl - a.transl) * u;
    for (int s = 0; s < kNumArticulated; ++s)
      dst.pose[s] = rotation_aa_from_quaternion(slerp(
          quaternion_from_aa(a.pose[s]), quaternion_from_aa(b.pose[s]), u));
    dst.shape = init.motion.shape;
  };

  for (int t = 0; t < T; ++t) {
    if (init.bbox_conf[t] >= threshold) continue;
    const auto right = std::lower_bound(good.begin(), good.end(), t);
    if (right == good.begin()) {
      out.frames[t] = init.motion.frames[good.front()];  // leading run
    } else if (right == good.end()) {
      out.frames[t] = init.motion.frames[good.back()];   // trailing run
    } else {
      interpolate(*(right - 1), *right, t);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Joint-order remapping
// ---------------------------------------------------------------------------

std::array<int, kNumJoints> keypoint_order_permutation(const std::string& tag) {
  // perm[i] = source index holding canonical joint i.
  std::array<int, kNumJoints> identity;
  for (int i = 0; i < kNumJoints; ++i) identity[i] = i;
  if (tag == "canonical" || tag == "mediapipe") return identity;
  if (tag == "mano21") {
    // Source: wrist, index(3), middle(3), pinky(3), ring(3), thumb(3),
    // then tips [index, middle, pinky, ring, thumb].
    return {0,
            13, 14, 15, 20,   // thumb chain + tip
            1, 2, 3, 16,      // index
            4, 5, 6, 17,      // middle
            10, 11, 12, 19,   // ring
            7, 8, 9, 18};     // pinky
  }
  fail(Err::unknown_joint_order, "UnknownJointOrder: " + tag);
}

std::array<int, kNumArticulated> pose_order_permutation(const std::string& tag) {
  std::array<int, kNumArticulated> identity;
  for (int i = 0; i < kNumArticulated; ++i) identity[i] = i;
  if (tag == "canonical") return identity;
  if (tag == "mano15") {
    // Source order: index, middle, pinky, ring, thumb (3 joints each).
    return {12, 13, 14, 0, 1, 2, 3, 4, 5, 9, 10, 11, 6, 7, 8};
  }
  fail(Err::unknown_joint_order, "UnknownJointOrder: " + tag);
}

}  // namespace hmf
