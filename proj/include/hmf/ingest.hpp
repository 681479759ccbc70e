// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hmf/objective.hpp"

namespace hmf {

struct DetectionFrame {
  std::string source;
  std::array<Vec2, kNumJoints> keypoints{};
  std::array<double, kNumJoints> conf{};  // defaults to 1.0 when absent
  std::optional<double> bbox_conf;
};

/// Per-frame detections; std::nullopt marks frames without a detection.
struct DetectionSequence {
  std::vector<std::optional<DetectionFrame>> frames;
  bool conf_defaulted = false;  // confidences were missing in the file
};

/// Original-view keypoints plus the same detection re-projected from N
/// augmented views, all in original image coordinates.
struct AugmentedDetectionSet {
  std::array<Vec2, kNumJoints> original{};
  std::vector<std::array<Vec2, kNumJoints>> views;
};

inline constexpr int kDefaultAugmentedViews = 11;
inline constexpr double kDefaultConfidenceGamma = 4.0;

/// Per-joint confidence from view scatter: sigma_j^2 is the mean squared
/// deviation from the original view, clipped at gamma, and
/// alpha_j = 1 - sigma_j / gamma.
std::array<double, kNumJoints> confidence_from_views(
    const AugmentedDetectionSet& set, double gamma = kDefaultConfidenceGamma);

/// Primary detections where present, else the projected fallback at
/// `fallback_conf`; frames with neither stay outside the detected set.
Observation blend_keypoints(
    const DetectionSequence& primary,
    std::span<const std::array<Vec2, kNumJoints>> fallback,
    std::span<const uint8_t> fallback_valid, double fallback_conf = 0.5);

/// Per-frame pose initialization with bounding-box confidences.
struct InitialEstimate {
  MotionSequence motion;
  std::vector<double> bbox_conf;
};

/// Replaces low-confidence runs by interpolation between the bracketing
/// confident frames: SLERP for orientations (global and per joint), linear
/// for translation; boundary runs clamp to the nearest confident frame.
MotionSequence slerp_fill(const InitialEstimate& init, double threshold = 0.5);

DetectionSequence load_detections(const std::string& path);
InitialEstimate load_initialization(const std::string& path);

/// Joint-order permutations applied at ingestion. `canonical` and
/// `mediapipe` coincide (wrist first, thumb to pinky, proximal to tip);
/// `mano21`/`mano15` cover regressor-style dumps.
std::array<int, kNumJoints> keypoint_order_permutation(const std::string& tag);
std::array<int, kNumArticulated> pose_order_permutation(const std::string& tag);

}  // namespace hmf
