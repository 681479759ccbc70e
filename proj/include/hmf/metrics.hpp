// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "hmf/handmodel.hpp"

namespace hmf {

using PoseFrame = std::array<Mat3, kNumArticulated>;
using PoseSeq = std::vector<PoseFrame>;

struct SimilarityTransform {
  double scale = 1.0;
  Mat3 rotation = Mat3::identity();
  Vec3 translation{0.0, 0.0, 0.0};

  Vec3 apply(const Vec3& p) const {
    return rotation * p * scale + translation;
  }
};

/// Least-squares similarity transform mapping `pred` onto `gt` (Umeyama,
/// reflection-corrected). Requires N >= 3 non-collinear target points.
SimilarityTransform procrustes_align(std::span<const Vec3> pred,
                                     std::span<const Vec3> gt);

/// Per-frame Procrustes-aligned mean joint error, millimeters. `frame_mask`
/// (optional) selects the frames that enter the average.
std::vector<double> pa_mpjpe_series(std::span<const JointArray> pred,
                                    std::span<const JointArray> gt);
double pa_mpjpe(std::span<const JointArray> pred,
                std::span<const JointArray> gt,
                const std::vector<uint8_t>* frame_mask = nullptr);

/// Root(wrist)-aligned mean joint error, millimeters.
double ra_mpjpe(std::span<const JointArray> pred,
                std::span<const JointArray> gt,
                const std::vector<uint8_t>* frame_mask = nullptr);

/// Root-aligned acceleration error, mm/s^2. Accelerations are second central
/// differences scaled by fps^2; linear-in-time components cancel exactly.
double ra_acc(std::span<const JointArray> pred, std::span<const JointArray> gt,
              double fps);

/// Fraction of matched joints within tau_mm. Precision and recall coincide on
/// matched sets, so the F-score reduces to this fraction.
double f_score(std::span<const Vec3> pred, std::span<const Vec3> gt,
               double tau_mm);

/// Average pairwise mean geodesic pose distance across samples (APD).
double diversity_apd(std::span<const PoseSeq> samples);

struct MetricsReport {
  double pa_mpjpe_mm = 0.0;
  double ra_mpjpe_mm = 0.0;
  double ra_acc_mm_s2 = 0.0;
  double f_at_5 = 0.0;
  double f_at_15 = 0.0;
  std::vector<double> pa_series_mm;
};

MetricsReport compute_metrics(std::span<const JointArray> pred,
                              std::span<const JointArray> gt, double fps);

}  // namespace hmf
