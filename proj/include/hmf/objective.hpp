// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "hmf/optim.hpp"
#include "hmf/prior.hpp"

namespace hmf {

/// Per-term coefficients plus the optimizer learning rate. The stage presets
/// are the fitting defaults.
struct LossWeights {
  double orient = 3.0;         // anchor to initial global orientation
  double transl = 1.0;         // anchor to initial translation
  double shape = 3.0;          // pull shape coefficients to zero
  double orient_smooth = 1.0;  // consecutive-frame orientation smoothness
  double transl_smooth = 5.0;  // consecutive-frame translation smoothness
  double reproj = 0.05;        // robust 2D keypoint term
  double motion_prior = 0.0;   // latent/window NLL (stage 2)
  double lr = 0.05;

  static LossWeights stage1();
  static LossWeights stage2();
};

enum class KeypointSource { none, primary, fallback };

struct ObservationFrame {
  bool present = false;  // frame in the detected set
  std::array<Vec2, kNumJoints> keypoints{};
  std::array<double, kNumJoints> conf{};
  KeypointSource source = KeypointSource::none;
  std::string source_tag;
};

struct Observation {
  std::vector<ObservationFrame> frames;

  int frame_count() const { return static_cast<int>(frames.size()); }
  int detect_count() const {
    int n = 0;
    for (const auto& f : frames) n += f.present ? 1 : 0;
    return n;
  }
};

/// Plain-value motion state used by the double-precision loss API.
struct MotionParams {
  std::vector<Mat3> orient;
  std::vector<Vec3> transl;
  PoseSeq pose;
  std::array<double, kNumShape> shape{};
};

MotionParams motion_params_from(const MotionSequence& motion);
MotionSequence to_motion_sequence(const MotionParams& params, double fps);

// ---------------------------------------------------------------------------
// Individual loss terms
// ---------------------------------------------------------------------------

double loss_orient(std::span<const Mat3> cur, std::span<const Mat3> init);
double loss_transl(std::span<const Vec3> cur, std::span<const Vec3> init);
double loss_shape(std::span<const double> shape);
double loss_orient_smooth(std::span<const Mat3> seq);
double loss_transl_smooth(std::span<const Vec3> seq);
double loss_pose_smooth(const PoseSeq& seq);

/// Geman-McClure penalty on a squared residual: s^2 r^2 / (r^2 + s^2),
/// saturating at s^2.
double geman_mcclure(double squared_residual, double scale);

double loss_2d(const SkeletonSpec& skel, const MotionParams& params,
               const Observation& obs, const CameraIntrinsics& K,
               const CameraExtrinsics& ext, double gm_scale);

/// Latent-code negative log-likelihood against a frozen anchor posterior.
double loss_mp(const PriorModel& prior, const Eigen::VectorXd& z,
               const GaussianPosterior& anchor);
/// Window-NLL form for the pca/gmm variants; 0 for the none variant.
double loss_mp(const PriorModel& prior, const PoseSeq& poses);

// ---------------------------------------------------------------------------
// Stage objectives
// ---------------------------------------------------------------------------

enum class Stage { one = 1, two = 2 };

/// Everything the stage objectives close over. Anchors, masks, observations,
/// and camera stay fixed during a stage.
struct FitInputs {
  const SkeletonSpec* skel = nullptr;
  CameraIntrinsics camera;
  CameraExtrinsics extrinsics;
  const Observation* obs = nullptr;
  std::vector<Mat3> init_orient;
  std::vector<Vec3> init_transl;
  std::vector<uint8_t> init_valid;  // frames where the anchor terms apply
  std::array<double, kNumShape> init_shape{};
  PoseSeq init_pose;  // fixed pose in stage 1; pose-block start in stage 2
  double gm_scale = 100.0;
  double min_depth = 1e-4;  // soft projection depth clamp

  // Stage 2 only.
  const PriorModel* prior = nullptr;
  std::vector<std::pair<int, int>> windows;        // latent [start, end)
  std::vector<GaussianPosterior> anchors;          // per latent window
  std::vector<std::vector<double>> window_times;   // decode times per window

  int frame_count() const { return static_cast<int>(init_orient.size()); }
};

struct TotalBreakdown {
  double total = 0.0;
  std::vector<std::pair<std::string, double>> terms;  // weighted contributions
};

/// The stage objective at explicit parameter values. For the latent variant
/// the pose is decoded from `z`; otherwise `params.pose` is used.
TotalBreakdown total(Stage stage, const LossWeights& weights,
                     const FitInputs& inputs, const MotionParams& params,
                     const Eigen::VectorXd* z = nullptr);

/// Variable blocks for a stage: orient (T x 6D), transl (T x 3), shape (10),
/// plus `latent` or `pose` in stage 2 depending on the prior variant.
VariableSet make_stage_variables(Stage stage, const FitInputs& inputs,
                                 PriorVariant variant);

ObjectiveFn make_stage_objective(Stage stage, const LossWeights& weights,
                                 const FitInputs& inputs, PriorVariant variant);

/// Reads optimized blocks back into plain motion parameters (decoding the
/// latent code when applicable).
MotionParams extract_motion(Stage stage, const FitInputs& inputs,
                            const VariableSet& vars, PriorVariant variant);

}  // namespace hmf
