// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "hmf/prior.hpp"

namespace hmf {

/// Fixed-length training clip in the per-joint 15-channel representation
/// [position(3), velocity(3), 6D rotation(6), angular velocity(3)]; one row
/// per timestep, joints laid out contiguously.
struct ProcessedClip {
  Eigen::MatrixXd X;  // clip_len x (joints * 15)
  double fps = 30.0;
  int joints = kNumArticulated;
};

struct RawSequence {
  MotionSequence motion;
  std::string handedness = "right";
};

/// Mirror a local pose into the opposite handedness (thumb-side reflection);
/// an involution.
RotationAA reflect_rotation(const RotationAA& r);
std::array<RotationAA, kNumArticulated> reflect_pose(
    const std::array<RotationAA, kNumArticulated>& pose);
PoseFrame reflect_pose(const PoseFrame& pose);

/// Left-hand sequences are reflected into right-hand convention, then every
/// sequence is sliced into non-overlapping `clip_len`-frame clips (remainder
/// dropped) and featurized.
std::vector<ProcessedClip> preprocess(std::span<const RawSequence> raw,
                                      const SkeletonSpec& skel,
                                      int clip_len = 128);

/// The 6D pose channels of a clip (clip_len x 90).
Eigen::MatrixXd clip_pose6d(const ProcessedClip& clip);

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

struct PcaFitResult {
  PcaPrior prior;
  bool rank_deficient = false;       // k was shrunk
  Eigen::VectorXd explained_variance;  // per kept component
};

/// SVD fit over arbitrary row-windows (each row one flattened window).
PcaFitResult fit_pca_windows(const Eigen::MatrixXd& rows, int k,
                             int window_len, int stride);

PcaFitResult fit_pca(std::span<const ProcessedClip> clips, int k,
                     int window_len = 16, int stride = 8);

// ---------------------------------------------------------------------------
// GMM (EM with k-means++ initialization)
// ---------------------------------------------------------------------------

struct GmmFitResult {
  GmmPrior prior;
  std::vector<double> loglik_trace;  // total log-likelihood per EM iteration
  int iterations = 0;
};

GmmFitResult fit_gmm_windows(const Eigen::MatrixXd& rows, int K,
                             std::uint64_t rng_seed, int max_iter, double tol,
                             int window_len, int stride);

GmmFitResult fit_gmm(std::span<const ProcessedClip> clips, int K,
                     std::uint64_t rng_seed, int max_iter = 100,
                     double tol = 1e-6, int window_len = 16, int stride = 8);

// ---------------------------------------------------------------------------
// Latent field VAE
// ---------------------------------------------------------------------------

struct LatentTrainConfig {
  int epochs = 200;
  double lr = 1e-3;
  double kl_weight = 1e-3;   // final weight, reached after annealing
  int kl_anneal_epochs = 60;
};

struct LatentTrainResult {
  LatentFieldPrior prior;
  std::vector<double> loss_trace;   // per-epoch means
  std::vector<double> recon_trace;  // mean squared geodesic (rad^2)
  std::vector<double> kl_trace;
};

/// VAE objective: mean squared geodesic reconstruction of the orthonormalized
/// decoder outputs plus annealed KL to N(0, I). Deterministic per seed.
LatentTrainResult train_latent_field(std::span<const ProcessedClip> clips,
                                     const LatentFieldHyper& hyper,
                                     const LatentTrainConfig& config,
                                     const SkeletonSpec& skel,
                                     std::uint64_t seed);

}  // namespace hmf
