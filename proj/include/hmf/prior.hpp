// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "hmf/metrics.hpp"
#include "hmf/mlp.hpp"

namespace hmf {

using LatentCode = Eigen::VectorXd;

struct GaussianPosterior {
  Eigen::VectorXd mu;
  Eigen::VectorXd sigma;  // elementwise std dev, > 0
};

enum class PriorVariant { none, pca, gmm, latent };

std::string to_string(PriorVariant v);
PriorVariant prior_variant_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

/// [sin(2^k pi t), cos(2^k pi t)] for k = 0..freqs-1.
Eigen::VectorXd positional_encoding(double t, int freqs);

/// Per-frame motion features, one row per frame. Per joint:
/// [root-relative position(3), velocity(3), 6D rotation(6), angular
/// velocity(3)]; velocities are central differences (one-sided at the ends)
/// scaled by fps. This is both the prior-training representation and the
/// encoder input.
Eigen::MatrixXd motion_features(const SkeletonSpec& skel, const PoseSeq& poses,
                                double fps);

/// Frame-major flattening of the 6D pose channels (T x 90).
Eigen::MatrixXd poses_to_6d(const PoseSeq& poses);
PoseSeq poses_from_6d(const Eigen::MatrixXd& d6);  // Gram-Schmidt per joint

/// Start offsets of analysis windows covering a T-frame sequence; includes a
/// tail window when stride does not divide the remainder.
std::vector<int> window_starts(int T, int window_len, int stride);

// ---------------------------------------------------------------------------
// Latent field prior (time-conditioned decoder + sequence encoder)
// ---------------------------------------------------------------------------

struct LatentFieldHyper {
  int latent_dim = 128;
  int pe_frequencies = 8;
  int clip_len = 128;
  std::vector<int> decoder_hidden{512, 512, 512, 512};
  std::vector<int> encoder_hidden{256, 256};
  double train_fps = 30.0;
};

class LatentFieldPrior {
 public:
  LatentFieldHyper hyper;
  Mlp decoder;                    // [pe(t) ; z] -> 90 (15 x 6D)
  Mlp encoder_embed;              // per-frame features(225) -> embed
  Mlp encoder_head;               // pooled embed -> [mu ; log sigma^2]
  Eigen::VectorXd feat_mean, feat_std;  // feature standardization
  SkeletonSpec skeleton;          // skeleton the features were built with
  bool trained = false;

  /// Uninitialized-network constructor used by the trainer.
  static LatentFieldPrior create(const LatentFieldHyper& h,
                                 const SkeletonSpec& skel, Rng& rng);

  int latent_dim() const { return hyper.latent_dim; }

  /// Normalized decode times for the first `frames` steps of the trained
  /// clip grid.
  std::vector<double> clip_times(int frames) const;

  /// Raw decoder outputs (T x 90), evaluated frame by frame so any sub-grid
  /// evaluates bitwise-identically. `caches` (optional) enables decode_vjp.
  Eigen::MatrixXd decode_raw6d(const Eigen::VectorXd& z,
                               std::span<const double> times,
                               std::vector<Mlp::Cache>* caches) const;

  /// Orthonormalized pose sequence at the given times.
  PoseSeq decode(const Eigen::VectorXd& z, std::span<const double> times) const;

  /// dL/dz given dL/d(raw 6D outputs); companion of decode_raw6d.
  Eigen::VectorXd decode_vjp(const std::vector<Mlp::Cache>& caches,
                             const Eigen::MatrixXd& d_raw6d) const;

  /// Like decode_vjp but also accumulates decoder weight gradients.
  Eigen::VectorXd decode_vjp_train(const std::vector<Mlp::Cache>& caches,
                                   const Eigen::MatrixXd& d_raw6d,
                                   Mlp::Grads* dec_grads) const;

  GaussianPosterior encode(const PoseSeq& poses, double fps) const;
  GaussianPosterior encode(const PoseSeq& poses) const;

  /// -log N(z; mu, diag(sigma^2)).
  double nll(const Eigen::VectorXd& z, const GaussianPosterior& anchor) const;
};

// ---------------------------------------------------------------------------
// PCA prior over flattened 6D pose windows
// ---------------------------------------------------------------------------

struct PcaPrior {
  int window_len = 16;
  int stride = 8;
  Eigen::VectorXd mean;        // D = window_len * 90
  Eigen::MatrixXd basis;       // D x k, orthonormal columns
  Eigen::VectorXd variances;   // per-component, length k
  double residual_variance = 1e-4;
  int requested_components = 0;  // before any rank-deficiency shrink
  bool trained = false;

  int dim() const { return static_cast<int>(mean.size()); }
  int components() const { return static_cast<int>(basis.cols()); }

  double nll_window(const Eigen::VectorXd& x) const;
  /// Accumulates d(nll)/dx into `grad`.
  void nll_window_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
};

// ---------------------------------------------------------------------------
// GMM prior over flattened 6D pose windows
// ---------------------------------------------------------------------------

struct GmmPrior {
  int window_len = 16;
  int stride = 8;
  Eigen::VectorXd weights;   // K, simplex
  Eigen::MatrixXd means;     // D x K
  Eigen::MatrixXd vars;      // D x K, diagonal covariances (floored)
  bool trained = false;

  int dim() const { return static_cast<int>(means.rows()); }
  int component_count() const { return static_cast<int>(weights.size()); }

  double nll_window(const Eigen::VectorXd& x) const;
  void nll_window_grad(const Eigen::VectorXd& x, Eigen::VectorXd& grad) const;
};

// ---------------------------------------------------------------------------
// Variant wrapper + checkpoint container
// ---------------------------------------------------------------------------

struct PriorModel {
  PriorVariant variant = PriorVariant::none;
  PcaPrior pca;
  GmmPrior gmm;
  LatentFieldPrior latent;

  bool trained() const;
  void require_trained() const;  // throws ModelNotTrained

  /// Total window NLL of a pose sequence (pca/gmm variants; none -> 0).
  double nll_pose_sequence(const PoseSeq& poses) const;

  void save(const std::string& path) const;
  static PriorModel load(const std::string& path);
};

/// Seed-deterministic prior samples as pose sequences.
std::vector<PoseSeq> sample(const PriorModel& prior, int count,
                            std::uint64_t rng_seed);

}  // namespace hmf
