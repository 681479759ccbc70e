// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/priortrain.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "hmf/optim.hpp"

namespace hmf {

RotationAA reflect_rotation(const RotationAA& r) {
  return RotationAA(-r.v.x, r.v.y, -r.v.z);
}

std::array<RotationAA, kNumArticulated> reflect_pose(
    const std::array<RotationAA, kNumArticulated>& pose) {
  std::array<RotationAA, kNumArticulated> out;
  for (int s = 0; s < kNumArticulated; ++s) out[s] = reflect_rotation(pose[s]);
  return out;
}

PoseFrame reflect_pose(const PoseFrame& pose) {
  PoseFrame out;
  for (int s = 0; s < kNumArticulated; ++s)
    out[s] = to_matrix(reflect_rotation(rotation_aa_from_matrix(pose[s])));
  return out;
}

std::vector<ProcessedClip> preprocess(std::span<const RawSequence> raw,
                                      const SkeletonSpec& skel, int clip_len) {
  std::vector<ProcessedClip> clips;
  for (const RawSequence& seq : raw) {
    const bool left = seq.handedness == "left";
    if (!left && seq.handedness != "right")
      fail(Err::bad_config, "BadHandedness: " + seq.handedness);
    const int T = static_cast<int>(seq.motion.frames.size());
    if (T < clip_len)
      fail(Err::too_short,
           "TooShort: sequence has " + std::to_string(T) + " frames, need " +
               std::to_string(clip_len));

    PoseSeq poses(T);
    for (int t = 0; t < T; ++t) {
      const auto& aa = seq.motion.frames[t].pose;
      const auto src = left ? reflect_pose(aa) : aa;
      for (int s = 0; s < kNumArticulated; ++s) poses[t][s] = to_matrix(src[s]);
    }

    for (int start = 0; start + clip_len <= T; start += clip_len) {
      PoseSeq slice(poses.begin() + start, poses.begin() + start + clip_len);
      ProcessedClip clip;
      clip.X = motion_features(skel, slice, seq.motion.fps);
      clip.fps = seq.motion.fps;
      clip.joints = kNumArticulated;
      clips.push_back(std::move(clip));
    }
  }
  return clips;
}

Eigen::MatrixXd clip_pose6d(const ProcessedClip& clip) {
  constexpr int kChan = 15;
  Eigen::MatrixXd out(clip.X.rows(), clip.joints * 6);
  for (int t = 0; t < clip.X.rows(); ++t)
    for (int s = 0; s < clip.joints; ++s)
      out.row(t).segment(6 * s, 6) = clip.X.row(t).segment(kChan * s + 6, 6);
  return out;
}

namespace {

/// Stacks sliding windows of the clips' 6D channels, one row per window.
Eigen::MatrixXd gather_windows(std::span<const ProcessedClip> clips,
                               int window_len, int stride) {
  std::vector<Eigen::VectorXd> rows;
  for (const ProcessedClip& clip : clips) {
    const Eigen::MatrixXd d6 = clip_pose6d(clip);
    const int width = static_cast<int>(d6.cols());
    for (int s : window_starts(static_cast<int>(d6.rows()), window_len, stride)) {
      Eigen::VectorXd row(window_len * width);
      for (int f = 0; f < window_len; ++f)
        row.segment(f * width, width) = d6.row(s + f).transpose();
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) fail(Err::too_short, "TooShort: no analysis windows");
  Eigen::MatrixXd m(static_cast<int>(rows.size()), rows[0].size());
  for (size_t i = 0; i < rows.size(); ++i) m.row(i) = rows[i].transpose();
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// PCA
// ---------------------------------------------------------------------------

PcaFitResult fit_pca_windows(const Eigen::MatrixXd& rows, int k,
                             int window_len, int stride) {
  const int n = static_cast<int>(rows.rows());
  const int D = static_cast<int>(rows.cols());
  if (n < 1) fail(Err::too_short, "TooShort: no windows");
  if (k < 1) fail(Err::bad_config, "component count must be positive");

  PcaFitResult result;
  result.prior.window_len = window_len;
  result.prior.stride = stride;
  result.prior.requested_components = k;
  result.prior.mean = rows.colwise().mean();

  Eigen::MatrixXd centered = rows.rowwise() - result.prior.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered,
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double cutoff = std::max(sv.size() ? sv(0) : 0.0, 1e-300) * 1e-10;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;

  int kept = std::min(k, rank);
  if (kept < k) result.rank_deficient = true;
  if (kept < 1) kept = 1;  // degenerate data: keep one direction

  const double denom = std::max(n - 1, 1);
  result.prior.basis = svd.matrixV().leftCols(kept);
  result.prior.variances = Eigen::VectorXd(kept);
  for (int i = 0; i < kept; ++i)
    result.prior.variances(i) = std::max(sv(i) * sv(i) / denom, 1e-12);

  const double total_var = centered.squaredNorm() / denom;
  const double kept_var = result.prior.variances.sum();
  const int residual_dims = std::max(D - kept, 1);
  result.prior.residual_variance =
      std::max((total_var - kept_var) / residual_dims, 1e-8);
  result.explained_variance = result.prior.variances;
  result.prior.trained = true;
  return result;
}

PcaFitResult fit_pca(std::span<const ProcessedClip> clips, int k,
                     int window_len, int stride) {
  return fit_pca_windows(gather_windows(clips, window_len, stride), k,
                         window_len, stride);
}

// ---------------------------------------------------------------------------
// GMM
// ---------------------------------------------------------------------------

namespace {

/// k-means++ seeding over window rows.
Eigen::MatrixXd kmeanspp_centers(const Eigen::MatrixXd& rows, int K, Rng& rng) {
  const int n = static_cast<int>(rows.rows());
  Eigen::MatrixXd centers(rows.cols(), K);
  centers.col(0) = rows.row(static_cast<int>(rng.index(n))).transpose();
  Eigen::VectorXd d2 =
      (rows.rowwise() - centers.col(0).transpose()).rowwise().squaredNorm();
  for (int k = 1; k < K; ++k) {
    const double total = d2.sum();
    int pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (; pick < n - 1; ++pick) {
        u -= d2(pick);
        if (u <= 0.0) break;
      }
    } else {
      pick = static_cast<int>(rng.index(n));
    }
    centers.col(k) = rows.row(pick).transpose();
    d2 = d2.cwiseMin(
        (rows.rowwise() - centers.col(k).transpose()).rowwise().squaredNorm());
  }
  return centers;
}

constexpr double kVarFloor = 1e-6;

}  // namespace

GmmFitResult fit_gmm_windows(const Eigen::MatrixXd& rows, int K,
                             std::uint64_t rng_seed, int max_iter, double tol,
                             int window_len, int stride) {
  const int n = static_cast<int>(rows.rows());
  const int D = static_cast<int>(rows.cols());
  if (K < 1) fail(Err::bad_config, "component count must be positive");
  if (n < K) fail(Err::too_short, "TooShort: fewer windows than components");

  Rng rng(rng_seed);
  GmmFitResult result;
  GmmPrior& g = result.prior;
  g.window_len = window_len;
  g.stride = stride;
  g.weights = Eigen::VectorXd::Constant(K, 1.0 / K);
  g.means = kmeanspp_centers(rows, K, rng);

  // Shared initial variance from the global spread.
  const Eigen::VectorXd mean = rows.colwise().mean();
  Eigen::VectorXd var0 =
      ((rows.rowwise() - mean.transpose()).array().square().colwise().sum() /
       std::max(n - 1, 1))
          .transpose();
  var0 = var0.cwiseMax(kVarFloor);
  g.vars = var0.replicate(1, K);
  g.trained = true;

  Eigen::MatrixXd logp(n, K);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // E-step.
    for (int k = 0; k < K; ++k) {
      const double logw = std::log(g.weights(k));
      const double logdet =
          0.5 * (g.vars.col(k).array().log() + std::log(2.0 * M_PI)).sum();
      logp.col(k) =
          (((rows.rowwise() - g.means.col(k).transpose()).array().square().rowwise() /
            g.vars.col(k).transpose().array())
               .rowwise()
               .sum() *
           -0.5)
              .matrix();
      logp.col(k).array() += logw - logdet;
    }
    const Eigen::VectorXd rowmax = logp.rowwise().maxCoeff();
    const Eigen::VectorXd lse =
        rowmax.array() +
        (logp.colwise() - rowmax).array().exp().rowwise().sum().log();
    const double ll = lse.sum();
    if (!std::isfinite(ll))
      fail(Err::diverged, "EmDiverged: non-finite log-likelihood");
    result.loglik_trace.push_back(ll);
    result.iterations = iter + 1;

    Eigen::MatrixXd resp = (logp.colwise() - lse).array().exp();

    // M-step.
    const Eigen::VectorXd nk = resp.colwise().sum();
    for (int k = 0; k < K; ++k) {
      const double w = std::max(nk(k), 1e-12);
      g.weights(k) = w / n;
      g.means.col(k) = (rows.transpose() * resp.col(k)) / w;
      const Eigen::MatrixXd diff = rows.rowwise() - g.means.col(k).transpose();
      g.vars.col(k) =
          ((diff.array().square().colwise() * resp.col(k).array()).colwise().sum() /
           w)
              .transpose()
              .cwiseMax(kVarFloor);
    }
    g.weights /= g.weights.sum();

    if (iter > 0 && ll - prev_ll < tol) break;
    prev_ll = ll;
  }
  (void)D;
  return result;
}

GmmFitResult fit_gmm(std::span<const ProcessedClip> clips, int K,
                     std::uint64_t rng_seed, int max_iter, double tol,
                     int window_len, int stride) {
  return fit_gmm_windows(gather_windows(clips, window_len, stride), K,
                         rng_seed, max_iter, tol, window_len, stride);
}

// ---------------------------------------------------------------------------
// Latent field VAE training
// ---------------------------------------------------------------------------

namespace {

Mat3T<ad::Value> constant_mat3(const Mat3& m) {
  Mat3T<ad::Value> out;
  for (int i = 0; i < 9; ++i) out.a[i] = ad::Value(m.a[i]);
  return out;
}

struct TensorAdam {
  std::vector<Eigen::MatrixXd> mW, vW;
  std::vector<Eigen::VectorXd> mb, vb;

  void init(const Mlp& net) {
    for (size_t i = 0; i < net.W.size(); ++i) {
      mW.emplace_back(Eigen::MatrixXd::Zero(net.W[i].rows(), net.W[i].cols()));
      vW.emplace_back(Eigen::MatrixXd::Zero(net.W[i].rows(), net.W[i].cols()));
      mb.emplace_back(Eigen::VectorXd::Zero(net.b[i].size()));
      vb.emplace_back(Eigen::VectorXd::Zero(net.b[i].size()));
    }
  }

  void step(Mlp& net, const Mlp::Grads& g, long t, const AdamParams& p) {
    for (size_t i = 0; i < net.W.size(); ++i) {
      adam_update({net.W[i].data(), static_cast<size_t>(net.W[i].size())},
                  {g.dW[i].data(), static_cast<size_t>(g.dW[i].size())},
                  {mW[i].data(), static_cast<size_t>(mW[i].size())},
                  {vW[i].data(), static_cast<size_t>(vW[i].size())}, t, p);
      adam_update({net.b[i].data(), static_cast<size_t>(net.b[i].size())},
                  {g.db[i].data(), static_cast<size_t>(g.db[i].size())},
                  {mb[i].data(), static_cast<size_t>(mb[i].size())},
                  {vb[i].data(), static_cast<size_t>(vb[i].size())}, t, p);
    }
  }
};

}  // namespace

LatentTrainResult train_latent_field(std::span<const ProcessedClip> clips,
                                     const LatentFieldHyper& hyper,
                                     const LatentTrainConfig& config,
                                     const SkeletonSpec& skel,
                                     std::uint64_t seed) {
  if (clips.empty()) fail(Err::too_short, "TooShort: no training clips");
  Rng rng(seed);
  LatentTrainResult result;
  LatentFieldPrior& prior = result.prior;
  prior = LatentFieldPrior::create(hyper, skel, rng);
  const int D = hyper.latent_dim;
  const int n_clips = static_cast<int>(clips.size());

  // Feature standardization over the full training set.
  {
    long total = 0;
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(prior.feat_mean.size());
    Eigen::VectorXd sum2 = Eigen::VectorXd::Zero(prior.feat_mean.size());
    for (const auto& c : clips) {
      sum += c.X.colwise().sum().transpose();
      sum2 += c.X.array().square().colwise().sum().transpose().matrix();
      total += c.X.rows();
    }
    prior.feat_mean = sum / total;
    prior.feat_std =
        ((sum2 / total - prior.feat_mean.array().square().matrix()).array().max(
             1e-12))
            .sqrt()
            .matrix()
            .cwiseMax(1e-6);
  }

  // Per-clip standardized features (columns = frames) and target rotations.
  std::vector<Eigen::MatrixXd> feats(n_clips);
  std::vector<PoseSeq> targets(n_clips);
  for (int c = 0; c < n_clips; ++c) {
    Eigen::MatrixXd X = clips[c].X.transpose();
    for (int col = 0; col < X.cols(); ++col)
      X.col(col) = (X.col(col) - prior.feat_mean).cwiseQuotient(prior.feat_std);
    feats[c] = std::move(X);
    targets[c] = poses_from_6d(clip_pose6d(clips[c]));
  }
  const int T = static_cast<int>(clips[0].X.rows());
  const std::vector<double> times = prior.clip_times(T);

  TensorAdam adam_dec, adam_emb, adam_head;
  adam_dec.init(prior.decoder);
  adam_emb.init(prior.encoder_embed);
  adam_head.init(prior.encoder_head);
  AdamParams adam_params;
  adam_params.lr = config.lr;
  long step = 0;

  ad::Tape tape(1 << 18);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const double anneal =
        config.kl_anneal_epochs > 0
            ? std::min(1.0, static_cast<double>(epoch) / config.kl_anneal_epochs)
            : 1.0;
    const double kl_w = config.kl_weight * anneal;
    double ep_loss = 0.0, ep_recon = 0.0, ep_kl = 0.0;

    for (int c = 0; c < n_clips; ++c) {
      // Encoder forward.
      Mlp::Cache emb_cache, head_cache;
      const Eigen::MatrixXd emb =
          prior.encoder_embed.forward(feats[c], &emb_cache);
      const Eigen::VectorXd pooled = emb.rowwise().mean();
      const Eigen::VectorXd head =
          prior.encoder_head.forward(pooled, &head_cache);
      const Eigen::VectorXd mu = head.head(D);
      Eigen::VectorXd lv = head.tail(D);
      std::vector<bool> lv_clamped(D);
      for (int d = 0; d < D; ++d) {
        lv_clamped[d] = lv(d) < -12.0 || lv(d) > 8.0;
        lv(d) = std::clamp(lv(d), -12.0, 8.0);
      }
      const Eigen::VectorXd sigma = (0.5 * lv.array()).exp();
      Eigen::VectorXd eps(D);
      for (int d = 0; d < D; ++d) eps(d) = rng.normal();
      const Eigen::VectorXd z = mu + sigma.cwiseProduct(eps);

      // Decoder forward.
      std::vector<Mlp::Cache> dec_caches;
      const Eigen::MatrixXd raw6d = prior.decode_raw6d(z, times, &dec_caches);

      // Reconstruction on the tape: Gram-Schmidt then squared geodesic.
      tape.reset();
      std::vector<ad::Value> leaves(T * kNumArticulated * 6);
      ad::Value recon_sum(0.0);
      for (int t = 0; t < T; ++t) {
        for (int s = 0; s < kNumArticulated; ++s) {
          std::array<ad::Value, 6> d6;
          for (int i = 0; i < 6; ++i) {
            const int li = (t * kNumArticulated + s) * 6 + i;
            leaves[li] = tape.leaf(raw6d(t, 6 * s + i));
            d6[i] = leaves[li];
          }
          const Mat3T<ad::Value> R = rot6d_to_matrix_t<ad::Value>(d6);
          recon_sum = recon_sum +
                      geodesic_sq_t<ad::Value>(R, constant_mat3(targets[c][t][s]));
        }
      }
      const double inv_count = 1.0 / (T * kNumArticulated);
      const double recon = recon_sum.val() * inv_count;

      double kl = 0.0;
      for (int d = 0; d < D; ++d)
        kl += 0.5 * (mu(d) * mu(d) + sigma(d) * sigma(d) - lv(d) - 1.0);
      const double loss = recon + kl_w * kl;
      if (!std::isfinite(loss))
        fail(Err::nonfinite, "NonFiniteLoss: epoch " + std::to_string(epoch));
      ep_loss += loss;
      ep_recon += recon;
      ep_kl += kl;

      // Backward.
      const auto adj = tape.backward(recon_sum);
      Eigen::MatrixXd d_raw6d(T, kNumArticulated * 6);
      for (int t = 0; t < T; ++t)
        for (int i = 0; i < kNumArticulated * 6; ++i)
          d_raw6d(t, i) = adj[leaves[(t * kNumArticulated * 6) + i].idx] * inv_count;

      Mlp::Grads dec_grads = prior.decoder.zero_grads();
      const Eigen::VectorXd dz =
          prior.decode_vjp_train(dec_caches, d_raw6d, &dec_grads);

      Eigen::VectorXd dmu = dz + kl_w * mu;
      Eigen::VectorXd dlv(D);
      for (int d = 0; d < D; ++d) {
        dlv(d) = 0.5 * sigma(d) * eps(d) * dz(d) +
                 kl_w * 0.5 * (sigma(d) * sigma(d) - 1.0);
        if (lv_clamped[d]) dlv(d) = 0.0;
      }
      Eigen::VectorXd dhead(2 * D);
      dhead.head(D) = dmu;
      dhead.tail(D) = dlv;

      Mlp::Grads head_grads = prior.encoder_head.zero_grads();
      const Eigen::MatrixXd dpooled =
          prior.encoder_head.backward(dhead, head_cache, &head_grads);
      Eigen::MatrixXd demb = (dpooled / static_cast<double>(feats[c].cols()))
                                 .replicate(1, feats[c].cols());
      Mlp::Grads emb_grads = prior.encoder_embed.zero_grads();
      prior.encoder_embed.backward(demb, emb_cache, &emb_grads);

      ++step;
      adam_dec.step(prior.decoder, dec_grads, step, adam_params);
      adam_emb.step(prior.encoder_embed, emb_grads, step, adam_params);
      adam_head.step(prior.encoder_head, head_grads, step, adam_params);
    }

    result.loss_trace.push_back(ep_loss / n_clips);
    result.recon_trace.push_back(ep_recon / n_clips);
    result.kl_trace.push_back(ep_kl / n_clips);
  }

  prior.trained = true;
  return result;
}

}  // namespace hmf
