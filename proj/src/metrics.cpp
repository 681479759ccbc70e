// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/metrics.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace hmf {

namespace {

void require_matched(size_t a, size_t b, const char* what) {
  if (a != b) fail(Err::mismatch, std::string("LengthMismatch: ") + what);
}

double mean_joint_distance(const JointArray& a, const JointArray& b) {
  double s = 0.0;
  for (int j = 0; j < kNumJoints; ++j)
    s += std::sqrt((a[j] - b[j]).squared_norm());
  return s / kNumJoints;
}

JointArray root_aligned(const JointArray& a) {
  JointArray out;
  for (int j = 0; j < kNumJoints; ++j) out[j] = a[j] - a[0];
  return out;
}

}  // namespace

SimilarityTransform procrustes_align(std::span<const Vec3> pred,
                                     std::span<const Vec3> gt) {
  require_matched(pred.size(), gt.size(), "procrustes point counts");
  const int n = static_cast<int>(pred.size());
  if (n < 3) fail(Err::degenerate, "DegenerateConfiguration: need >= 3 points");

  Eigen::MatrixXd X(3, n), Y(3, n);
  for (int i = 0; i < n; ++i) {
    X.col(i) << pred[i].x, pred[i].y, pred[i].z;
    Y.col(i) << gt[i].x, gt[i].y, gt[i].z;
  }
  const Eigen::Vector3d xm = X.rowwise().mean();
  const Eigen::Vector3d ym = Y.rowwise().mean();
  X.colwise() -= xm;
  Y.colwise() -= ym;

  const Eigen::Matrix3d H = X * Y.transpose();
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      H, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::Vector3d sv = svd.singularValues();
  if (sv(1) <= 1e-12 * std::max(sv(0), 1e-300))
    fail(Err::degenerate, "DegenerateConfiguration: points are rank-deficient");

  Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0)
    D(2, 2) = -1.0;
  const Eigen::Matrix3d R = svd.matrixV() * D * svd.matrixU().transpose();

  const double var_x = X.squaredNorm();
  if (var_x <= 0.0)
    fail(Err::degenerate, "DegenerateConfiguration: zero spread");
  const double s = (D * sv.asDiagonal().toDenseMatrix()).trace() / var_x;

  const Eigen::Vector3d t = ym - s * R * xm;
  SimilarityTransform out;
  out.scale = s;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out.rotation(r, c) = R(r, c);
  out.translation = Vec3(t(0), t(1), t(2));
  return out;
}

std::vector<double> pa_mpjpe_series(std::span<const JointArray> pred,
                                    std::span<const JointArray> gt) {
  require_matched(pred.size(), gt.size(), "sequence lengths");
  std::vector<double> out;
  out.reserve(pred.size());
  for (size_t t = 0; t < pred.size(); ++t) {
    const SimilarityTransform st = procrustes_align(pred[t], gt[t]);
    JointArray aligned;
    for (int j = 0; j < kNumJoints; ++j) aligned[j] = st.apply(pred[t][j]);
    out.push_back(mean_joint_distance(aligned, gt[t]) * 1000.0);
  }
  return out;
}

namespace {

double masked_mean(const std::vector<double>& series,
                   const std::vector<uint8_t>* mask) {
  double s = 0.0;
  size_t n = 0;
  for (size_t t = 0; t < series.size(); ++t) {
    if (mask && !(*mask)[t]) continue;
    s += series[t];
    ++n;
  }
  if (n == 0) fail(Err::too_short, "TooShort: no frames selected");
  return s / n;
}

}  // namespace

double pa_mpjpe(std::span<const JointArray> pred, std::span<const JointArray> gt,
                const std::vector<uint8_t>* frame_mask) {
  if (frame_mask) require_matched(frame_mask->size(), pred.size(), "mask");
  return masked_mean(pa_mpjpe_series(pred, gt), frame_mask);
}

double ra_mpjpe(std::span<const JointArray> pred, std::span<const JointArray> gt,
                const std::vector<uint8_t>* frame_mask) {
  require_matched(pred.size(), gt.size(), "sequence lengths");
  if (frame_mask) require_matched(frame_mask->size(), pred.size(), "mask");
  std::vector<double> series(pred.size());
  for (size_t t = 0; t < pred.size(); ++t)
    series[t] =
        mean_joint_distance(root_aligned(pred[t]), root_aligned(gt[t])) *
        1000.0;
  return masked_mean(series, frame_mask);
}

double ra_acc(std::span<const JointArray> pred, std::span<const JointArray> gt,
              double fps) {
  require_matched(pred.size(), gt.size(), "sequence lengths");
  const int T = static_cast<int>(pred.size());
  if (T < 3) fail(Err::too_short, "TooShort: acceleration needs >= 3 frames");

  std::vector<JointArray> p(T), g(T);
  for (int t = 0; t < T; ++t) {
    p[t] = root_aligned(pred[t]);
    g[t] = root_aligned(gt[t]);
  }
  const double f2 = fps * fps;
  double s = 0.0;
  int n = 0;
  for (int t = 1; t + 1 < T; ++t) {
    for (int j = 0; j < kNumJoints; ++j) {
      const Vec3 ap = (p[t + 1][j] - p[t][j] * 2.0 + p[t - 1][j]) * f2;
      const Vec3 ag = (g[t + 1][j] - g[t][j] * 2.0 + g[t - 1][j]) * f2;
      s += std::sqrt((ap - ag).squared_norm());
      ++n;
    }
  }
  return s / n * 1000.0;
}

double f_score(std::span<const Vec3> pred, std::span<const Vec3> gt,
               double tau_mm) {
  require_matched(pred.size(), gt.size(), "point counts");
  int within = 0;
  for (size_t i = 0; i < pred.size(); ++i)
    if (std::sqrt((pred[i] - gt[i]).squared_norm()) * 1000.0 <= tau_mm)
      ++within;
  return static_cast<double>(within) / static_cast<double>(pred.size());
}

double diversity_apd(std::span<const PoseSeq> samples) {
  if (samples.size() < 2) fail(Err::too_short, "TooFew: need >= 2 samples");
  double total = 0.0;
  int pairs = 0;
  for (size_t a = 0; a < samples.size(); ++a) {
    for (size_t b = a + 1; b < samples.size(); ++b) {
      require_matched(samples[a].size(), samples[b].size(), "sample lengths");
      double d = 0.0;
      int n = 0;
      for (size_t t = 0; t < samples[a].size(); ++t)
        for (int s = 0; s < kNumArticulated; ++s) {
          d += geodesic(samples[a][t][s], samples[b][t][s]);
          ++n;
        }
      total += d / n;
      ++pairs;
    }
  }
  return total / pairs;
}

MetricsReport compute_metrics(std::span<const JointArray> pred,
                              std::span<const JointArray> gt, double fps) {
  MetricsReport r;
  r.pa_series_mm = pa_mpjpe_series(pred, gt);
  r.pa_mpjpe_mm = masked_mean(r.pa_series_mm, nullptr);
  r.ra_mpjpe_mm = ra_mpjpe(pred, gt);
  r.ra_acc_mm_s2 = ra_acc(pred, gt, fps);
  double f5 = 0.0, f15 = 0.0;
  for (size_t t = 0; t < pred.size(); ++t) {
    const SimilarityTransform st = procrustes_align(pred[t], gt[t]);
    JointArray aligned;
    for (int j = 0; j < kNumJoints; ++j) aligned[j] = st.apply(pred[t][j]);
    f5 += f_score(aligned, gt[t], 5.0);
    f15 += f_score(aligned, gt[t], 15.0);
  }
  r.f_at_5 = f5 / pred.size();
  r.f_at_15 = f15 / pred.size();
  return r;
}

}  // namespace hmf
