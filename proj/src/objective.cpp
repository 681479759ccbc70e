// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/objective.hpp"

#include <cmath>

namespace hmf {

LossWeights LossWeights::stage1() {
  LossWeights w;
  w.orient = 3.0;
  w.transl = 1.0;
  w.shape = 3.0;
  w.orient_smooth = 1.0;
  w.transl_smooth = 5.0;
  w.reproj = 0.05;
  w.motion_prior = 0.0;
  w.lr = 0.05;
  return w;
}

LossWeights LossWeights::stage2() {
  LossWeights w;
  w.orient = 2.0;
  w.transl = 1.0;
  w.shape = 10.0;
  w.orient_smooth = 1.0;
  w.transl_smooth = 0.0;  // not part of the stage-2 objective
  w.reproj = 0.05;
  w.motion_prior = 300.0;
  w.lr = 0.05;
  return w;
}

MotionParams motion_params_from(const MotionSequence& motion) {
  MotionParams p;
  const int T = static_cast<int>(motion.frames.size());
  p.orient.reserve(T);
  p.transl.reserve(T);
  p.pose.reserve(T);
  for (const HandState& f : motion.frames) {
    p.orient.push_back(to_matrix(f.global_orient));
    p.transl.push_back(f.transl);
    PoseFrame pf;
    for (int s = 0; s < kNumArticulated; ++s) pf[s] = to_matrix(f.pose[s]);
    p.pose.push_back(pf);
  }
  p.shape = motion.shape;
  return p;
}

MotionSequence to_motion_sequence(const MotionParams& params, double fps) {
  MotionSequence m;
  m.fps = fps;
  m.shape = params.shape;
  const int T = static_cast<int>(params.orient.size());
  m.frames.resize(T);
  for (int t = 0; t < T; ++t) {
    HandState& f = m.frames[t];
    f.global_orient = rotation_aa_from_matrix(params.orient[t]);
    f.transl = params.transl[t];
    for (int s = 0; s < kNumArticulated; ++s)
      f.pose[s] = rotation_aa_from_matrix(params.pose[t][s]);
    f.shape = params.shape;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Scalar-generic term evaluators
// ---------------------------------------------------------------------------

namespace {

template <class S>
Mat3T<S> lift(const Mat3& m) {
  Mat3T<S> out;
  for (int i = 0; i < 9; ++i) out.a[i] = S(m.a[i]);
  return out;
}

template <class S>
Vec3T<S> lift(const Vec3& v) {
  return Vec3T<S>(S(v.x), S(v.y), S(v.z));
}

template <class S>
S term_orient(std::span<const Mat3T<S>> cur, std::span<const Mat3> ref,
              const std::vector<uint8_t>* mask) {
  S sum(0.0);
  for (size_t t = 0; t < cur.size(); ++t) {
    if (mask && !(*mask)[t]) continue;
    sum = sum + geodesic_sq_t<S>(cur[t], lift<S>(ref[t]));
  }
  return sum;
}

template <class S>
S term_transl(std::span<const Vec3T<S>> cur, std::span<const Vec3> ref,
              const std::vector<uint8_t>* mask) {
  S sum(0.0);
  for (size_t t = 0; t < cur.size(); ++t) {
    if (mask && !(*mask)[t]) continue;
    sum = sum + (cur[t] - lift<S>(ref[t])).squared_norm();
  }
  return sum;
}

template <class S>
S term_shape(std::span<const S> shape) {
  S sum(0.0);
  for (const S& b : shape) sum = sum + b * b;
  return sum;
}

template <class S>
S term_orient_smooth(std::span<const Mat3T<S>> seq) {
  S sum(0.0);
  for (size_t t = 0; t + 1 < seq.size(); ++t)
    sum = sum + geodesic_sq_t<S>(seq[t + 1], seq[t]);
  return sum;
}

template <class S>
S term_transl_smooth(std::span<const Vec3T<S>> seq) {
  S sum(0.0);
  for (size_t t = 0; t + 1 < seq.size(); ++t)
    sum = sum + (seq[t + 1] - seq[t]).squared_norm();
  return sum;
}

template <class S>
S term_pose_smooth(std::span<const std::array<Mat3T<S>, kNumArticulated>> seq) {
  S sum(0.0);
  for (size_t t = 0; t + 1 < seq.size(); ++t)
    for (int s = 0; s < kNumArticulated; ++s)
      sum = sum + geodesic_sq_t<S>(seq[t + 1][s], seq[t][s]);
  return sum;
}

constexpr double kBehindPenalty = 1e6;

template <class S>
S term_reproj(const SkeletonSpec& skel, std::span<const Mat3T<S>> orient,
              std::span<const Vec3T<S>> transl,
              std::span<const std::array<Mat3T<S>, kNumArticulated>> pose,
              const std::array<Vec3T<S>, kNumJoints>& offsets,
              const Observation& obs, const CameraIntrinsics& K,
              const Mat3& ext_rot, const Vec3& ext_transl, double gm_scale,
              double min_depth) {
  const double gm2 = gm_scale * gm_scale;
  const Mat3T<S> Rc = lift<S>(ext_rot);
  const Vec3T<S> tc = lift<S>(ext_transl);
  S sum(0.0);
  for (size_t t = 0; t < orient.size(); ++t) {
    const ObservationFrame& frame = obs.frames[t];
    if (!frame.present) continue;
    const auto joints =
        fk_joints_t<S>(skel, offsets, orient[t], transl[t], pose[t]);
    for (int j = 0; j < kNumJoints; ++j) {
      const double alpha = frame.conf[j];
      if (alpha <= 0.0) continue;
      const Vec3T<S> pc = Rc * joints[j] + tc;
      const Vec2T<S> px = project_soft_t<S>(pc, K, min_depth);
      const Vec2T<S> r = px - Vec2T<S>(S(frame.keypoints[j].x),
                                       S(frame.keypoints[j].y));
      const S r2 = r.squared_norm();
      const S rho = (r2 * S(gm2)) / (r2 + S(gm2));
      // Transiently behind-camera iterates get a quadratic push forward
      // instead of an error, keeping the objective finite and differentiable.
      const S behind = clamp_min(S(min_depth) - pc.z, 0.0);
      sum = sum + S(alpha) * (rho + behind * behind * S(kBehindPenalty));
    }
  }
  return sum;
}

}  // namespace

// ---------------------------------------------------------------------------
// Double-precision loss API
// ---------------------------------------------------------------------------

namespace {

void require_same(size_t a, size_t b, const char* what) {
  if (a != b) fail(Err::mismatch, std::string("LengthMismatch: ") + what);
}

void require_two(size_t n) {
  if (n < 2) fail(Err::too_short, "TooShort: smoothness needs >= 2 frames");
}

}  // namespace

double loss_orient(std::span<const Mat3> cur, std::span<const Mat3> init) {
  require_same(cur.size(), init.size(), "orientation sequences");
  return term_orient<double>(cur, init, nullptr);
}

double loss_transl(std::span<const Vec3> cur, std::span<const Vec3> init) {
  require_same(cur.size(), init.size(), "translation sequences");
  return term_transl<double>(cur, init, nullptr);
}

double loss_shape(std::span<const double> shape) {
  return term_shape<double>(shape);
}

double loss_orient_smooth(std::span<const Mat3> seq) {
  require_two(seq.size());
  return term_orient_smooth<double>(seq);
}

double loss_transl_smooth(std::span<const Vec3> seq) {
  require_two(seq.size());
  return term_transl_smooth<double>(seq);
}

double loss_pose_smooth(const PoseSeq& seq) {
  require_two(seq.size());
  return term_pose_smooth<double>(seq);
}

double geman_mcclure(double squared_residual, double scale) {
  const double s2 = scale * scale;
  return s2 * squared_residual / (squared_residual + s2);
}

double loss_2d(const SkeletonSpec& skel, const MotionParams& params,
               const Observation& obs, const CameraIntrinsics& K,
               const CameraExtrinsics& ext, double gm_scale) {
  if (obs.frames.size() > params.orient.size())
    fail(Err::mismatch, "LengthMismatch: observations exceed motion length");
  const auto offsets = shaped_offsets_t<double>(skel, params.shape);
  return term_reproj<double>(skel, params.orient, params.transl, params.pose,
                             offsets, obs, K, to_matrix(ext.rotation),
                             ext.translation, gm_scale, 1e-4);
}

double loss_mp(const PriorModel& prior, const Eigen::VectorXd& z,
               const GaussianPosterior& anchor) {
  prior.require_trained();
  if (prior.variant != PriorVariant::latent)
    fail(Err::bad_config, "latent-code NLL needs the latent prior");
  return prior.latent.nll(z, anchor);
}

double loss_mp(const PriorModel& prior, const PoseSeq& poses) {
  return prior.nll_pose_sequence(poses);
}

// ---------------------------------------------------------------------------
// Stage assembly
// ---------------------------------------------------------------------------

namespace {

struct StageTermSet {
  bool transl_smooth = false;
  bool motion_prior = false;
};

StageTermSet stage_terms(Stage stage) {
  StageTermSet s;
  s.transl_smooth = stage == Stage::one;
  s.motion_prior = stage == Stage::two;
  return s;
}

ObjectiveEval eval_stage(const VariableSet& vars, VariableSet* grads,
                         Stage stage, const LossWeights& w,
                         const FitInputs& in, PriorVariant variant) {
  using ad::Value;
  const int T = in.frame_count();
  if (!in.skel) fail(Err::bad_config, "stage objective needs a skeleton");
  if (!in.obs || static_cast<int>(in.obs->frames.size()) != T)
    fail(Err::mismatch, "LengthMismatch: observation frames");
  if (static_cast<int>(in.init_transl.size()) != T)
    fail(Err::mismatch, "LengthMismatch: initialization");
  const std::vector<uint8_t>* anchor_mask =
      in.init_valid.empty() ? nullptr : &in.init_valid;
  const StageTermSet terms = stage_terms(stage);
  const bool latent_pose = terms.motion_prior && variant == PriorVariant::latent;
  const bool block_pose = terms.motion_prior && variant != PriorVariant::latent;

  ad::Tape tape(1 << 18);

  // Mirror the rigid blocks as leaves.
  const auto& orient6 = vars.at("orient").values;
  const auto& transl3 = vars.at("transl").values;
  const auto& shape10 = vars.at("shape").values;
  std::vector<Value> orient_leaves(6 * T), transl_leaves(3 * T);
  std::vector<Value> shape_leaves(kNumShape);
  std::vector<Mat3T<Value>> orient_m(T);
  std::vector<Vec3T<Value>> transl_v(T);
  for (int t = 0; t < T; ++t) {
    std::array<Value, 6> d6;
    for (int i = 0; i < 6; ++i) {
      orient_leaves[6 * t + i] = tape.leaf(orient6[6 * t + i]);
      d6[i] = orient_leaves[6 * t + i];
    }
    orient_m[t] = rot6d_to_matrix_t<Value>(d6);
    for (int i = 0; i < 3; ++i) transl_leaves[3 * t + i] = tape.leaf(transl3[3 * t + i]);
    transl_v[t] = Vec3T<Value>(transl_leaves[3 * t], transl_leaves[3 * t + 1],
                               transl_leaves[3 * t + 2]);
  }
  std::array<Value, kNumShape> shape_vals;
  for (int i = 0; i < kNumShape; ++i) {
    shape_leaves[i] = tape.leaf(shape10[i]);
    shape_vals[i] = shape_leaves[i];
  }
  const auto offsets = shaped_offsets_t<Value>(*in.skel, shape_vals);

  // Pose matrices per variant.
  std::vector<std::array<Mat3T<Value>, kNumArticulated>> pose_m(T);
  std::vector<Value> pose_leaves;                 // pose-block variants
  std::vector<std::vector<Value>> decode_leaves;  // latent windows
  std::vector<std::vector<Mlp::Cache>> decode_caches;
  const int latent_dim = latent_pose ? in.prior->latent.latent_dim() : 0;

  if (latent_pose) {
    in.prior->require_trained();
    const auto& zvals = vars.at("latent").values;
    const int W = static_cast<int>(in.windows.size());
    if (static_cast<int>(zvals.size()) != W * latent_dim)
      fail(Err::mismatch, "ShapeMismatch: latent block");
    if (static_cast<int>(in.anchors.size()) != W ||
        static_cast<int>(in.window_times.size()) != W)
      fail(Err::mismatch, "ShapeMismatch: latent windows/anchors");
    int covered = 0;
    for (const auto& [s, e] : in.windows) covered += e - s;
    if (covered != T)
      fail(Err::mismatch, "ShapeMismatch: latent windows must tile the frames");
    decode_leaves.resize(W);
    decode_caches.resize(W);
    for (int wdw = 0; wdw < W; ++wdw) {
      const auto [start, end] = in.windows[wdw];
      Eigen::VectorXd zw(latent_dim);
      for (int d = 0; d < latent_dim; ++d) zw(d) = zvals[wdw * latent_dim + d];
      const Eigen::MatrixXd raw6d = in.prior->latent.decode_raw6d(
          zw, in.window_times[wdw], grads ? &decode_caches[wdw] : nullptr);
      auto& leaves = decode_leaves[wdw];
      leaves.resize(raw6d.rows() * raw6d.cols());
      for (int f = 0; f < raw6d.rows(); ++f) {
        std::array<Value, 6> d6;
        for (int s = 0; s < kNumArticulated; ++s) {
          for (int i = 0; i < 6; ++i) {
            Value& leaf = leaves[f * kNumArticulated * 6 + 6 * s + i];
            leaf = tape.leaf(raw6d(f, 6 * s + i));
            d6[i] = leaf;
          }
          pose_m[start + f][s] = rot6d_to_matrix_t<Value>(d6);
        }
      }
    }
  } else if (block_pose) {
    const auto& pv = vars.at("pose").values;
    if (static_cast<int>(pv.size()) != T * kNumArticulated * 6)
      fail(Err::mismatch, "ShapeMismatch: pose block");
    pose_leaves.resize(pv.size());
    for (int t = 0; t < T; ++t)
      for (int s = 0; s < kNumArticulated; ++s) {
        std::array<Value, 6> d6;
        for (int i = 0; i < 6; ++i) {
          const int idx = (t * kNumArticulated + s) * 6 + i;
          pose_leaves[idx] = tape.leaf(pv[idx]);
          d6[i] = pose_leaves[idx];
        }
        pose_m[t][s] = rot6d_to_matrix_t<Value>(d6);
      }
  } else {
    if (static_cast<int>(in.init_pose.size()) != T)
      fail(Err::mismatch, "LengthMismatch: fixed pose");
    for (int t = 0; t < T; ++t)
      for (int s = 0; s < kNumArticulated; ++s)
        pose_m[t][s] = lift<Value>(in.init_pose[t][s]);
  }

  // Tape terms.
  ObjectiveEval eval;
  Value root(0.0);
  auto add_term = [&](const char* name, double lambda, const Value& term) {
    root = root + Value(lambda) * term;
    eval.terms.emplace_back(name, lambda * term.val());
  };

  add_term("orient", w.orient,
           term_orient<Value>(orient_m, in.init_orient, anchor_mask));
  add_term("transl", w.transl,
           term_transl<Value>(transl_v, in.init_transl, anchor_mask));
  add_term("shape", w.shape, term_shape<Value>(shape_vals));
  add_term("orient_smooth", w.orient_smooth,
           term_orient_smooth<Value>(orient_m));
  if (terms.transl_smooth)
    add_term("transl_smooth", w.transl_smooth,
             term_transl_smooth<Value>(transl_v));
  add_term("reproj", w.reproj,
           term_reproj<Value>(*in.skel, orient_m, transl_v, pose_m, offsets,
                              *in.obs, in.camera, to_matrix(in.extrinsics.rotation),
                              in.extrinsics.translation, in.gm_scale,
                              in.min_depth));

  // Motion prior term (off tape except for the none variant).
  double mp_value = 0.0;
  if (terms.motion_prior) {
    if (variant == PriorVariant::none) {
      add_term("motion_prior", w.motion_prior,
               term_pose_smooth<Value>(pose_m));
    } else if (variant == PriorVariant::latent) {
      const auto& zvals = vars.at("latent").values;
      for (size_t wdw = 0; wdw < in.windows.size(); ++wdw) {
        Eigen::VectorXd zw(latent_dim);
        for (int d = 0; d < latent_dim; ++d)
          zw(d) = zvals[wdw * latent_dim + d];
        mp_value += in.prior->latent.nll(zw, in.anchors[wdw]);
      }
      eval.terms.emplace_back("motion_prior", w.motion_prior * mp_value);
    } else {
      // Window NLL straight on the raw 6D block coordinates.
      const auto& pv = vars.at("pose").values;
      const int width = kNumArticulated * 6;
      const int wl = (variant == PriorVariant::pca) ? in.prior->pca.window_len
                                                    : in.prior->gmm.window_len;
      const int st = (variant == PriorVariant::pca) ? in.prior->pca.stride
                                                    : in.prior->gmm.stride;
      for (int s : window_starts(T, wl, st)) {
        Eigen::Map<const Eigen::VectorXd> x(pv.data() + s * width, wl * width);
        mp_value += (variant == PriorVariant::pca)
                        ? in.prior->pca.nll_window(x)
                        : in.prior->gmm.nll_window(x);
      }
      eval.terms.emplace_back("motion_prior", w.motion_prior * mp_value);
    }
  }

  eval.value = root.val() + w.motion_prior * mp_value;
  if (!grads) return eval;

  // Reverse sweep, then the analytic pieces.
  const auto adj = tape.backward(root);
  auto leaf_grad = [&](const Value& leaf) {
    return leaf.is_const() ? 0.0 : adj[leaf.idx];
  };
  {
    auto& go = grads->at("orient").values;
    for (int i = 0; i < 6 * T; ++i) go[i] += leaf_grad(orient_leaves[i]);
    auto& gt = grads->at("transl").values;
    for (int i = 0; i < 3 * T; ++i) gt[i] += leaf_grad(transl_leaves[i]);
    auto& gs = grads->at("shape").values;
    for (int i = 0; i < kNumShape; ++i) gs[i] += leaf_grad(shape_leaves[i]);
  }

  if (latent_pose) {
    auto& gz = grads->at("latent").values;
    const auto& zvals = vars.at("latent").values;
    for (size_t wdw = 0; wdw < in.windows.size(); ++wdw) {
      const int frames = in.windows[wdw].second - in.windows[wdw].first;
      Eigen::MatrixXd d6(frames, kNumArticulated * 6);
      for (int f = 0; f < frames; ++f)
        for (int i = 0; i < kNumArticulated * 6; ++i)
          d6(f, i) = leaf_grad(decode_leaves[wdw][f * kNumArticulated * 6 + i]);
      Eigen::VectorXd dz =
          in.prior->latent.decode_vjp(decode_caches[wdw], d6);
      const GaussianPosterior& a = in.anchors[wdw];
      for (int d = 0; d < latent_dim; ++d) {
        const double z = zvals[wdw * latent_dim + d];
        dz(d) += w.motion_prior * (z - a.mu(d)) / (a.sigma(d) * a.sigma(d));
        gz[wdw * latent_dim + d] += dz(d);
      }
    }
  } else if (block_pose) {
    auto& gp = grads->at("pose").values;
    for (size_t i = 0; i < pose_leaves.size(); ++i)
      gp[i] += leaf_grad(pose_leaves[i]);
    if (variant != PriorVariant::none) {
      const auto& pv = vars.at("pose").values;
      const int width = kNumArticulated * 6;
      const int wl = (variant == PriorVariant::pca) ? in.prior->pca.window_len
                                                    : in.prior->gmm.window_len;
      const int st = (variant == PriorVariant::pca) ? in.prior->pca.stride
                                                    : in.prior->gmm.stride;
      for (int s : window_starts(T, wl, st)) {
        Eigen::Map<const Eigen::VectorXd> x(pv.data() + s * width, wl * width);
        Eigen::VectorXd wg = Eigen::VectorXd::Zero(wl * width);
        if (variant == PriorVariant::pca)
          in.prior->pca.nll_window_grad(x, wg);
        else
          in.prior->gmm.nll_window_grad(x, wg);
        for (int i = 0; i < wl * width; ++i)
          gp[s * width + i] += w.motion_prior * wg(i);
      }
    }
  }
  return eval;
}

}  // namespace

VariableSet make_stage_variables(Stage stage, const FitInputs& in,
                                 PriorVariant variant) {
  const int T = in.frame_count();
  VariableSet vars;
  std::vector<double> orient6(6 * T), transl3(3 * T);
  for (int t = 0; t < T; ++t) {
    const Rot6D r = rot6d_from_matrix(in.init_orient[t]);
    for (int i = 0; i < 6; ++i) orient6[6 * t + i] = r.v[i];
    transl3[3 * t] = in.init_transl[t].x;
    transl3[3 * t + 1] = in.init_transl[t].y;
    transl3[3 * t + 2] = in.init_transl[t].z;
  }
  vars.add("orient", std::move(orient6));
  vars.add("transl", std::move(transl3));
  vars.add("shape",
           std::vector<double>(in.init_shape.begin(), in.init_shape.end()));

  if (stage == Stage::two) {
    if (variant == PriorVariant::latent) {
      if (!in.prior) fail(Err::bad_config, "stage 2 requires a prior");
      const int D = in.prior->latent.latent_dim();
      std::vector<double> z(in.windows.size() * D);
      for (size_t wdw = 0; wdw < in.windows.size(); ++wdw)
        for (int d = 0; d < D; ++d)
          z[wdw * D + d] = in.anchors[wdw].mu(d);
      vars.add("latent", std::move(z));
    } else {
      const Eigen::MatrixXd d6 = poses_to_6d(in.init_pose);
      std::vector<double> pose(T * kNumArticulated * 6);
      for (int t = 0; t < T; ++t)
        for (int i = 0; i < kNumArticulated * 6; ++i)
          pose[t * kNumArticulated * 6 + i] = d6(t, i);
      vars.add("pose", std::move(pose));
    }
  }
  return vars;
}

ObjectiveFn make_stage_objective(Stage stage, const LossWeights& weights,
                                 const FitInputs& inputs,
                                 PriorVariant variant) {
  const FitInputs* in = &inputs;
  return [stage, weights, in, variant](const VariableSet& vars,
                                       VariableSet* grads) {
    return eval_stage(vars, grads, stage, weights, *in, variant);
  };
}

MotionParams extract_motion(Stage stage, const FitInputs& in,
                            const VariableSet& vars, PriorVariant variant) {
  const int T = in.frame_count();
  MotionParams p;
  p.orient.resize(T);
  p.transl.resize(T);
  const auto& o6 = vars.at("orient").values;
  const auto& t3 = vars.at("transl").values;
  for (int t = 0; t < T; ++t) {
    std::array<double, 6> d6;
    for (int i = 0; i < 6; ++i) d6[i] = o6[6 * t + i];
    p.orient[t] = rot6d_to_matrix_t<double>(d6);
    p.transl[t] = Vec3(t3[3 * t], t3[3 * t + 1], t3[3 * t + 2]);
  }
  const auto& sh = vars.at("shape").values;
  for (int i = 0; i < kNumShape; ++i) p.shape[i] = sh[i];

  if (stage == Stage::one) {
    p.pose = in.init_pose;
  } else if (variant == PriorVariant::latent) {
    const int D = in.prior->latent.latent_dim();
    const auto& zvals = vars.at("latent").values;
    p.pose.resize(T);
    for (size_t wdw = 0; wdw < in.windows.size(); ++wdw) {
      Eigen::VectorXd zw(D);
      for (int d = 0; d < D; ++d) zw(d) = zvals[wdw * D + d];
      const PoseSeq win =
          in.prior->latent.decode(zw, in.window_times[wdw]);
      for (size_t f = 0; f < win.size(); ++f)
        p.pose[in.windows[wdw].first + f] = win[f];
    }
  } else {
    const auto& pv = vars.at("pose").values;
    Eigen::MatrixXd d6(T, kNumArticulated * 6);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < kNumArticulated * 6; ++i)
        d6(t, i) = pv[t * kNumArticulated * 6 + i];
    p.pose = poses_from_6d(d6);
  }
  return p;
}

TotalBreakdown total(Stage stage, const LossWeights& weights,
                     const FitInputs& inputs, const MotionParams& params,
                     const Eigen::VectorXd* z) {
  PriorVariant variant = PriorVariant::none;
  if (stage == Stage::two) {
    if (!inputs.prior) fail(Err::bad_config, "stage 2 requires a prior");
    variant = inputs.prior->variant;
  }
  VariableSet vars = make_stage_variables(stage, inputs, variant);
  // Overwrite the defaults with the supplied parameter values.
  {
    auto& o6 = vars.at("orient").values;
    auto& t3 = vars.at("transl").values;
    const int T = inputs.frame_count();
    if (static_cast<int>(params.orient.size()) != T)
      fail(Err::mismatch, "LengthMismatch: params");
    for (int t = 0; t < T; ++t) {
      const Rot6D r = rot6d_from_matrix(params.orient[t]);
      for (int i = 0; i < 6; ++i) o6[6 * t + i] = r.v[i];
      t3[3 * t] = params.transl[t].x;
      t3[3 * t + 1] = params.transl[t].y;
      t3[3 * t + 2] = params.transl[t].z;
    }
    auto& sh = vars.at("shape").values;
    for (int i = 0; i < kNumShape; ++i) sh[i] = params.shape[i];
    if (stage == Stage::two) {
      if (variant == PriorVariant::latent) {
        if (!z) fail(Err::bad_config, "latent total needs a latent code");
        auto& zv = vars.at("latent").values;
        if (z->size() != static_cast<long>(zv.size()))
          fail(Err::mismatch, "ShapeMismatch: latent code");
        for (long i = 0; i < z->size(); ++i) zv[i] = (*z)(i);
      } else {
        const Eigen::MatrixXd d6 = poses_to_6d(params.pose);
        auto& pv = vars.at("pose").values;
        for (int t = 0; t < inputs.frame_count(); ++t)
          for (int i = 0; i < kNumArticulated * 6; ++i)
            pv[t * kNumArticulated * 6 + i] = d6(t, i);
      }
    }
  }
  const ObjectiveEval eval =
      eval_stage(vars, nullptr, stage, weights, inputs, variant);
  TotalBreakdown out;
  out.total = eval.value;
  out.terms = eval.terms;
  return out;
}

}  // namespace hmf
