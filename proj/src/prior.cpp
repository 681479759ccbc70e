// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/prior.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "hmf/skeleton_json.hpp"

namespace hmf {

static_assert(std::endian::native == std::endian::little,
              "checkpoint container assumes a little-endian host");

std::string to_string(PriorVariant v) {
  switch (v) {
    case PriorVariant::none: return "none";
    case PriorVariant::pca: return "pca";
    case PriorVariant::gmm: return "gmm";
    case PriorVariant::latent: return "latent";
  }
  return "none";
}

PriorVariant prior_variant_from_string(const std::string& s) {
  if (s == "none") return PriorVariant::none;
  if (s == "pca") return PriorVariant::pca;
  if (s == "gmm") return PriorVariant::gmm;
  if (s == "latent") return PriorVariant::latent;
  fail(Err::bad_config, "unknown prior variant: " + s);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

Eigen::VectorXd positional_encoding(double t, int freqs) {
  Eigen::VectorXd pe(2 * freqs);
  double f = M_PI;
  for (int k = 0; k < freqs; ++k) {
    pe(2 * k) = std::sin(f * t);
    pe(2 * k + 1) = std::cos(f * t);
    f *= 2.0;
  }
  return pe;
}

Eigen::MatrixXd motion_features(const SkeletonSpec& skel, const PoseSeq& poses,
                                double fps) {
  const int T = static_cast<int>(poses.size());
  if (T < 1) fail(Err::too_short, "TooShort: empty pose sequence");
  constexpr int kChan = 15;  // pos3 + vel3 + rot6 + angvel3
  Eigen::MatrixXd feat(T, kNumArticulated * kChan);

  // Root-relative articulated joint positions at zero shape.
  const auto offs = shaped_offsets(skel, std::array<double, kNumShape>{});
  std::vector<std::array<Vec3, kNumJoints>> pos(T);
  for (int t = 0; t < T; ++t) {
    pos[t] = fk_joints_t<double>(skel, offs, Mat3::identity(),
                                 Vec3(0.0, 0.0, 0.0), poses[t]);
  }

  auto angvel = [&](int t, int s) -> Vec3 {
    // Relative-rotation log, one-sided at the ends.
    const int t0 = std::max(t - 1, 0);
    const int t1 = std::min(t + 1, T - 1);
    if (t1 == t0) return Vec3(0.0, 0.0, 0.0);
    const Mat3 rel = poses[t0][s].transpose() * poses[t1][s];
    const RotationAA aa = rotation_aa_from_matrix(rel);
    return aa.v * (fps / static_cast<double>(t1 - t0));
  };

  for (int t = 0; t < T; ++t) {
    const int t0 = std::max(t - 1, 0);
    const int t1 = std::min(t + 1, T - 1);
    const double vel_scale = (t1 > t0) ? fps / static_cast<double>(t1 - t0) : 0.0;
    for (int s = 0; s < kNumArticulated; ++s) {
      const int j = skel.articulated[s];
      const int base = kChan * s;
      const Vec3 p = pos[t][j];
      const Vec3 v = (pos[t1][j] - pos[t0][j]) * vel_scale;
      feat(t, base + 0) = p.x;
      feat(t, base + 1) = p.y;
      feat(t, base + 2) = p.z;
      feat(t, base + 3) = v.x;
      feat(t, base + 4) = v.y;
      feat(t, base + 5) = v.z;
      const Mat3& R = poses[t][s];
      feat(t, base + 6) = R(0, 0);
      feat(t, base + 7) = R(1, 0);
      feat(t, base + 8) = R(2, 0);
      feat(t, base + 9) = R(0, 1);
      feat(t, base + 10) = R(1, 1);
      feat(t, base + 11) = R(2, 1);
      const Vec3 w = angvel(t, s);
      feat(t, base + 12) = w.x;
      feat(t, base + 13) = w.y;
      feat(t, base + 14) = w.z;
    }
  }
  return feat;
}

Eigen::MatrixXd poses_to_6d(const PoseSeq& poses) {
  const int T = static_cast<int>(poses.size());
  Eigen::MatrixXd out(T, kNumArticulated * 6);
  for (int t = 0; t < T; ++t)
    for (int s = 0; s < kNumArticulated; ++s) {
      const Mat3& R = poses[t][s];
      out(t, 6 * s + 0) = R(0, 0);
      out(t, 6 * s + 1) = R(1, 0);
      out(t, 6 * s + 2) = R(2, 0);
      out(t, 6 * s + 3) = R(0, 1);
      out(t, 6 * s + 4) = R(1, 1);
      out(t, 6 * s + 5) = R(2, 1);
    }
  return out;
}

PoseSeq poses_from_6d(const Eigen::MatrixXd& d6) {
  PoseSeq out(d6.rows());
  for (int t = 0; t < d6.rows(); ++t)
    for (int s = 0; s < kNumArticulated; ++s) {
      std::array<double, 6> v;
      for (int i = 0; i < 6; ++i) v[i] = d6(t, 6 * s + i);
      out[t][s] = rot6d_to_matrix_t<double>(v);
    }
  return out;
}

std::vector<int> window_starts(int T, int window_len, int stride) {
  std::vector<int> starts;
  if (T < window_len) return starts;
  for (int s = 0; s + window_len <= T; s += stride) starts.push_back(s);
  if (starts.back() + window_len < T) starts.push_back(T - window_len);
  return starts;
}

// ---------------------------------------------------------------------------
// Latent field prior
// ---------------------------------------------------------------------------

LatentFieldPrior LatentFieldPrior::create(const LatentFieldHyper& h,
                                          const SkeletonSpec& skel, Rng& rng) {
  LatentFieldPrior p;
  p.hyper = h;
  p.skeleton = skel;

  std::vector<int> dec_dims;
  dec_dims.push_back(2 * h.pe_frequencies + h.latent_dim);
  for (int d : h.decoder_hidden) dec_dims.push_back(d);
  dec_dims.push_back(kNumArticulated * 6);
  p.decoder = Mlp::create(dec_dims, rng);
  // Start the decoder at the identity pose.
  for (int s = 0; s < kNumArticulated; ++s) {
    p.decoder.b.back()(6 * s + 0) = 1.0;
    p.decoder.b.back()(6 * s + 4) = 1.0;
  }

  const int feat_dim = kNumArticulated * 15;
  std::vector<int> emb_dims{feat_dim};
  for (int d : h.encoder_hidden) emb_dims.push_back(d);
  p.encoder_embed = Mlp::create(emb_dims, rng);
  p.encoder_head =
      Mlp::create({emb_dims.back(), 2 * h.latent_dim}, rng);

  p.feat_mean = Eigen::VectorXd::Zero(feat_dim);
  p.feat_std = Eigen::VectorXd::Ones(feat_dim);
  return p;
}

std::vector<double> LatentFieldPrior::clip_times(int frames) const {
  std::vector<double> times(frames);
  const double denom = std::max(hyper.clip_len - 1, 1);
  for (int i = 0; i < frames; ++i) times[i] = i / denom;
  return times;
}

Eigen::MatrixXd LatentFieldPrior::decode_raw6d(
    const Eigen::VectorXd& z, std::span<const double> times,
    std::vector<Mlp::Cache>* caches) const {
  if (z.size() != hyper.latent_dim)
    fail(Err::mismatch, "latent code has wrong dimension");
  for (int i = 0; i < z.size(); ++i)
    if (!std::isfinite(z(i))) fail(Err::nonfinite, "NonFinite: latent code");
  const int T = static_cast<int>(times.size());
  const int pe_dim = 2 * hyper.pe_frequencies;
  Eigen::MatrixXd out(T, kNumArticulated * 6);
  if (caches) caches->assign(T, Mlp::Cache{});
  Eigen::VectorXd in(pe_dim + hyper.latent_dim);
  in.tail(hyper.latent_dim) = z;
  // One evaluation per timestep: the decoded value at t depends on (t, z)
  // only, and any sub-grid evaluates bitwise-identically.
  for (int t = 0; t < T; ++t) {
    in.head(pe_dim) = positional_encoding(times[t], hyper.pe_frequencies);
    out.row(t) =
        decoder.forward(in, caches ? &(*caches)[t] : nullptr).transpose();
  }
  return out;
}

PoseSeq LatentFieldPrior::decode(const Eigen::VectorXd& z,
                                 std::span<const double> times) const {
  if (!trained) fail(Err::not_trained, "ModelNotTrained: latent prior");
  return poses_from_6d(decode_raw6d(z, times, nullptr));
}

Eigen::VectorXd LatentFieldPrior::decode_vjp(
    const std::vector<Mlp::Cache>& caches,
    const Eigen::MatrixXd& d_raw6d) const {
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(hyper.latent_dim);
  for (size_t t = 0; t < caches.size(); ++t) {
    const Eigen::MatrixXd din =
        decoder.backward_input(d_raw6d.row(t).transpose(), caches[t]);
    dz += din.col(0).tail(hyper.latent_dim);
  }
  return dz;
}

Eigen::VectorXd LatentFieldPrior::decode_vjp_train(
    const std::vector<Mlp::Cache>& caches, const Eigen::MatrixXd& d_raw6d,
    Mlp::Grads* dec_grads) const {
  Eigen::VectorXd dz = Eigen::VectorXd::Zero(hyper.latent_dim);
  for (size_t t = 0; t < caches.size(); ++t) {
    const Eigen::MatrixXd din = decoder.backward(
        d_raw6d.row(t).transpose(), caches[t], dec_grads);
    dz += din.col(0).tail(hyper.latent_dim);
  }
  return dz;
}

GaussianPosterior LatentFieldPrior::encode(const PoseSeq& poses,
                                           double fps) const {
  const int T = static_cast<int>(poses.size());
  if (T > hyper.clip_len)
    fail(Err::mismatch,
         "encode: sequence longer than the trained clip length");
  const Eigen::MatrixXd feat = motion_features(skeleton, poses, fps);
  Eigen::MatrixXd X = feat.transpose();  // columns = frames
  for (int c = 0; c < X.cols(); ++c)
    X.col(c) = (X.col(c) - feat_mean).cwiseQuotient(feat_std);

  const Eigen::MatrixXd emb = encoder_embed.forward(X, nullptr);
  const Eigen::VectorXd pooled = emb.rowwise().mean();
  const Eigen::VectorXd head = encoder_head.forward(pooled, nullptr);

  GaussianPosterior post;
  post.mu = head.head(hyper.latent_dim);
  post.sigma = Eigen::VectorXd(hyper.latent_dim);
  for (int d = 0; d < hyper.latent_dim; ++d) {
    const double lv =
        std::clamp(head(hyper.latent_dim + d), -12.0, 8.0);
    post.sigma(d) = std::exp(0.5 * lv);
  }
  for (int d = 0; d < hyper.latent_dim; ++d)
    if (!std::isfinite(post.mu(d)) || !std::isfinite(post.sigma(d)))
      fail(Err::nonfinite, "NonFinite: encoder posterior");
  return post;
}

GaussianPosterior LatentFieldPrior::encode(const PoseSeq& poses) const {
  return encode(poses, hyper.train_fps);
}

double LatentFieldPrior::nll(const Eigen::VectorXd& z,
                             const GaussianPosterior& anchor) const {
  const int D = static_cast<int>(z.size());
  if (anchor.mu.size() != D || anchor.sigma.size() != D)
    fail(Err::mismatch, "nll: anchor dimension mismatch");
  double s = 0.5 * D * std::log(2.0 * M_PI);
  for (int d = 0; d < D; ++d) {
    const double r = (z(d) - anchor.mu(d)) / anchor.sigma(d);
    s += 0.5 * r * r + std::log(anchor.sigma(d));
  }
  return s;
}

// ---------------------------------------------------------------------------
// PCA prior
// ---------------------------------------------------------------------------

double PcaPrior::nll_window(const Eigen::VectorXd& x) const {
  if (!trained) fail(Err::not_trained, "ModelNotTrained: pca");
  const Eigen::VectorXd d = x - mean;
  const Eigen::VectorXd c = basis.transpose() * d;
  const double res = std::max(d.squaredNorm() - c.squaredNorm(), 0.0);
  const int D = dim(), k = components();
  double s = 0.5 * res / residual_variance +
             0.5 * (D - k) * std::log(2.0 * M_PI * residual_variance);
  for (int i = 0; i < k; ++i)
    s += 0.5 * c(i) * c(i) / variances(i) +
         0.5 * std::log(2.0 * M_PI * variances(i));
  return s;
}

void PcaPrior::nll_window_grad(const Eigen::VectorXd& x,
                               Eigen::VectorXd& grad) const {
  if (!trained) fail(Err::not_trained, "ModelNotTrained: pca");
  const Eigen::VectorXd d = x - mean;
  const Eigen::VectorXd c = basis.transpose() * d;
  grad += basis * c.cwiseQuotient(variances) +
          (d - basis * c) / residual_variance;
}

// ---------------------------------------------------------------------------
// GMM prior
// ---------------------------------------------------------------------------

namespace {

/// Per-component log densities log(w_k) + log N(x; mu_k, diag v_k).
Eigen::VectorXd gmm_component_logs(const GmmPrior& g, const Eigen::VectorXd& x) {
  const int K = g.component_count();
  Eigen::VectorXd a(K);
  for (int k = 0; k < K; ++k) {
    double s = std::log(g.weights(k));
    for (int d = 0; d < g.dim(); ++d) {
      const double r = x(d) - g.means(d, k);
      s -= 0.5 * (r * r / g.vars(d, k) + std::log(2.0 * M_PI * g.vars(d, k)));
    }
    a(k) = s;
  }
  return a;
}

}  // namespace

double GmmPrior::nll_window(const Eigen::VectorXd& x) const {
  if (!trained) fail(Err::not_trained, "ModelNotTrained: gmm");
  const Eigen::VectorXd a = gmm_component_logs(*this, x);
  const double m = a.maxCoeff();
  return -(m + std::log((a.array() - m).exp().sum()));
}

void GmmPrior::nll_window_grad(const Eigen::VectorXd& x,
                               Eigen::VectorXd& grad) const {
  if (!trained) fail(Err::not_trained, "ModelNotTrained: gmm");
  const Eigen::VectorXd a = gmm_component_logs(*this, x);
  const double m = a.maxCoeff();
  const Eigen::VectorXd r = (a.array() - m).exp();
  const Eigen::VectorXd resp = r / r.sum();
  for (int k = 0; k < component_count(); ++k)
    grad += resp(k) * (x - means.col(k)).cwiseQuotient(vars.col(k));
}

// ---------------------------------------------------------------------------
// Variant wrapper
// ---------------------------------------------------------------------------

bool PriorModel::trained() const {
  switch (variant) {
    case PriorVariant::none: return true;
    case PriorVariant::pca: return pca.trained;
    case PriorVariant::gmm: return gmm.trained;
    case PriorVariant::latent: return latent.trained;
  }
  return false;
}

void PriorModel::require_trained() const {
  if (!trained())
    fail(Err::not_trained,
         "ModelNotTrained: " + to_string(variant) + " prior");
}

double PriorModel::nll_pose_sequence(const PoseSeq& poses) const {
  if (variant == PriorVariant::none) return 0.0;
  require_trained();
  if (variant == PriorVariant::latent)
    fail(Err::bad_config, "latent prior scores latent codes, not poses");
  const Eigen::MatrixXd d6 = poses_to_6d(poses);
  const int wl = (variant == PriorVariant::pca) ? pca.window_len : gmm.window_len;
  const int st = (variant == PriorVariant::pca) ? pca.stride : gmm.stride;
  double total = 0.0;
  for (int s : window_starts(static_cast<int>(poses.size()), wl, st)) {
    Eigen::VectorXd x(wl * kNumArticulated * 6);
    for (int f = 0; f < wl; ++f)
      x.segment(f * kNumArticulated * 6, kNumArticulated * 6) =
          d6.row(s + f).transpose();
    total += (variant == PriorVariant::pca) ? pca.nll_window(x)
                                            : gmm.nll_window(x);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Checkpoint container: magic, version, JSON header, raw f64 tensors
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'H', 'M', 'F', 'P', 'R', 'I', 'O', '1'};

struct TensorOut {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<double> data;
};

TensorOut tensor_of(const std::string& name, const Eigen::MatrixXd& m) {
  TensorOut t;
  t.name = name;
  t.shape = {m.rows(), m.cols()};
  t.data.reserve(m.size());
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) t.data.push_back(m(r, c));
  return t;
}

TensorOut tensor_of(const std::string& name, const Eigen::VectorXd& v) {
  TensorOut t;
  t.name = name;
  t.shape = {v.size()};
  t.data.assign(v.data(), v.data() + v.size());
  return t;
}

void append_mlp(std::vector<TensorOut>& out, const std::string& prefix,
                const Mlp& net) {
  for (size_t i = 0; i < net.W.size(); ++i) {
    out.push_back(tensor_of(prefix + ".W" + std::to_string(i), net.W[i]));
    out.push_back(tensor_of(prefix + ".b" + std::to_string(i), net.b[i]));
  }
}

class TensorIn {
 public:
  TensorIn(std::vector<std::int64_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {}

  Eigen::MatrixXd matrix() const {
    if (shape_.size() != 2) fail(Err::parse, "ParseError: expected a matrix");
    Eigen::MatrixXd m(shape_[0], shape_[1]);
    size_t i = 0;
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) m(r, c) = data_[i++];
    return m;
  }

  Eigen::VectorXd vector() const {
    if (shape_.size() != 1) fail(Err::parse, "ParseError: expected a vector");
    return Eigen::Map<const Eigen::VectorXd>(data_.data(), data_.size());
  }

 private:
  std::vector<std::int64_t> shape_;
  std::vector<double> data_;
};

Mlp mlp_from(const std::map<std::string, TensorIn>& tensors,
             const std::string& prefix) {
  Mlp net;
  for (size_t i = 0;; ++i) {
    const auto w = tensors.find(prefix + ".W" + std::to_string(i));
    const auto b = tensors.find(prefix + ".b" + std::to_string(i));
    if (w == tensors.end()) break;
    if (b == tensors.end()) fail(Err::parse, "ParseError: missing bias tensor");
    net.W.push_back(w->second.matrix());
    net.b.push_back(b->second.vector());
  }
  if (net.W.empty()) fail(Err::parse, "ParseError: missing tensors " + prefix);
  return net;
}

template <class T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_pod(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) fail(Err::parse, "ParseError: truncated checkpoint");
  return v;
}

}  // namespace

void PriorModel::save(const std::string& path) const {
  nlohmann::json hyper;
  std::vector<TensorOut> tensors;

  switch (variant) {
    case PriorVariant::none:
      break;
    case PriorVariant::pca:
      hyper["window_len"] = pca.window_len;
      hyper["stride"] = pca.stride;
      hyper["residual_variance"] = pca.residual_variance;
      hyper["requested_components"] = pca.requested_components;
      tensors.push_back(tensor_of("mean", pca.mean));
      tensors.push_back(tensor_of("basis", pca.basis));
      tensors.push_back(tensor_of("variances", pca.variances));
      break;
    case PriorVariant::gmm:
      hyper["window_len"] = gmm.window_len;
      hyper["stride"] = gmm.stride;
      tensors.push_back(tensor_of("weights", gmm.weights));
      tensors.push_back(tensor_of("means", gmm.means));
      tensors.push_back(tensor_of("vars", gmm.vars));
      break;
    case PriorVariant::latent:
      hyper["latent_dim"] = latent.hyper.latent_dim;
      hyper["pe_frequencies"] = latent.hyper.pe_frequencies;
      hyper["clip_len"] = latent.hyper.clip_len;
      hyper["decoder_hidden"] = latent.hyper.decoder_hidden;
      hyper["encoder_hidden"] = latent.hyper.encoder_hidden;
      hyper["train_fps"] = latent.hyper.train_fps;
      hyper["skeleton"] = skeleton_to_json(latent.skeleton);
      append_mlp(tensors, "decoder", latent.decoder);
      append_mlp(tensors, "enc_embed", latent.encoder_embed);
      append_mlp(tensors, "enc_head", latent.encoder_head);
      tensors.push_back(tensor_of("feat_mean", latent.feat_mean));
      tensors.push_back(tensor_of("feat_std", latent.feat_std));
      break;
  }

  nlohmann::json header;
  header["variant"] = to_string(variant);
  header["hyper"] = hyper;
  for (const TensorOut& t : tensors)
    header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Err::io, "cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, 1u);
  write_pod<std::uint64_t>(out, hs.size());
  out.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const TensorOut& t : tensors)
    out.write(reinterpret_cast<const char*>(t.data.data()),
              static_cast<std::streamsize>(t.data.size() * sizeof(double)));
  if (!out) fail(Err::io, "write failed: " + path);
}

PriorModel PriorModel::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::io, "cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0)
    fail(Err::parse, "ParseError: not a prior checkpoint: " + path);
  const auto version = read_pod<std::uint32_t>(in);
  if (version != 1)
    fail(Err::parse, "ParseError: unsupported checkpoint version " +
                         std::to_string(version));
  const auto hlen = read_pod<std::uint64_t>(in);
  std::string hs(hlen, '\0');
  in.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!in) fail(Err::parse, "ParseError: truncated checkpoint header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    fail(Err::parse, std::string("ParseError: checkpoint header: ") + e.what());
  }

  std::map<std::string, TensorIn> tensors;
  if (header.contains("tensors")) {
    for (const auto& tj : header["tensors"]) {
      std::vector<std::int64_t> shape =
          tj.at("shape").get<std::vector<std::int64_t>>();
      std::int64_t count = 1;
      for (auto s : shape) count *= s;
      std::vector<double> data(count);
      in.read(reinterpret_cast<char*>(data.data()),
              static_cast<std::streamsize>(count * sizeof(double)));
      if (!in) fail(Err::parse, "ParseError: truncated tensor data");
      tensors.emplace(tj.at("name").get<std::string>(),
                      TensorIn(std::move(shape), std::move(data)));
    }
  }

  PriorModel model;
  model.variant = prior_variant_from_string(header.at("variant"));
  const nlohmann::json hyper = header.value("hyper", nlohmann::json::object());
  auto tensor = [&](const char* name) -> const TensorIn& {
    const auto it = tensors.find(name);
    if (it == tensors.end())
      fail(Err::parse, std::string("ParseError: missing tensor ") + name);
    return it->second;
  };

  switch (model.variant) {
    case PriorVariant::none:
      break;
    case PriorVariant::pca:
      model.pca.window_len = hyper.at("window_len");
      model.pca.stride = hyper.at("stride");
      model.pca.residual_variance = hyper.at("residual_variance");
      model.pca.requested_components = hyper.at("requested_components");
      model.pca.mean = tensor("mean").vector();
      model.pca.basis = tensor("basis").matrix();
      model.pca.variances = tensor("variances").vector();
      model.pca.trained = true;
      break;
    case PriorVariant::gmm:
      model.gmm.window_len = hyper.at("window_len");
      model.gmm.stride = hyper.at("stride");
      model.gmm.weights = tensor("weights").vector();
      model.gmm.means = tensor("means").matrix();
      model.gmm.vars = tensor("vars").matrix();
      model.gmm.trained = true;
      break;
    case PriorVariant::latent: {
      LatentFieldHyper h;
      h.latent_dim = hyper.at("latent_dim");
      h.pe_frequencies = hyper.at("pe_frequencies");
      h.clip_len = hyper.at("clip_len");
      h.decoder_hidden = hyper.at("decoder_hidden").get<std::vector<int>>();
      h.encoder_hidden = hyper.at("encoder_hidden").get<std::vector<int>>();
      h.train_fps = hyper.at("train_fps");
      model.latent.hyper = h;
      model.latent.skeleton = skeleton_from_json(hyper.at("skeleton"));
      model.latent.decoder = mlp_from(tensors, "decoder");
      model.latent.encoder_embed = mlp_from(tensors, "enc_embed");
      model.latent.encoder_head = mlp_from(tensors, "enc_head");
      model.latent.feat_mean = tensor("feat_mean").vector();
      model.latent.feat_std = tensor("feat_std").vector();
      model.latent.trained = true;
      break;
    }
  }
  return model;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

std::vector<PoseSeq> sample(const PriorModel& prior, int count,
                            std::uint64_t rng_seed) {
  prior.require_trained();
  if (prior.variant == PriorVariant::none)
    fail(Err::not_trained, "ModelNotTrained: the none prior has no samples");
  std::vector<PoseSeq> out;
  out.reserve(count);
  Rng rng(rng_seed);

  for (int i = 0; i < count; ++i) {
    switch (prior.variant) {
      case PriorVariant::latent: {
        Eigen::VectorXd z(prior.latent.latent_dim());
        for (int d = 0; d < z.size(); ++d) z(d) = rng.normal();
        const auto times = prior.latent.clip_times(prior.latent.hyper.clip_len);
        out.push_back(prior.latent.decode(z, times));
        break;
      }
      case PriorVariant::pca: {
        const PcaPrior& p = prior.pca;
        Eigen::VectorXd x = p.mean;
        for (int k = 0; k < p.components(); ++k)
          x += p.basis.col(k) * (std::sqrt(p.variances(k)) * rng.normal());
        Eigen::MatrixXd d6(p.window_len, kNumArticulated * 6);
        for (int f = 0; f < p.window_len; ++f)
          d6.row(f) =
              x.segment(f * kNumArticulated * 6, kNumArticulated * 6)
                  .transpose();
        out.push_back(poses_from_6d(d6));
        break;
      }
      case PriorVariant::gmm: {
        const GmmPrior& g = prior.gmm;
        double u = rng.uniform();
        int k = 0;
        while (k + 1 < g.component_count() && u > g.weights(k)) {
          u -= g.weights(k);
          ++k;
        }
        Eigen::VectorXd x(g.dim());
        for (int d = 0; d < g.dim(); ++d)
          x(d) = g.means(d, k) + std::sqrt(g.vars(d, k)) * rng.normal();
        Eigen::MatrixXd d6(g.window_len, kNumArticulated * 6);
        for (int f = 0; f < g.window_len; ++f)
          d6.row(f) =
              x.segment(f * kNumArticulated * 6, kNumArticulated * 6)
                  .transpose();
        out.push_back(poses_from_6d(d6));
        break;
      }
      case PriorVariant::none:
        break;
    }
  }
  return out;
}

}  // namespace hmf
