// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/handmodel.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "hmf/skeleton_json.hpp"

namespace hmf {

void SkeletonSpec::rebuild_pose_slots() {
  pose_slot.fill(-1);
  for (int s = 0; s < kNumArticulated; ++s) pose_slot[articulated[s]] = s;
}

void SkeletonSpec::validate() const {
  if (parent[0] != -1)
    fail(Err::topology, "InvalidTopology: joint 0 must be the wrist root");
  for (int j = 1; j < kNumJoints; ++j) {
    if (parent[j] < 0 || parent[j] >= j)
      fail(Err::topology,
           "InvalidTopology: parents must precede children (joint " +
               std::to_string(j) + ")");
  }
  std::set<int> art(articulated.begin(), articulated.end());
  std::set<int> tip(tips.begin(), tips.end());
  if (art.size() != kNumArticulated || tip.size() != kNumTips)
    fail(Err::topology, "InvalidTopology: duplicate joint indices");
  for (int j : art)
    if (j <= 0 || j >= kNumJoints || tip.count(j))
      fail(Err::topology, "InvalidTopology: articulated set invalid");
  std::set<int> has_child;
  for (int j = 1; j < kNumJoints; ++j) has_child.insert(parent[j]);
  for (int j : tip)
    if (j <= 0 || j >= kNumJoints || has_child.count(j))
      fail(Err::topology, "InvalidTopology: tips must be leaves");
  for (const Vec3& o : rest_offsets)
    if (!std::isfinite(o.x) || !std::isfinite(o.y) || !std::isfinite(o.z))
      fail(Err::topology, "InvalidTopology: non-finite rest offset");
}

std::array<Vec3, kNumJoints> shaped_offsets(const SkeletonSpec& spec,
                                            std::span<const double> shape) {
  return shaped_offsets_t<double>(spec, shape);
}

JointArray rest_joints(const SkeletonSpec& spec,
                       std::span<const double> shape) {
  const auto offs = shaped_offsets(spec, shape);
  JointArray out;
  for (int j = 0; j < kNumJoints; ++j) {
    const int p = spec.parent[j];
    out[j] = (p < 0) ? offs[j] : out[p] + offs[j];
  }
  return out;
}

JointArray forward_kinematics(const SkeletonSpec& spec,
                              const HandState& state) {
  const auto offs = shaped_offsets(spec, state.shape);
  std::array<Mat3, kNumArticulated> local;
  for (int s = 0; s < kNumArticulated; ++s) local[s] = to_matrix(state.pose[s]);
  return fk_joints_t<double>(spec, offs, to_matrix(state.global_orient),
                             state.transl, local);
}

std::vector<JointArray> forward_kinematics(const SkeletonSpec& spec,
                                           const MotionSequence& motion) {
  std::vector<JointArray> out;
  out.reserve(motion.frames.size());
  for (const HandState& f : motion.frames)
    out.push_back(forward_kinematics(spec, f));
  return out;
}

// ---------------------------------------------------------------------------
// Bundled skeleton
// ---------------------------------------------------------------------------

namespace {

// Finger layout: fingers point along +x, thumb side is +y, palm normal +z.
// Segment lengths are in the range of adult hand anthropometry.
SkeletonSpec make_bundled() {
  SkeletonSpec s;
  s.parent = {-1,                      // wrist
              0, 1, 2, 3,              // thumb
              0, 5, 6, 7,              // index
              0, 9, 10, 11,            // middle
              0, 13, 14, 15,           // ring
              0, 17, 18, 19};          // pinky
  const Vec3 offs[kNumJoints] = {
      {0.0, 0.0, 0.0},
      {0.028, 0.042, -0.008}, {0.034, 0.012, -0.002}, {0.030, 0.006, 0.0},
      {0.026, 0.004, 0.0},
      {0.092, 0.030, 0.0}, {0.042, 0.0, 0.0}, {0.026, 0.0, 0.0},
      {0.023, 0.0, 0.0},
      {0.095, 0.008, 0.0}, {0.046, 0.0, 0.0}, {0.029, 0.0, 0.0},
      {0.025, 0.0, 0.0},
      {0.090, -0.014, 0.0}, {0.042, 0.0, 0.0}, {0.027, 0.0, 0.0},
      {0.024, 0.0, 0.0},
      {0.082, -0.036, 0.0}, {0.033, 0.0, 0.0}, {0.021, 0.0, 0.0},
      {0.020, 0.0, 0.0}};
  for (int j = 0; j < kNumJoints; ++j) s.rest_offsets[j] = offs[j];

  int a = 0, t = 0;
  for (int f = 0; f < 5; ++f) {
    const int base = 1 + 4 * f;
    s.articulated[a++] = base;
    s.articulated[a++] = base + 1;
    s.articulated[a++] = base + 2;
    s.tips[t++] = base + 3;
  }

  // Linear shape directions, a few millimeters per unit coefficient:
  //  0 overall size, 1 finger length, 2 palm width, 3 thumb size,
  //  4-7 per-finger length (index..pinky), 8 fingertip length, 9 palm length.
  auto add = [&](int joint, int comp, const Vec3& v) {
    s.shape_basis[joint][comp] = v;
  };
  for (int j = 1; j < kNumJoints; ++j) add(j, 0, offs[j] * 0.06);
  for (int j = 1; j < kNumJoints; ++j)
    if (s.parent[j] != 0) add(j, 1, offs[j] * 0.05);
  for (int f = 0; f < 5; ++f)
    add(1 + 4 * f, 2, Vec3(0.0, offs[1 + 4 * f].y * 0.08, 0.0));
  for (int j = 1; j <= 4; ++j) add(j, 3, offs[j] * 0.08);
  for (int f = 1; f < 5; ++f)
    for (int j = 1 + 4 * f; j < 5 + 4 * f; ++j)
      add(j, 3 + f, offs[j] * 0.05);
  for (int f = 0; f < 5; ++f) add(4 + 4 * f, 8, offs[4 + 4 * f] * 0.08);
  for (int f = 0; f < 5; ++f)
    add(1 + 4 * f, 9, Vec3(offs[1 + 4 * f].x * 0.04, 0.0, 0.0));

  s.rebuild_pose_slots();
  s.validate();
  return s;
}

}  // namespace

const SkeletonSpec& bundled_skeleton() {
  static const SkeletonSpec spec = make_bundled();
  return spec;
}

// ---------------------------------------------------------------------------
// File I/O
// ---------------------------------------------------------------------------

SkeletonSpec skeleton_from_json(const nlohmann::json& j) {
  SkeletonSpec s;
  try {
    const auto& parents = j.at("parents");
    const auto& offsets = j.at("rest_offsets");
    const auto& basis = j.at("shape_basis");
    const auto& art = j.at("articulated");
    const auto& tips = j.at("tips");
    if (parents.size() != kNumJoints || offsets.size() != kNumJoints ||
        basis.size() != kNumJoints)
      fail(Err::topology, "InvalidTopology: expected 21 joints");
    if (art.size() != kNumArticulated)
      fail(Err::topology, "InvalidTopology: expected 15 articulated joints");
    if (tips.size() != kNumTips)
      fail(Err::topology, "InvalidTopology: expected 5 tips");
    for (int i = 0; i < kNumJoints; ++i) {
      s.parent[i] = parents[i].get<int>();
      const auto& o = offsets[i];
      s.rest_offsets[i] = Vec3(o.at(0), o.at(1), o.at(2));
      const auto& rows = basis[i];
      if (rows.size() != 3) fail(Err::parse, "ParseError: shape_basis rows");
      for (int r = 0; r < 3; ++r) {
        const auto& row = rows[r];
        if (row.size() != kNumShape)
          fail(Err::parse, "ParseError: shape_basis cols");
        for (int k = 0; k < kNumShape; ++k) {
          double v = row[k].get<double>();
          if (r == 0) s.shape_basis[i][k].x = v;
          if (r == 1) s.shape_basis[i][k].y = v;
          if (r == 2) s.shape_basis[i][k].z = v;
        }
      }
    }
    for (int i = 0; i < kNumArticulated; ++i) s.articulated[i] = art[i].get<int>();
    for (int i = 0; i < kNumTips; ++i) s.tips[i] = tips[i].get<int>();
  } catch (const nlohmann::json::exception& e) {
    fail(Err::parse, std::string("ParseError: skeleton: ") + e.what());
  }
  s.rebuild_pose_slots();
  s.validate();
  return s;
}

nlohmann::json skeleton_to_json(const SkeletonSpec& spec) {
  nlohmann::json j;
  j["parents"] = spec.parent;
  for (int i = 0; i < kNumJoints; ++i) {
    j["rest_offsets"][i] = {spec.rest_offsets[i].x, spec.rest_offsets[i].y,
                            spec.rest_offsets[i].z};
    for (int k = 0; k < kNumShape; ++k) {
      j["shape_basis"][i][0][k] = spec.shape_basis[i][k].x;
      j["shape_basis"][i][1][k] = spec.shape_basis[i][k].y;
      j["shape_basis"][i][2][k] = spec.shape_basis[i][k].z;
    }
  }
  j["articulated"] = spec.articulated;
  j["tips"] = spec.tips;
  j["units"] = "meters";
  j["joint_order"] =
      "wrist, then thumb/index/middle/ring/pinky each proximal to tip";
  return j;
}

SkeletonSpec load_skeleton(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Err::io, "cannot open skeleton file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(Err::parse, std::string("ParseError: skeleton: ") + e.what());
  }
  return skeleton_from_json(j);
}

void save_skeleton(const SkeletonSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(Err::io, "cannot write skeleton file: " + path);
  out << skeleton_to_json(spec).dump(2) << "\n";
}

}  // namespace hmf
