// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#include "hmf/synthmotion.hpp"

#include <cmath>

namespace hmf {

MotionSequence synth_hand_motion(int frames, double fps, Rng& rng) {
  if (frames < 1) fail(Err::bad_config, "frame count must be positive");
  MotionSequence motion;
  motion.fps = fps;
  motion.shape.fill(0.0);
  motion.frames.resize(frames);

  struct FingerWave {
    double amp, hz, phase, abd_amp, abd_hz, abd_phase;
  };
  std::array<FingerWave, 5> finger;
  for (int f = 0; f < 5; ++f) {
    finger[f].amp = rng.uniform(0.35, 1.2);
    finger[f].hz = rng.uniform(0.25, 0.9);
    finger[f].phase = rng.uniform(0.0, 2.0 * M_PI);
    finger[f].abd_amp = rng.uniform(0.02, 0.12);
    finger[f].abd_hz = rng.uniform(0.15, 0.5);
    finger[f].abd_phase = rng.uniform(0.0, 2.0 * M_PI);
  }

  // Global orientation wave (per-axis) and translation arc around the rest
  // position half a meter in front of the camera.
  std::array<double, 3> oa, ohz, oph, ta, thz, tph;
  for (int i = 0; i < 3; ++i) {
    oa[i] = rng.uniform(0.08, 0.35);
    ohz[i] = rng.uniform(0.08, 0.4);
    oph[i] = rng.uniform(0.0, 2.0 * M_PI);
    ta[i] = rng.uniform(0.01, 0.05);
    thz[i] = rng.uniform(0.08, 0.35);
    tph[i] = rng.uniform(0.0, 2.0 * M_PI);
  }
  const Vec3 base_transl(0.0, 0.0, 0.55);
  const RotationAA base_orient(rng.uniform(-0.4, 0.4), rng.uniform(-0.4, 0.4),
                               rng.uniform(-0.4, 0.4));

  // Flexion bends fingers toward the palm: +y axis for fingers (pointing
  // +x, palm normal +z), mostly -x for the thumb column.
  for (int t = 0; t < frames; ++t) {
    const double sec = t / fps;
    HandState& st = motion.frames[t];

    const Vec3 wob(oa[0] * std::sin(2.0 * M_PI * ohz[0] * sec + oph[0]),
                   oa[1] * std::sin(2.0 * M_PI * ohz[1] * sec + oph[1]),
                   oa[2] * std::sin(2.0 * M_PI * ohz[2] * sec + oph[2]));
    const Mat3 R = to_matrix(base_orient) * to_matrix(RotationAA(wob));
    st.global_orient = rotation_aa_from_matrix(R);

    st.transl =
        base_transl + Vec3(ta[0] * std::sin(2.0 * M_PI * thz[0] * sec + tph[0]),
                           ta[1] * std::sin(2.0 * M_PI * thz[1] * sec + tph[1]),
                           ta[2] * std::sin(2.0 * M_PI * thz[2] * sec + tph[2]));

    for (int f = 0; f < 5; ++f) {
      const FingerWave& w = finger[f];
      const double curl =
          w.amp * (0.5 - 0.5 * std::cos(2.0 * M_PI * w.hz * sec + w.phase));
      const double abd =
          w.abd_amp * std::sin(2.0 * M_PI * w.abd_hz * sec + w.abd_phase);
      const std::array<double, 3> joint_gain{0.8, 1.0, 0.6};
      for (int seg = 0; seg < 3; ++seg) {
        const int slot = 3 * f + seg;
        const double a = joint_gain[seg] * curl;
        if (f == 0) {
          st.pose[slot] = RotationAA(-0.85 * a, 0.35 * a, seg == 0 ? abd : 0.0);
        } else {
          st.pose[slot] = RotationAA(0.0, a, seg == 0 ? abd : 0.0);
        }
      }
    }
    st.shape = motion.shape;
  }
  return motion;
}

}  // namespace hmf
