// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "hmf/handmodel.hpp"
#include "hmf/rng.hpp"

namespace hmf {

/// Procedural right-hand motion: per-finger curl/wave cycles with randomized
/// amplitude, rate, and phase, plus a slow global orientation wave and a
/// small translation arc in front of the camera. Desk-scale stand-in for
/// motion capture.
MotionSequence synth_hand_motion(int frames, double fps, Rng& rng);

}  // namespace hmf
