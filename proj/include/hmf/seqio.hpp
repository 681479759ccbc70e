// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>

#include "hmf/ingest.hpp"
#include "hmf/metrics.hpp"
#include "hmf/priortrain.hpp"

namespace hmf {

// JSON file formats. Frames carry axis-angle rotations; units are meters and
// pixels. Every file declares its format tag and version.

void save_motion(const MotionSequence& motion, const std::string& path,
                 const std::string& handedness = "right");
MotionSequence load_motion(const std::string& path);
RawSequence load_raw_sequence(const std::string& path);

void save_camera(const CameraIntrinsics& K, const CameraExtrinsics& ext,
                 const std::string& path);
std::pair<CameraIntrinsics, CameraExtrinsics> load_camera(
    const std::string& path);

void save_detections(const DetectionSequence& dets, const std::string& path,
                     const std::string& source_default = "synth");
void save_initialization(const InitialEstimate& init, const std::string& path);

void save_metrics_report(const MetricsReport& report, double fps,
                         const std::string& path);

}  // namespace hmf
