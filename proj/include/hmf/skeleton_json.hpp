// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>

#include "hmf/handmodel.hpp"

namespace hmf {

// Object form of the skeleton model file; also embedded verbatim in prior
// checkpoints so a checkpoint is self-contained.
nlohmann::json skeleton_to_json(const SkeletonSpec& spec);
SkeletonSpec skeleton_from_json(const nlohmann::json& j);

}  // namespace hmf
