// Copyright 2026 The handmofit Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hmf {

/// Error classes. The enum value doubles as the CLI exit code.
enum class Err : int {
  io = 2,
  parse = 3,
  schema = 4,
  topology = 5,
  nonfinite = 6,
  mismatch = 7,
  too_short = 8,
  degenerate = 9,
  not_trained = 10,
  behind_camera = 11,
  no_confident_frames = 12,
  unknown_joint_order = 13,
  bad_config = 14,
  diverged = 15,
};

class HmfError : public std::runtime_error {
 public:
  HmfError(Err code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Err code() const { return code_; }
  int exit_code() const { return static_cast<int>(code_); }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw HmfError(code, what);
}

}  // namespace hmf
