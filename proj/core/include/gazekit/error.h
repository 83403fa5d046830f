// Copyright 2026 The gazekit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAZEKIT_ERROR_H_
#define GAZEKIT_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace gazekit {

enum class ErrorCode {
  kInvalidArgument,
  kNonPositiveDepth,
  kZeroVector,
  kUnknownMarker,
  kNoValidKeypoints,
  kDegenerateTarget,
  kDegenerateGeometry,
  kTooFewSubjects,
  kMalformedRecord,
  kWrongKeypointCount,
  kMissingClass,
  kTooFewSamples,
  kNonConvergence,
  kNonFiniteLoss,
  kEmptyBatch,
  kLengthMismatch,
  kNoWorkspaceFrames,
  kConfigError,
  kModelMissing,
  kIoError,
};

std::string_view error_code_name(ErrorCode code);
// Inverse of error_code_name(); kInvalidArgument for unknown names.
ErrorCode parse_error_code(std::string_view name);

// All library failures are reported through this exception type. The code
// lets callers (the CLI in particular) map failures onto exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // The message without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace gazekit

#endif  // GAZEKIT_ERROR_H_
