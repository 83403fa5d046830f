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

#include "gazekit/error.h"

namespace gazekit {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kUnknownMarker: return "UnknownMarker";
    case ErrorCode::kNoValidKeypoints: return "NoValidKeypoints";
    case ErrorCode::kDegenerateTarget: return "DegenerateTarget";
    case ErrorCode::kDegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::kTooFewSubjects: return "TooFewSubjects";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kWrongKeypointCount: return "WrongKeypointCount";
    case ErrorCode::kMissingClass: return "MissingClass";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kNoWorkspaceFrames: return "NoWorkspaceFrames";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kModelMissing: return "ModelMissing";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

ErrorCode parse_error_code(std::string_view name) {
  for (int c = 0; c <= static_cast<int>(ErrorCode::kIoError); ++c) {
    const auto code = static_cast<ErrorCode>(c);
    if (error_code_name(code) == name) return code;
  }
  return ErrorCode::kInvalidArgument;
}

}  // namespace gazekit
