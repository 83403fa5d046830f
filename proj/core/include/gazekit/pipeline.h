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

#ifndef GAZEKIT_PIPELINE_H_
#define GAZEKIT_PIPELINE_H_

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazekit/dataset.h"
#include "gazekit/error.h"
#include "gazekit/features.h"
#include "gazekit/geometry.h"
#include "gazekit/regressor.h"
#include "gazekit/svc.h"

namespace gazekit {

enum class ReconstructionFlag { kOk, kTangentFallback, kNone };

std::string_view reconstruction_flag_name(ReconstructionFlag flag);
std::optional<ReconstructionFlag> parse_reconstruction_flag(std::string_view name);

struct Reconstruction {
  Vec3 gaze3d = Vec3::UnitZ();
  ReconstructionFlag flag = ReconstructionFlag::kOk;
};

// Lifts a 2D gaze vector to a 3D unit vector by intersecting the camera ray
// through the gaze tip pixel with a sphere of `radius` around the centroid
// backprojected at `depth`. Takes the nearer intersection. On a miss the
// ray's closest point to the center is pushed radially onto the sphere and
// the result is flagged kTangentFallback. Throws kNonPositiveDepth.
Reconstruction reconstruct_3d(const Vec2& gaze2d, const Vec2& centroid_px,
                              const CameraIntrinsics& camera, double depth,
                              double radius = kGazeVersorLength);

struct FrameFailure {
  ErrorCode code = ErrorCode::kInvalidArgument;
  std::string message;
};

struct PipelineResult {
  std::string frame_id;
  GazeClass predicted_class = GazeClass::kOther;
  double class_confidence = 0.0;
  std::optional<Vec2> gaze2d;
  std::optional<double> sigma;
  std::optional<Vec3> gaze3d;
  ReconstructionFlag reconstruction_flag = ReconstructionFlag::kNone;
  // Set when the frame could not be processed; class fields are then unused.
  std::optional<FrameFailure> failure;

  bool ok() const { return !failure.has_value(); }
};

struct PipelineOptions {
  double default_depth = kDefaultDepth;  // used when a frame has no depth
  bool use_frame_depth = true;
  double sphere_radius = kGazeVersorLength;
};

using ClassifyFn = std::function<ClassPrediction(const FeatureVector&)>;
// Receives the frame as well so a ground-truth passthrough can annotate it.
using RegressFn =
    std::function<RegressorOutput(const KeypointFrame&, const FeatureVector&)>;

// Never throws for per-frame data problems; they become failure records.
PipelineResult run_with(const KeypointFrame& frame, const ClassifyFn& classify,
                        const RegressFn& regress,
                        const PipelineOptions& options = {});
PipelineResult run(const KeypointFrame& frame, const SvcModel& svc,
                   const CguRegressor& reg, const PipelineOptions& options = {});
std::vector<PipelineResult> run_batch(std::span<const KeypointFrame> frames,
                                      const ClassifyFn& classify,
                                      const RegressFn& regress,
                                      const PipelineOptions& options = {});

// Regressor stand-in returning the annotated 2D gaze of frames that carry a
// target; frames without one get a zero vector.
RegressFn ground_truth_regressor(const PipelineOptions& options = {});

std::string result_to_json_text(const PipelineResult& result);
PipelineResult result_from_json_text(std::string_view line);

// ---------------------------------------------------------------------------
// Evaluation

using ConfusionMatrix = std::array<std::array<long, kNumClasses>, kNumClasses>;

struct ClassificationMetrics {
  ConfusionMatrix confusion{};  // [truth][predicted]
  long total = 0;
  double accuracy = 0.0;
  std::array<double, kNumClasses> precision{};
  std::array<double, kNumClasses> recall{};
  std::array<double, kNumClasses> f1{};
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  std::vector<std::string> warnings;

  friend bool operator==(const ClassificationMetrics&,
                         const ClassificationMetrics&) = default;
};

// Macro averages over all four classes. A class absent from the truth, or
// never predicted, contributes 0 to the affected averages and adds a warning.
// Throws kLengthMismatch.
ClassificationMetrics evaluate_classifier(std::span<const GazeClass> predicted,
                                          std::span<const GazeClass> truth);

struct FrameTruth {
  GazeClass label = GazeClass::kOther;
  std::optional<Vec2> gaze2d;  // workspace frames with a target
  std::optional<Vec3> gaze3d;
};

// Annotates labeled frames. Frames without a label throw kMalformedRecord.
FrameTruth truth_for_frame(const KeypointFrame& frame,
                           const PipelineOptions& options = {});

enum class WorkspaceDenominator { kTrueWorkspace, kAllFrames };

struct EvalOptions {
  WorkspaceDenominator denominator = WorkspaceDenominator::kTrueWorkspace;
};

struct SplitMetrics {
  ClassificationMetrics classification;
  long workspace_true = 0;
  long workspace_correct = 0;  // predicted and labeled workspace
  std::optional<double> workspace_fraction;
  // Over frames predicted and labeled workspace that have ground truth.
  long regression_frames = 0;
  std::optional<double> rmse_2d;  // sqrt(mean squared Euclidean error), px
  std::optional<double> angular_mean_deg;
  std::optional<double> angular_std_deg;
  long failures = 0;  // failed frames, excluded from every other metric

  friend bool operator==(const SplitMetrics&, const SplitMetrics&) = default;
};

// Throws kLengthMismatch.
SplitMetrics evaluate_split(std::span<const PipelineResult> results,
                            std::span<const FrameTruth> truths,
                            const EvalOptions& options = {});

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population standard deviation over splits
  int count = 0;     // splits that contributed

  friend bool operator==(const MeanStd&, const MeanStd&) = default;
};

struct EvalReport {
  std::vector<SplitMetrics> splits;
  MeanStd accuracy;
  MeanStd macro_precision;
  MeanStd macro_recall;
  MeanStd macro_f1;
  std::optional<MeanStd> workspace_fraction;
  std::optional<MeanStd> rmse_2d;
  std::optional<MeanStd> angular_error_deg;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Absent per-split values are skipped; an aggregate with no contributing
// split is absent.
MeanStd mean_std(std::span<const double> values);
EvalReport aggregate_splits(std::vector<SplitMetrics> splits);

// Throws kLengthMismatch when the split lists differ in length.
EvalReport evaluate_end_to_end(
    std::span<const std::vector<PipelineResult>> results,
    std::span<const std::vector<FrameTruth>> truths,
    const EvalOptions& options = {});

std::string report_to_json_text(const EvalReport& report);
EvalReport report_from_json_text(std::string_view text);

// Aligned text table: accuracy, precision, recall and F1 rows, then workspace
// fraction, 2D RMSE and 3D angular error rows, each as mean ± std.
std::string format_report_table(const EvalReport& report);

}  // namespace gazekit

#endif  // GAZEKIT_PIPELINE_H_
