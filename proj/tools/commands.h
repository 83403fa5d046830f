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

#ifndef GAZEKIT_TOOLS_COMMANDS_H_
#define GAZEKIT_TOOLS_COMMANDS_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "config.h"
#include "gazekit/error.h"
#include "gazekit/pipeline.h"

namespace gazekit::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

int exit_code_for(ErrorCode code);

// Artifact locations inside the models and reports directories.
std::filesystem::path splits_path(const RunConfig& config);
std::filesystem::path svc_path(const RunConfig& config, int split);
std::filesystem::path regressor_path(const RunConfig& config, int split);
std::filesystem::path grid_report_path(const RunConfig& config, int split);
std::filesystem::path eval_json_path(const RunConfig& config);
std::filesystem::path eval_table_path(const RunConfig& config);

// Writes the synthetic dataset to paths.dataset and prints per-class counts.
void cmd_synth(const RunConfig& config, std::ostream& out);

// Writes paths.annotated: the dataset with gaze2d, gaze3d and centroid_px
// added to every frame that carries a target.
void cmd_annotate(const RunConfig& config, std::ostream& out);

// Writes the participant-wise splits to the models directory.
void cmd_split(const RunConfig& config, std::ostream& out);

// Per split: grid-searched SVC on the augmented training set plus the gaze
// regressor, saved as one model pair with the grid-search report.
void cmd_train(const RunConfig& config, std::ostream& out);

struct EvalFlags {
  // Replace the regressor with the annotated ground truth.
  bool gt_passthrough = false;
};

// Evaluates every split's model pair on its test subjects and writes the
// JSON report and the text table.
EvalReport cmd_eval(const RunConfig& config, const EvalFlags& flags, std::ostream& out);

struct InferFlags {
  std::filesystem::path input;
  std::filesystem::path output;
  int split = 0;
};

// One result line per input record, in input order.
void cmd_infer(const RunConfig& config, const InferFlags& flags, std::ostream& out);

// Appends a timestamped line to <reports>/gazekit.log. Kept apart from the
// deterministic artifacts.
void log_run(const RunConfig& config, const std::string& line);

}  // namespace gazekit::cli

#endif  // GAZEKIT_TOOLS_COMMANDS_H_
