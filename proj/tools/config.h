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

#ifndef GAZEKIT_TOOLS_CONFIG_H_
#define GAZEKIT_TOOLS_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "gazekit/augment.h"
#include "gazekit/pipeline.h"
#include "gazekit/regressor.h"
#include "gazekit/svc.h"
#include "gazekit/svm.h"
#include "gazekit/synthgen.h"

namespace gazekit::cli {

struct Paths {
  std::string dataset = "data/dataset.jsonl";
  std::string annotated = "data/annotated.jsonl";
  std::string models = "models";
  std::string reports = "reports";
};

struct SplitSpec {
  int k = 5;
  SplitRatio ratio;
  std::uint64_t seed = 0;
};

struct ClassifierSpec {
  SvcGrid grid;
  int folds = 5;
  std::uint64_t seed = 0;
  double smo_epsilon = 1e-5;
};

// Everything a command needs. Defaults are the reference constants.
struct RunConfig {
  Paths paths;
  SceneConfig scene;
  AugmentPlan augment;
  TrainConfig regressor;
  ClassifierSpec classifier;
  SplitSpec split;
  double depth = kDefaultDepth;
  double sphere_radius = kGazeVersorLength;
  WorkspaceDenominator workspace_denominator = WorkspaceDenominator::kTrueWorkspace;
  bool strict = false;  // reject unknown keys in config and dataset records

  PipelineOptions pipeline_options() const;
  SmoOptions smo_options() const;
  // Throws kConfigError.
  void validate() const;
};

// Serialized form is JSON with one object per section. Every field is
// written, so the text round-trips exactly.
std::string config_to_json_text(const RunConfig& config);

// Missing keys keep their defaults. Unknown keys are rejected when the
// document sets "strict": true or `strict` is passed. Throws kConfigError.
RunConfig config_from_json_text(std::string_view text, bool strict = false);
RunConfig load_config(const std::filesystem::path& path, bool strict = false);

// Applies "section.key=value" with a JSON value; bare words are taken as
// strings. Throws kConfigError for unknown keys or ill-typed values.
void apply_override(RunConfig& config, std::string_view assignment);

}  // namespace gazekit::cli

#endif  // GAZEKIT_TOOLS_CONFIG_H_
