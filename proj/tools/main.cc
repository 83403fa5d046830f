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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "commands.h"
#include "config.h"

int main(int argc, char** argv) {
  using namespace gazekit;
  using namespace gazekit::cli;

  CLI::App app{"Gaze classification, regression and 3D reconstruction from facial keypoints"};
  app.require_subcommand(1);
  std::string config_path;
  std::vector<std::string> overrides;
  bool strict = false;
  app.add_option("-c,--config", config_path, "JSON run configuration");
  app.add_option("-s,--set", overrides, "Override a config key, e.g. split.k=3")
      ->take_all();
  app.add_flag("--strict", strict, "Reject unknown config keys and record members");

  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic labeled dataset");
  synth->add_option("-o,--out", synth_out, "Output JSONL (default paths.dataset)");

  std::string annotate_out;
  auto* annotate = app.add_subcommand("annotate", "Attach 2D/3D gaze ground truth");
  annotate->add_option("-o,--out", annotate_out, "Output JSONL (default paths.annotated)");

  auto* split = app.add_subcommand("split", "Write participant-wise splits");
  auto* train = app.add_subcommand("train", "Train one model pair per split");

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "Evaluate every split on its test subjects");
  eval->add_flag("--gt-passthrough", eval_flags.gt_passthrough,
                 "Use annotated gaze in place of the regressor");

  InferFlags infer_flags;
  std::string infer_in;
  std::string infer_out;
  auto* infer = app.add_subcommand("infer", "Run the pipeline over a JSONL stream");
  infer->add_option("-i,--input", infer_in, "Input JSONL of keypoint frames")->required();
  infer->add_option("-o,--output", infer_out, "Output JSONL of results")->required();
  infer->add_option("--split", infer_flags.split, "Model pair to use")->capture_default_str();

  auto* show = app.add_subcommand("config", "Print the effective configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path, strict);
    if (strict) config.strict = true;
    for (const auto& o : overrides) apply_override(config, o);
    if (!synth_out.empty()) config.paths.dataset = synth_out;
    if (!annotate_out.empty()) config.paths.annotated = annotate_out;
    config.validate();

    std::string command = app.get_subcommands().front()->get_name();
    if (*synth) {
      cmd_synth(config, std::cout);
    } else if (*annotate) {
      cmd_annotate(config, std::cout);
    } else if (*split) {
      cmd_split(config, std::cout);
    } else if (*train) {
      cmd_train(config, std::cout);
    } else if (*eval) {
      cmd_eval(config, eval_flags, std::cout);
    } else if (*infer) {
      infer_flags.input = infer_in;
      infer_flags.output = infer_out;
      cmd_infer(config, infer_flags, std::cout);
    } else if (*show) {
      std::cout << config_to_json_text(config);
      return kExitOk;
    }
    log_run(config, command + " ok");
  } catch (const gazekit::Error& e) {
    std::cerr << "gazekit: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "gazekit: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}
