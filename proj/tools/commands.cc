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

#include "commands.h"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazekit/augment.h"
#include "gazekit/dataset.h"
#include "gazekit/features.h"
#include "gazekit/regressor.h"
#include "gazekit/svc.h"
#include "gazekit/synthgen.h"

namespace gazekit::cli {
namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
}

std::string read_text(const fs::path& path, ErrorCode missing) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(missing, "cannot read '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<KeypointFrame> load_dataset(const RunConfig& config, const fs::path& path) {
  if (!fs::exists(path)) {
    throw Error(ErrorCode::kIoError, "dataset '" + path.string() + "' does not exist");
  }
  return read_jsonl(path, JsonlOptions{config.strict});
}

Json vec_json(const auto& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string frame_list(const std::vector<std::string>& ids) {
  std::string s;
  const std::size_t shown = std::min<std::size_t>(ids.size(), 10);
  for (std::size_t i = 0; i < shown; ++i) s += (i ? ", " : "") + ids[i];
  if (ids.size() > shown) s += ", ... (" + std::to_string(ids.size()) + " total)";
  return s;
}

std::string split_plan_json(const SplitPlan& plan) {
  Json splits = Json::array();
  for (const auto& s : plan.splits) {
    splits.push_back({{"train", s.train_subjects}, {"test", s.test_subjects}});
  }
  Json j{{"k", plan.k},
         {"ratio", {plan.ratio.train, plan.ratio.test}},
         {"seed", plan.seed},
         {"splits", splits}};
  return j.dump(2) + "\n";
}

SplitPlan load_split_plan(const RunConfig& config) {
  const std::string text = read_text(splits_path(config), ErrorCode::kModelMissing);
  try {
    const Json j = Json::parse(text);
    SplitPlan plan;
    plan.k = j.at("k").get<int>();
    plan.ratio = {j.at("ratio").at(0).get<int>(), j.at("ratio").at(1).get<int>()};
    plan.seed = j.at("seed").get<std::uint64_t>();
    for (const auto& s : j.at("splits")) {
      plan.splits.push_back({s.at("train").get<std::vector<std::string>>(),
                             s.at("test").get<std::vector<std::string>>()});
    }
    return plan;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord,
                "bad split file '" + splits_path(config).string() + "': " + e.what());
  }
}

std::string grid_report_json(const GridSearchReport& report, int split) {
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    cells.push_back({{"c", c.c},
                     {"gamma", c.gamma},
                     {"fold_accuracy", c.fold_accuracy},
                     {"mean_accuracy", c.mean_accuracy}});
  }
  Json j{{"split", split},
         {"folds", report.folds},
         {"selected",
          {{"c", report.selected_c},
           {"gamma", report.selected_gamma},
           {"accuracy", report.selected_accuracy}}},
         {"cells", cells}};
  return j.dump(2) + "\n";
}

// Features for a training set; errors name the offending frames.
struct TrainingData {
  std::vector<LabeledFeature> labeled;
  std::vector<RegressionSample> regression;
};

TrainingData training_data(std::span<const KeypointFrame> frames, double depth) {
  TrainingData data;
  std::vector<std::string> unlabeled;
  std::vector<std::string> no_target;
  std::vector<std::string> bad;
  for (const auto& f : frames) {
    if (!f.label) {
      unlabeled.push_back(f.frame_id);
      continue;
    }
    FeatureVector fv;
    try {
      fv = build_feature(f);
    } catch (const Error& e) {
      bad.push_back(f.frame_id + " (" + std::string(error_code_name(e.code())) + ")");
      continue;
    }
    data.labeled.push_back({fv, *f.label});
    if (*f.label != GazeClass::kWorkspace) continue;
    if (!f.target_ccs) {
      no_target.push_back(f.frame_id);
      continue;
    }
    const GazeAnnotation a = annotate_gaze(f, *f.target_ccs, frame_depth(f, depth));
    data.regression.push_back({fv, a.gaze2d});
  }
  if (!unlabeled.empty()) {
    throw Error(ErrorCode::kMalformedRecord,
                "training frames without a label: " + frame_list(unlabeled));
  }
  if (!no_target.empty()) {
    throw Error(ErrorCode::kMalformedRecord,
                "workspace frames need target_ccs for regressor training: " +
                    frame_list(no_target));
  }
  if (!bad.empty()) {
    throw Error(ErrorCode::kNoValidKeypoints,
                "training frames without a usable feature vector: " + frame_list(bad));
  }
  return data;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
    case ErrorCode::kInvalidArgument:
      return kExitUsage;
    case ErrorCode::kNonConvergence:
    case ErrorCode::kNonFiniteLoss:
      return kExitNumerical;
    default:
      return kExitData;
  }
}

fs::path splits_path(const RunConfig& c) { return fs::path(c.paths.models) / "splits.json"; }
fs::path svc_path(const RunConfig& c, int split) {
  return fs::path(c.paths.models) / ("split_" + std::to_string(split) + ".svc");
}
fs::path regressor_path(const RunConfig& c, int split) {
  return fs::path(c.paths.models) / ("split_" + std::to_string(split) + ".cgu");
}
fs::path grid_report_path(const RunConfig& c, int split) {
  return fs::path(c.paths.models) / ("split_" + std::to_string(split) + ".grid.json");
}
fs::path eval_json_path(const RunConfig& c) { return fs::path(c.paths.reports) / "eval.json"; }
fs::path eval_table_path(const RunConfig& c) { return fs::path(c.paths.reports) / "eval.txt"; }

void cmd_synth(const RunConfig& config, std::ostream& out) {
  const std::vector<KeypointFrame> frames = generate_dataset(config.scene);
  ensure_parent(config.paths.dataset);
  write_jsonl(fs::path(config.paths.dataset), frames);
  std::map<GazeClass, long> counts;
  for (const auto& f : frames) ++counts[*f.label];
  out << "wrote " << frames.size() << " frames to " << config.paths.dataset << "\n";
  for (GazeClass c : kClassOrder) {
    out << "  " << std::left << std::setw(12) << class_name(c) << counts[c] << "\n";
  }
}

void cmd_annotate(const RunConfig& config, std::ostream& out) {
  std::vector<KeypointFrame> frames = load_dataset(config, config.paths.dataset);
  long annotated = 0;
  for (auto& f : frames) {
    if (!f.target_ccs) continue;
    const GazeAnnotation a =
        annotate_gaze(f, *f.target_ccs, frame_depth(f, config.depth));
    std::erase_if(f.extra_fields, [](const auto& kv) {
      return kv.first == "gaze2d" || kv.first == "gaze3d" || kv.first == "centroid_px";
    });
    f.extra_fields.emplace_back("centroid_px", vec_json(a.centroid_px).dump());
    f.extra_fields.emplace_back("gaze2d", vec_json(a.gaze2d).dump());
    f.extra_fields.emplace_back("gaze3d", vec_json(a.gaze3d).dump());
    ++annotated;
  }
  ensure_parent(config.paths.annotated);
  write_jsonl(fs::path(config.paths.annotated), frames);
  out << "annotated " << annotated << " of " << frames.size() << " frames into "
      << config.paths.annotated << "\n";
}

void cmd_split(const RunConfig& config, std::ostream& out) {
  const std::vector<KeypointFrame> frames = load_dataset(config, config.paths.dataset);
  const SplitPlan plan =
      split_by_subject(frames, config.split.k, config.split.ratio, config.split.seed);
  write_text(splits_path(config), split_plan_json(plan));
  out << "wrote " << plan.k << " splits to " << splits_path(config).string() << "\n";
  for (std::size_t i = 0; i < plan.splits.size(); ++i) {
    out << "  split " << i << ": " << plan.splits[i].train_subjects.size()
        << " train / " << plan.splits[i].test_subjects.size() << " test subjects\n";
  }
}

void cmd_train(const RunConfig& config, std::ostream& out) {
  config.validate();
  const std::vector<KeypointFrame> frames = load_dataset(config, config.paths.dataset);
  const SplitPlan plan =
      split_by_subject(frames, config.split.k, config.split.ratio, config.split.seed);
  write_text(splits_path(config), split_plan_json(plan));
  const SmoOptions smo = config.smo_options();

  for (int i = 0; i < plan.k; ++i) {
    const auto& split = plan.splits[static_cast<std::size_t>(i)];
    const std::vector<KeypointFrame> train = select_subjects(frames, split.train_subjects);
    const TrainingData data = training_data(train, config.depth);

    AugmentPlan augment = config.augment;
    augment.seed = config.augment.seed + static_cast<std::uint64_t>(i);
    const GridSearchReport grid =
        grid_search_cv(data.labeled, config.classifier.grid, config.classifier.folds,
                       config.classifier.seed + static_cast<std::uint64_t>(i), &augment, smo);
    const std::vector<LabeledFeature> augmented = augment_classifier_set(data.labeled, augment);
    const SvcModel svc = train_svc(augmented, grid.selected_c, grid.selected_gamma, smo);

    if (data.regression.empty()) {
      throw Error(ErrorCode::kMissingClass,
                  "split " + std::to_string(i) + " has no workspace training frames");
    }
    TrainConfig reg_config = config.regressor;
    reg_config.seed = config.regressor.seed + static_cast<std::uint64_t>(i);
    const RegressorTrainResult reg =
        train_regressor(augment_regressor_set(data.regression, augment), reg_config);

    write_text(svc_path(config, i), serialize_svc(svc));
    write_text(regressor_path(config, i), serialize_regressor(reg.net));
    write_text(grid_report_path(config, i), grid_report_json(grid, i));
    out << "split " << i << ": " << data.labeled.size() << " classifier samples ("
        << augmented.size() << " augmented), C=" << grid.selected_c
        << " gamma=" << grid.selected_gamma << " cv accuracy "
        << std::fixed << std::setprecision(4) << grid.selected_accuracy
        << ", regressor final loss " << reg.log.back().loss << "\n"
        << std::defaultfloat;
  }
}

EvalReport cmd_eval(const RunConfig& config, const EvalFlags& flags, std::ostream& out) {
  const std::vector<KeypointFrame> frames = load_dataset(config, config.paths.dataset);
  const SplitPlan plan = load_split_plan(config);
  const PipelineOptions options = config.pipeline_options();

  std::vector<std::vector<PipelineResult>> results;
  std::vector<std::vector<FrameTruth>> truths;
  for (int i = 0; i < plan.k; ++i) {
    const SvcModel svc = load_svc(svc_path(config, i));
    const CguRegressor reg = load_regressor(regressor_path(config, i));
    const std::vector<KeypointFrame> test =
        select_subjects(frames, plan.splits[static_cast<std::size_t>(i)].test_subjects);
    const ClassifyFn classify = [&](const FeatureVector& fv) { return predict(svc, fv); };
    const RegressFn regress =
        flags.gt_passthrough
            ? ground_truth_regressor(options)
            : RegressFn([&](const KeypointFrame&, const FeatureVector& fv) {
                return forward(reg, fv);
              });
    results.push_back(run_batch(test, classify, regress, options));
    std::vector<FrameTruth> t;
    for (const auto& f : test) t.push_back(truth_for_frame(f, options));
    truths.push_back(std::move(t));
  }
  EvalOptions eval_options;
  eval_options.denominator = config.workspace_denominator;
  const EvalReport report = evaluate_end_to_end(results, truths, eval_options);
  const std::string table = format_report_table(report);
  write_text(eval_json_path(config), report_to_json_text(report));
  write_text(eval_table_path(config), table);
  out << table;
  return report;
}

void cmd_infer(const RunConfig& config, const InferFlags& flags, std::ostream& out) {
  const SvcModel svc = load_svc(svc_path(config, flags.split));
  const CguRegressor reg = load_regressor(regressor_path(config, flags.split));
  std::ifstream in(flags.input);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read '" + flags.input.string() + "'");
  ensure_parent(flags.output);
  std::ofstream dst(flags.output, std::ios::binary);
  if (!dst) throw Error(ErrorCode::kIoError, "cannot write '" + flags.output.string() + "'");

  const PipelineOptions options = config.pipeline_options();
  const JsonlOptions jsonl{config.strict};
  std::string line;
  long lineno = 0;
  long records = 0;
  long failures = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    PipelineResult result;
    try {
      result = run(frame_from_json_text(line, jsonl), svc, reg, options);
    } catch (const Error& e) {
      result.frame_id = "line " + std::to_string(lineno);
      result.failure = FrameFailure{e.code(), e.message()};
    }
    failures += result.ok() ? 0 : 1;
    dst << result_to_json_text(result) << '\n';
    ++records;
  }
  if (!dst) throw Error(ErrorCode::kIoError, "failed writing '" + flags.output.string() + "'");
  out << "wrote " << records << " results (" << failures << " failures) to "
      << flags.output.string() << "\n";
}

void log_run(const RunConfig& config, const std::string& line) {
  std::error_code ec;
  fs::create_directories(config.paths.reports, ec);
  std::ofstream log(fs::path(config.paths.reports) / "gazekit.log", std::ios::app);
  if (!log) return;
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  log << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << ' ' << line << '\n';
}

}  // namespace gazekit::cli
