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

#include "gazekit/pipeline.h"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gazekit {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::string_view kReportFormat = "gazekit-eval v1";

double safe_ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

Json vec_json(const auto& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

template <typename V>
V json_vec(const Json& j) {
  V v;
  if (!j.is_array() || j.size() != static_cast<std::size_t>(v.size())) {
    throw Error(ErrorCode::kMalformedRecord, "expected an array of " +
                                                 std::to_string(v.size()) +
                                                 " numbers");
  }
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    v[i] = j.at(static_cast<std::size_t>(i)).get<double>();
  }
  return v;
}

Json optional_json(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> json_optional(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

Json mean_std_json(const MeanStd& m) {
  return Json{{"mean", m.mean}, {"std", m.std}, {"count", m.count}};
}

MeanStd json_mean_std(const Json& j) {
  return {j.at("mean").get<double>(), j.at("std").get<double>(),
          j.at("count").get<int>()};
}

Json optional_mean_std_json(const std::optional<MeanStd>& m) {
  return m ? mean_std_json(*m) : Json(nullptr);
}

std::optional<MeanStd> json_optional_mean_std(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return json_mean_std(j.at(key));
}

template <typename T>
Json array_json(const std::array<T, kNumClasses>& a) {
  Json out = Json::array();
  for (const T& v : a) out.push_back(v);
  return out;
}

template <typename T>
std::array<T, kNumClasses> json_array(const Json& j) {
  std::array<T, kNumClasses> a{};
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = j.at(i).get<T>();
  return a;
}

Json classification_json(const ClassificationMetrics& m) {
  Json confusion = Json::array();
  for (const auto& row : m.confusion) confusion.push_back(array_json(row));
  Json classes = Json::array();
  for (GazeClass c : kClassOrder) classes.push_back(class_name(c));
  return Json{{"classes", classes},
              {"confusion", confusion},
              {"total", m.total},
              {"accuracy", m.accuracy},
              {"precision", array_json(m.precision)},
              {"recall", array_json(m.recall)},
              {"f1", array_json(m.f1)},
              {"macro_precision", m.macro_precision},
              {"macro_recall", m.macro_recall},
              {"macro_f1", m.macro_f1},
              {"warnings", m.warnings}};
}

ClassificationMetrics json_classification(const Json& j) {
  ClassificationMetrics m;
  for (std::size_t r = 0; r < m.confusion.size(); ++r) {
    m.confusion[r] = json_array<long>(j.at("confusion").at(r));
  }
  m.total = j.at("total").get<long>();
  m.accuracy = j.at("accuracy").get<double>();
  m.precision = json_array<double>(j.at("precision"));
  m.recall = json_array<double>(j.at("recall"));
  m.f1 = json_array<double>(j.at("f1"));
  m.macro_precision = j.at("macro_precision").get<double>();
  m.macro_recall = j.at("macro_recall").get<double>();
  m.macro_f1 = j.at("macro_f1").get<double>();
  m.warnings = j.at("warnings").get<std::vector<std::string>>();
  return m;
}

Json split_json(const SplitMetrics& s) {
  return Json{{"classification", classification_json(s.classification)},
              {"workspace_true", s.workspace_true},
              {"workspace_correct", s.workspace_correct},
              {"workspace_fraction", optional_json(s.workspace_fraction)},
              {"regression_frames", s.regression_frames},
              {"rmse_2d", optional_json(s.rmse_2d)},
              {"angular_mean_deg", optional_json(s.angular_mean_deg)},
              {"angular_std_deg", optional_json(s.angular_std_deg)},
              {"failures", s.failures}};
}

SplitMetrics json_split(const Json& j) {
  SplitMetrics s;
  s.classification = json_classification(j.at("classification"));
  s.workspace_true = j.at("workspace_true").get<long>();
  s.workspace_correct = j.at("workspace_correct").get<long>();
  s.workspace_fraction = json_optional(j, "workspace_fraction");
  s.regression_frames = j.at("regression_frames").get<long>();
  s.rmse_2d = json_optional(j, "rmse_2d");
  s.angular_mean_deg = json_optional(j, "angular_mean_deg");
  s.angular_std_deg = json_optional(j, "angular_std_deg");
  s.failures = j.at("failures").get<long>();
  return s;
}

std::optional<MeanStd> aggregate_optional(
    const std::vector<SplitMetrics>& splits,
    std::optional<double> SplitMetrics::*field) {
  std::vector<double> values;
  for (const auto& s : splits) {
    if (s.*field) values.push_back(*(s.*field));
  }
  if (values.empty()) return std::nullopt;
  return mean_std(values);
}

}  // namespace

std::string_view reconstruction_flag_name(ReconstructionFlag flag) {
  switch (flag) {
    case ReconstructionFlag::kOk: return "ok";
    case ReconstructionFlag::kTangentFallback: return "tangent_fallback";
    case ReconstructionFlag::kNone: return "none";
  }
  return "none";
}

std::optional<ReconstructionFlag> parse_reconstruction_flag(std::string_view name) {
  for (auto f : {ReconstructionFlag::kOk, ReconstructionFlag::kTangentFallback,
                 ReconstructionFlag::kNone}) {
    if (reconstruction_flag_name(f) == name) return f;
  }
  return std::nullopt;
}

Reconstruction reconstruct_3d(const Vec2& gaze2d, const Vec2& centroid_px,
                              const CameraIntrinsics& camera, double depth,
                              double radius) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "sphere radius must be positive");
  }
  const Vec3 center = backproject(centroid_px, depth, camera);
  const Vec3 dir = backproject(centroid_px + gaze2d, 1.0, camera).normalized();
  const std::vector<double> roots =
      ray_sphere_intersect(Vec3::Zero(), dir, center, radius);
  if (!roots.empty()) {
    const Vec3 tip = roots.front() * dir;
    return {((tip - center) / radius).normalized(), ReconstructionFlag::kOk};
  }
  const double s = std::max(0.0, dir.dot(center));
  const Vec3 closest = s * dir;
  return {(closest - center).normalized(), ReconstructionFlag::kTangentFallback};
}

PipelineResult run_with(const KeypointFrame& frame, const ClassifyFn& classify,
                        const RegressFn& regress, const PipelineOptions& options) {
  PipelineResult result;
  result.frame_id = frame.frame_id;
  try {
    const FeatureVector fv = build_feature(frame);
    const ClassPrediction pred = classify(fv);
    result.predicted_class = pred.label;
    result.class_confidence = pred.confidence;
    if (pred.label != GazeClass::kWorkspace) return result;

    const RegressorOutput out = regress(frame, fv);
    const double depth = options.use_frame_depth
                             ? frame_depth(frame, options.default_depth)
                             : options.default_depth;
    const Reconstruction rec = reconstruct_3d(
        out.gaze2d, face_centroid(frame), frame.camera, depth, options.sphere_radius);
    result.gaze2d = out.gaze2d;
    result.sigma = out.sigma;
    result.gaze3d = rec.gaze3d;
    result.reconstruction_flag = rec.flag;
  } catch (const Error& e) {
    PipelineResult failed;
    failed.frame_id = frame.frame_id;
    failed.failure = FrameFailure{e.code(), e.message()};
    return failed;
  }
  return result;
}

PipelineResult run(const KeypointFrame& frame, const SvcModel& svc,
                   const CguRegressor& reg, const PipelineOptions& options) {
  return run_with(
      frame, [&](const FeatureVector& fv) { return predict(svc, fv); },
      [&](const KeypointFrame&, const FeatureVector& fv) { return forward(reg, fv); },
      options);
}

std::vector<PipelineResult> run_batch(std::span<const KeypointFrame> frames,
                                      const ClassifyFn& classify,
                                      const RegressFn& regress,
                                      const PipelineOptions& options) {
  std::vector<PipelineResult> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(run_with(f, classify, regress, options));
  return out;
}

RegressFn ground_truth_regressor(const PipelineOptions& options) {
  return [options](const KeypointFrame& frame, const FeatureVector&) {
    RegressorOutput out;
    out.sigma = 1.0;
    if (frame.target_ccs) {
      const double depth = options.use_frame_depth
                               ? frame_depth(frame, options.default_depth)
                               : options.default_depth;
      out.gaze2d = annotate_gaze(frame, *frame.target_ccs, depth).gaze2d;
    }
    return out;
  };
}

std::string result_to_json_text(const PipelineResult& r) {
  Json j;
  j["frame_id"] = r.frame_id;
  if (r.failure) {
    j["error"] = Json{{"code", error_code_name(r.failure->code)},
                      {"message", r.failure->message}};
    return j.dump();
  }
  j["class"] = class_name(r.predicted_class);
  j["confidence"] = r.class_confidence;
  if (r.gaze2d) j["gaze2d"] = vec_json(*r.gaze2d);
  if (r.sigma) j["sigma"] = *r.sigma;
  if (r.gaze3d) j["gaze3d"] = vec_json(*r.gaze3d);
  j["reconstruction"] = reconstruction_flag_name(r.reconstruction_flag);
  return j.dump();
}

PipelineResult result_from_json_text(std::string_view line) {
  try {
    const Json j = Json::parse(line);
    PipelineResult r;
    r.frame_id = j.at("frame_id").get<std::string>();
    if (j.contains("error")) {
      const Json& e = j.at("error");
      r.failure = FrameFailure{parse_error_code(e.at("code").get<std::string>()),
                               e.at("message").get<std::string>()};
      return r;
    }
    const auto label = parse_class(j.at("class").get<std::string>());
    if (!label) throw Error(ErrorCode::kMalformedRecord, "unknown class");
    r.predicted_class = *label;
    r.class_confidence = j.at("confidence").get<double>();
    if (j.contains("gaze2d")) r.gaze2d = json_vec<Vec2>(j.at("gaze2d"));
    if (j.contains("sigma")) r.sigma = j.at("sigma").get<double>();
    if (j.contains("gaze3d")) r.gaze3d = json_vec<Vec3>(j.at("gaze3d"));
    const auto flag =
        parse_reconstruction_flag(j.at("reconstruction").get<std::string>());
    if (!flag) throw Error(ErrorCode::kMalformedRecord, "unknown reconstruction flag");
    r.reconstruction_flag = *flag;
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
}

ClassificationMetrics evaluate_classifier(std::span<const GazeClass> predicted,
                                          std::span<const GazeClass> truth) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(predicted.size()) + " predictions for " +
                    std::to_string(truth.size()) + " labels");
  }
  ClassificationMetrics m;
  m.total = static_cast<long>(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ++m.confusion[static_cast<std::size_t>(class_index(truth[i]))]
                 [static_cast<std::size_t>(class_index(predicted[i]))];
  }
  long correct = 0;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    const long tp = m.confusion[c][c];
    long row = 0;
    long col = 0;
    for (std::size_t o = 0; o < kNumClasses; ++o) {
      row += m.confusion[c][o];
      col += m.confusion[o][c];
    }
    correct += tp;
    const std::string name(class_name(kClassOrder[c]));
    if (row == 0) m.warnings.push_back("class '" + name + "' absent from truth");
    if (col == 0) m.warnings.push_back("class '" + name + "' never predicted");
    m.precision[c] = safe_ratio(static_cast<double>(tp), static_cast<double>(col));
    m.recall[c] = safe_ratio(static_cast<double>(tp), static_cast<double>(row));
    m.f1[c] = safe_ratio(2.0 * m.precision[c] * m.recall[c],
                         m.precision[c] + m.recall[c]);
    m.macro_precision += m.precision[c] / kNumClasses;
    m.macro_recall += m.recall[c] / kNumClasses;
    m.macro_f1 += m.f1[c] / kNumClasses;
  }
  m.accuracy = safe_ratio(static_cast<double>(correct), static_cast<double>(m.total));
  return m;
}

FrameTruth truth_for_frame(const KeypointFrame& frame, const PipelineOptions& options) {
  if (!frame.label) {
    throw Error(ErrorCode::kMalformedRecord,
                "frame '" + frame.frame_id + "' has no label");
  }
  FrameTruth t;
  t.label = *frame.label;
  if (t.label == GazeClass::kWorkspace && frame.target_ccs) {
    const double depth = options.use_frame_depth
                             ? frame_depth(frame, options.default_depth)
                             : options.default_depth;
    const GazeAnnotation a = annotate_gaze(frame, *frame.target_ccs, depth);
    t.gaze2d = a.gaze2d;
    t.gaze3d = a.gaze3d;
  }
  return t;
}

SplitMetrics evaluate_split(std::span<const PipelineResult> results,
                            std::span<const FrameTruth> truths,
                            const EvalOptions& options) {
  if (results.size() != truths.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(results.size()) + " results for " +
                    std::to_string(truths.size()) + " ground-truth frames");
  }
  SplitMetrics s;
  std::vector<GazeClass> predicted;
  std::vector<GazeClass> labels;
  double sq_sum = 0.0;
  std::vector<double> angles;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const PipelineResult& r = results[i];
    const FrameTruth& t = truths[i];
    if (!r.ok()) {
      ++s.failures;
      continue;
    }
    predicted.push_back(r.predicted_class);
    labels.push_back(t.label);
    if (t.label != GazeClass::kWorkspace) continue;
    ++s.workspace_true;
    if (r.predicted_class != GazeClass::kWorkspace) continue;
    ++s.workspace_correct;
    if (t.gaze2d && r.gaze2d) {
      ++s.regression_frames;
      sq_sum += (*r.gaze2d - *t.gaze2d).squaredNorm();
      angles.push_back(angular_error_deg(*r.gaze3d, *t.gaze3d));
    }
  }
  s.classification = evaluate_classifier(predicted, labels);
  const double den = options.denominator == WorkspaceDenominator::kTrueWorkspace
                         ? static_cast<double>(s.workspace_true)
                         : static_cast<double>(predicted.size());
  if (den > 0.0) s.workspace_fraction = static_cast<double>(s.workspace_correct) / den;
  if (s.regression_frames > 0) {
    s.rmse_2d = std::sqrt(sq_sum / static_cast<double>(s.regression_frames));
    const MeanStd a = mean_std(angles);
    s.angular_mean_deg = a.mean;
    s.angular_std_deg = a.std;
  }
  return s;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd m;
  m.count = static_cast<int>(values.size());
  if (values.empty()) return m;
  double sum = 0.0;
  for (double v : values) sum += v;
  m.mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - m.mean) * (v - m.mean);
  m.std = std::sqrt(sq / static_cast<double>(values.size()));
  return m;
}

EvalReport aggregate_splits(std::vector<SplitMetrics> splits) {
  EvalReport r;
  r.splits = std::move(splits);
  const auto collect = [&](double ClassificationMetrics::*field) {
    std::vector<double> v;
    for (const auto& s : r.splits) v.push_back(s.classification.*field);
    return mean_std(v);
  };
  r.accuracy = collect(&ClassificationMetrics::accuracy);
  r.macro_precision = collect(&ClassificationMetrics::macro_precision);
  r.macro_recall = collect(&ClassificationMetrics::macro_recall);
  r.macro_f1 = collect(&ClassificationMetrics::macro_f1);
  r.workspace_fraction = aggregate_optional(r.splits, &SplitMetrics::workspace_fraction);
  r.rmse_2d = aggregate_optional(r.splits, &SplitMetrics::rmse_2d);
  r.angular_error_deg = aggregate_optional(r.splits, &SplitMetrics::angular_mean_deg);
  return r;
}

EvalReport evaluate_end_to_end(std::span<const std::vector<PipelineResult>> results,
                               std::span<const std::vector<FrameTruth>> truths,
                               const EvalOptions& options) {
  if (results.size() != truths.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                std::to_string(results.size()) + " result splits for " +
                    std::to_string(truths.size()) + " truth splits");
  }
  std::vector<SplitMetrics> splits;
  for (std::size_t i = 0; i < results.size(); ++i) {
    splits.push_back(evaluate_split(results[i], truths[i], options));
  }
  return aggregate_splits(std::move(splits));
}

std::string report_to_json_text(const EvalReport& report) {
  Json splits = Json::array();
  for (const auto& s : report.splits) splits.push_back(split_json(s));
  Json j{{"format", kReportFormat},
         {"k", report.splits.size()},
         {"accuracy", mean_std_json(report.accuracy)},
         {"precision", mean_std_json(report.macro_precision)},
         {"recall", mean_std_json(report.macro_recall)},
         {"f1", mean_std_json(report.macro_f1)},
         {"workspace_fraction", optional_mean_std_json(report.workspace_fraction)},
         {"rmse_2d_px", optional_mean_std_json(report.rmse_2d)},
         {"angular_error_deg", optional_mean_std_json(report.angular_error_deg)},
         {"splits", splits}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json_text(std::string_view text) {
  try {
    const Json j = Json::parse(text);
    if (j.at("format").get<std::string>() != kReportFormat) {
      throw Error(ErrorCode::kMalformedRecord, "not an evaluation report");
    }
    EvalReport r;
    for (const auto& s : j.at("splits")) r.splits.push_back(json_split(s));
    r.accuracy = json_mean_std(j.at("accuracy"));
    r.macro_precision = json_mean_std(j.at("precision"));
    r.macro_recall = json_mean_std(j.at("recall"));
    r.macro_f1 = json_mean_std(j.at("f1"));
    r.workspace_fraction = json_optional_mean_std(j, "workspace_fraction");
    r.rmse_2d = json_optional_mean_std(j, "rmse_2d_px");
    r.angular_error_deg = json_optional_mean_std(j, "angular_error_deg");
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kMalformedRecord, e.what());
  }
}

std::string format_report_table(const EvalReport& report) {
  std::ostringstream out;
  char line[128];
  const auto row = [&](const char* name, const std::optional<MeanStd>& m) {
    if (m) {
      std::snprintf(line, sizeof(line), "  %-26s %10.4f ± %.4f\n", name, m->mean,
                    m->std);
    } else {
      std::snprintf(line, sizeof(line), "  %-26s %10s\n", name, "n/a");
    }
    out << line;
  };
  out << "Evaluation over k = " << report.splits.size()
      << " splits (mean ± std)\n";
  out << "Classifier\n";
  row("accuracy", report.accuracy);
  row("precision", report.macro_precision);
  row("recall", report.macro_recall);
  row("F1", report.macro_f1);
  out << "Pipeline\n";
  row("workspace fraction", report.workspace_fraction);
  row("2D RMSE (px)", report.rmse_2d);
  row("3D angular error (deg)", report.angular_error_deg);
  return out.str();
}

}  // namespace gazekit
