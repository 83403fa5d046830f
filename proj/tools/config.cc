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

#include "config.h"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gazekit/error.h"

namespace gazekit::cli {
namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kConfigError, what);
}

Json vec3_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

// Reads members of one JSON object, remembering which keys were consumed so
// leftovers can be rejected in strict mode.
class Section {
 public:
  Section(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error("'" + path_ + "' must be an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->get<T>();
    } catch (const nlohmann::json::exception&) {
      config_error("'" + where(key) + "' has the wrong type");
    }
  }

  void get_vec3(const char* key, Vec3& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    out = parse_vec3(*it, where(key));
  }

  // Returns a nested section, or nullptr when absent.
  std::optional<Section> child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return std::nullopt;
    return Section(*it, where(key));
  }

  const Json* raw(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish(bool strict) const {
    if (!strict) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.contains(key)) config_error("unknown key '" + where(key) + "'");
    }
  }

  std::string where(std::string_view key) const {
    return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  }

  static Vec3 parse_vec3(const Json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) config_error("'" + where + "' must be [x, y, z]");
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      if (!j[static_cast<std::size_t>(i)].is_number()) {
        config_error("'" + where + "' must be numeric");
      }
      v[i] = j[static_cast<std::size_t>(i)].get<double>();
    }
    return v;
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

std::string_view denominator_name(WorkspaceDenominator d) {
  return d == WorkspaceDenominator::kTrueWorkspace ? "true_workspace" : "all_frames";
}

Json to_json(const RunConfig& c) {
  const SceneConfig& s = c.scene;
  Json markers = Json::array();
  for (const Vec3& m : s.robot_markers) markers.push_back(vec3_json(m));
  Json j;
  j["strict"] = c.strict;
  j["paths"] = {{"dataset", c.paths.dataset},
                {"annotated", c.paths.annotated},
                {"models", c.paths.models},
                {"reports", c.paths.reports}};
  j["scene"] = {
      {"seed", s.seed},
      {"subjects", s.subjects},
      {"counts",
       {{"eye_contact", s.counts.eye_contact},
        {"other", s.counts.other},
        {"icub", s.counts.icub},
        {"workspace", s.counts.workspace}}},
      {"camera",
       {{"fx", s.camera.fx},
        {"fy", s.camera.fy},
        {"cx", s.camera.cx},
        {"cy", s.camera.cy},
        {"width", s.camera.width},
        {"height", s.camera.height}}},
      {"head_distance", s.head_distance},
      {"pixel_noise_std", s.pixel_noise_std},
      {"confidence_tau", s.confidence_tau},
      {"eye_dropout_probability", s.eye_dropout_probability},
      {"head_follow", s.head_follow},
      {"head_jitter_deg", s.head_jitter_deg},
      {"subject_bias_deg", s.subject_bias_deg},
      {"subject_shape_jitter", s.subject_shape_jitter},
      {"board",
       {{"rows", s.board.rows},
        {"cols", s.board.cols},
        {"marker_size", s.board.marker_size},
        {"marker_gap", s.board.marker_gap},
        {"origin_marker_id", s.board.origin_marker_id},
        {"ids", s.board.ids}}},
      {"board_pose", {{"r", vec3_json(s.board_pose.r)}, {"t", vec3_json(s.board_pose.t)}}},
      {"robot_markers", markers}};
  j["augment"] = {{"rotation_angles", c.augment.rotation_angles},
                  {"rotation_fractions", c.augment.rotation_fractions},
                  {"eye_zero_fraction_regressor", c.augment.eye_zero_fraction_regressor},
                  {"zero_eye_confidence", c.augment.zero_eye_confidence},
                  {"seed", c.augment.seed}};
  j["regressor"] = {{"epochs", c.regressor.epochs},
                    {"batch_size", c.regressor.batch_size},
                    {"lr0", c.regressor.lr0},
                    {"lr_decay", c.regressor.lr_decay},
                    {"beta1", c.regressor.beta1},
                    {"beta2", c.regressor.beta2},
                    {"epsilon", c.regressor.epsilon},
                    {"init_stddev", c.regressor.init_stddev},
                    {"seed", c.regressor.seed}};
  j["classifier"] = {{"c_values", c.classifier.grid.c_values},
                     {"gamma_values", c.classifier.grid.gamma_values},
                     {"include_scale_gamma", c.classifier.grid.include_scale_gamma},
                     {"folds", c.classifier.folds},
                     {"seed", c.classifier.seed},
                     {"smo_epsilon", c.classifier.smo_epsilon}};
  j["split"] = {{"k", c.split.k},
                {"train", c.split.ratio.train},
                {"test", c.split.ratio.test},
                {"seed", c.split.seed}};
  j["depth"] = c.depth;
  j["sphere_radius"] = c.sphere_radius;
  j["workspace_denominator"] = denominator_name(c.workspace_denominator);
  return j;
}

RunConfig from_json(const Json& doc, bool strict) {
  RunConfig c;
  Section root(doc, "");
  root.get("strict", c.strict);
  strict = strict || c.strict;

  if (auto p = root.child("paths")) {
    p->get("dataset", c.paths.dataset);
    p->get("annotated", c.paths.annotated);
    p->get("models", c.paths.models);
    p->get("reports", c.paths.reports);
    p->finish(strict);
  }
  if (auto s = root.child("scene")) {
    SceneConfig& sc = c.scene;
    s->get("seed", sc.seed);
    s->get("subjects", sc.subjects);
    if (auto n = s->child("counts")) {
      n->get("eye_contact", sc.counts.eye_contact);
      n->get("other", sc.counts.other);
      n->get("icub", sc.counts.icub);
      n->get("workspace", sc.counts.workspace);
      n->finish(strict);
    }
    if (auto cam = s->child("camera")) {
      cam->get("fx", sc.camera.fx);
      cam->get("fy", sc.camera.fy);
      cam->get("cx", sc.camera.cx);
      cam->get("cy", sc.camera.cy);
      cam->get("width", sc.camera.width);
      cam->get("height", sc.camera.height);
      cam->finish(strict);
    }
    s->get("head_distance", sc.head_distance);
    s->get("pixel_noise_std", sc.pixel_noise_std);
    s->get("confidence_tau", sc.confidence_tau);
    s->get("eye_dropout_probability", sc.eye_dropout_probability);
    s->get("head_follow", sc.head_follow);
    s->get("head_jitter_deg", sc.head_jitter_deg);
    s->get("subject_bias_deg", sc.subject_bias_deg);
    s->get("subject_shape_jitter", sc.subject_shape_jitter);
    if (auto b = s->child("board")) {
      b->get("rows", sc.board.rows);
      b->get("cols", sc.board.cols);
      b->get("marker_size", sc.board.marker_size);
      b->get("marker_gap", sc.board.marker_gap);
      b->get("origin_marker_id", sc.board.origin_marker_id);
      b->get("ids", sc.board.ids);
      b->finish(strict);
    }
    if (auto bp = s->child("board_pose")) {
      Vec3 r = sc.board_pose.r;
      Vec3 t = sc.board_pose.t;
      bp->get_vec3("r", r);
      bp->get_vec3("t", t);
      sc.board_pose = Pose::from(r, t);
      bp->finish(strict);
    }
    if (const Json* m = s->raw("robot_markers")) {
      if (!m->is_array()) config_error("'scene.robot_markers' must be an array");
      sc.robot_markers.clear();
      for (const auto& p : *m) {
        sc.robot_markers.push_back(Section::parse_vec3(p, "scene.robot_markers"));
      }
    }
    s->finish(strict);
  }
  if (auto a = root.child("augment")) {
    a->get("rotation_angles", c.augment.rotation_angles);
    a->get("rotation_fractions", c.augment.rotation_fractions);
    a->get("eye_zero_fraction_regressor", c.augment.eye_zero_fraction_regressor);
    a->get("zero_eye_confidence", c.augment.zero_eye_confidence);
    a->get("seed", c.augment.seed);
    a->finish(strict);
  }
  if (auto r = root.child("regressor")) {
    r->get("epochs", c.regressor.epochs);
    r->get("batch_size", c.regressor.batch_size);
    r->get("lr0", c.regressor.lr0);
    r->get("lr_decay", c.regressor.lr_decay);
    r->get("beta1", c.regressor.beta1);
    r->get("beta2", c.regressor.beta2);
    r->get("epsilon", c.regressor.epsilon);
    r->get("init_stddev", c.regressor.init_stddev);
    r->get("seed", c.regressor.seed);
    r->finish(strict);
  }
  if (auto k = root.child("classifier")) {
    k->get("c_values", c.classifier.grid.c_values);
    k->get("gamma_values", c.classifier.grid.gamma_values);
    k->get("include_scale_gamma", c.classifier.grid.include_scale_gamma);
    k->get("folds", c.classifier.folds);
    k->get("seed", c.classifier.seed);
    k->get("smo_epsilon", c.classifier.smo_epsilon);
    k->finish(strict);
  }
  if (auto sp = root.child("split")) {
    sp->get("k", c.split.k);
    sp->get("train", c.split.ratio.train);
    sp->get("test", c.split.ratio.test);
    sp->get("seed", c.split.seed);
    sp->finish(strict);
  }
  root.get("depth", c.depth);
  root.get("sphere_radius", c.sphere_radius);
  std::string denominator(denominator_name(c.workspace_denominator));
  root.get("workspace_denominator", denominator);
  if (denominator == "true_workspace") {
    c.workspace_denominator = WorkspaceDenominator::kTrueWorkspace;
  } else if (denominator == "all_frames") {
    c.workspace_denominator = WorkspaceDenominator::kAllFrames;
  } else {
    config_error("'workspace_denominator' must be true_workspace or all_frames");
  }
  root.finish(strict);
  return c;
}

}  // namespace

PipelineOptions RunConfig::pipeline_options() const {
  PipelineOptions o;
  o.default_depth = depth;
  o.sphere_radius = sphere_radius;
  return o;
}

SmoOptions RunConfig::smo_options() const {
  SmoOptions o;
  o.epsilon = classifier.smo_epsilon;
  return o;
}

void RunConfig::validate() const {
  scene.validate();
  try {
    augment.validate();
    regressor.validate();
  } catch (const Error& e) {
    config_error(e.message());
  }
  if (classifier.grid.c_values.empty() ||
      (classifier.grid.gamma_values.empty() && !classifier.grid.include_scale_gamma)) {
    config_error("the classifier grid is empty");
  }
  for (double v : classifier.grid.c_values) {
    if (!(v > 0.0)) config_error("classifier C values must be positive");
  }
  for (double v : classifier.grid.gamma_values) {
    if (!(v > 0.0)) config_error("classifier gamma values must be positive");
  }
  if (classifier.folds < 2) config_error("classifier.folds must be at least 2");
  if (!(classifier.smo_epsilon > 0.0)) config_error("classifier.smo_epsilon must be positive");
  if (split.k < 1 || split.ratio.train < 1 || split.ratio.test < 1) {
    config_error("split k and ratio parts must be positive");
  }
  if (!(depth > 0.0)) config_error("depth must be positive");
  if (!(sphere_radius > 0.0)) config_error("sphere_radius must be positive");
}

std::string config_to_json_text(const RunConfig& config) {
  return to_json(config).dump(2) + "\n";
}

RunConfig config_from_json_text(std::string_view text, bool strict) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  return from_json(doc, strict);
}

RunConfig load_config(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json_text(text.str(), strict);
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    config_error("override '" + std::string(assignment) + "' is not key=value");
  }
  const std::string key(assignment.substr(0, eq));
  const std::string text(assignment.substr(eq + 1));
  Json value;
  try {
    value = Json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;
  }

  Json doc = to_json(config);
  Json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (!node->is_object() || !node->contains(part)) {
      config_error("unknown config key '" + key + "'");
    }
    node = &(*node)[part];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = value;
  config = from_json(doc, true);
}

}  // namespace gazekit::cli
