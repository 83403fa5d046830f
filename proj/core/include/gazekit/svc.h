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

#ifndef GAZEKIT_SVC_H_
#define GAZEKIT_SVC_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gazekit/augment.h"
#include "gazekit/dataset.h"
#include "gazekit/features.h"
#include "gazekit/svm.h"

namespace gazekit {

// One RBF machine per class, each separating that class from the rest.
struct SvcModel {
  std::array<BinarySvm, kNumClasses> machines;  // indexed by class_index()
  std::array<double, kNumClasses> class_weights{1.0, 1.0, 1.0, 1.0};
  double c = 1.0;
  double gamma = 1.0;
};

struct ClassPrediction {
  GazeClass label = GazeClass::kEyeContact;
  double confidence = 0.0;
};

// Argmax of the decision values, ties resolved toward the earlier class in
// kClassOrder; confidence is the softmax of the decision values at the argmax.
ClassPrediction prediction_from_scores(std::span<const double, kNumClasses> scores);

std::array<double, kNumClasses> decision_values(const SvcModel& model,
                                                const FeatureVector& x);
ClassPrediction predict(const SvcModel& model, const FeatureVector& x);

SampleMatrix to_sample_matrix(std::span<const LabeledFeature> samples);

// Trains the four machines with per-sample bounds C * w(label), where w are
// the inverse-frequency class weights of `samples`. Every class must occur.
SvcModel train_svc(std::span<const LabeledFeature> samples, double c,
                   double gamma, const SmoOptions& options = {});

// Same, reusing a kernel cache built over to_sample_matrix(samples).
SvcModel train_svc(KernelCache& kernel, std::span<const LabeledFeature> samples,
                   double c, const SmoOptions& options = {});

struct SvcGrid {
  std::vector<double> c_values = {0.1, 1.0, 10.0, 100.0};
  std::vector<double> gamma_values = {0.001, 0.01, 0.1, 1.0};
  // Adds gamma = 1 / (n_features * var(X)) computed on the searched samples.
  bool include_scale_gamma = true;
};

// 1 / (n_features * var(X)) over all feature values.
double scale_gamma(std::span<const LabeledFeature> samples);

struct GridCell {
  double c = 0.0;
  double gamma = 0.0;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
};

struct GridSearchReport {
  std::vector<GridCell> cells;
  double selected_c = 0.0;
  double selected_gamma = 0.0;
  double selected_accuracy = 0.0;
  int folds = 0;
  std::vector<int> fold_of_sample;
};

// Stratified k-fold cross-validation over the (C, gamma) grid. When
// `augment` is given, each training portion is augmented before fitting;
// held-out folds are always scored on original samples. Ties in mean
// accuracy go to the smaller C, then the smaller gamma. Throws
// kTooFewSamples when a class has fewer than `folds` samples.
GridSearchReport grid_search_cv(std::span<const LabeledFeature> samples,
                                const SvcGrid& grid, int folds,
                                std::uint64_t seed,
                                const AugmentPlan* augment = nullptr,
                                const SmoOptions& options = {});

// Stratified fold id per sample: each class is shuffled and dealt round-robin.
std::vector<int> stratified_folds(std::span<const LabeledFeature> samples,
                                  int folds, std::uint64_t seed);

// Versioned text format; every real number is written with 17 significant
// digits so parsing reproduces the model bit for bit.
std::string serialize_svc(const SvcModel& model);
SvcModel parse_svc(std::string_view text);
void save_svc(const SvcModel& model, const std::filesystem::path& path);
SvcModel load_svc(const std::filesystem::path& path);

}  // namespace gazekit

#endif  // GAZEKIT_SVC_H_
