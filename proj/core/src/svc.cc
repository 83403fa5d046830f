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

#include "gazekit/svc.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "gazekit/error.h"
#include "gazekit/random.h"
#include "text_io.h"

namespace gazekit {
namespace {

constexpr std::string_view kFormatTag = "gazekit-svc";
constexpr int kFormatVersion = 1;

std::vector<int> one_vs_rest_labels(std::span<const LabeledFeature> samples,
                                    GazeClass positive) {
  std::vector<int> y(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    y[i] = samples[i].label == positive ? 1 : -1;
  }
  return y;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

ClassPrediction prediction_from_scores(std::span<const double, kNumClasses> scores) {
  int best = 0;
  for (int c = 1; c < kNumClasses; ++c) {
    if (scores[static_cast<std::size_t>(c)] > scores[static_cast<std::size_t>(best)]) {
      best = c;
    }
  }
  const double top = scores[static_cast<std::size_t>(best)];
  double denom = 0.0;
  for (double s : scores) denom += std::exp(s - top);
  return {kClassOrder[static_cast<std::size_t>(best)], 1.0 / denom};
}

std::array<double, kNumClasses> decision_values(const SvcModel& model,
                                                const FeatureVector& x) {
  std::array<double, kNumClasses> scores{};
  for (int c = 0; c < kNumClasses; ++c) {
    scores[static_cast<std::size_t>(c)] =
        decision(model.machines[static_cast<std::size_t>(c)], x.values());
  }
  return scores;
}

ClassPrediction predict(const SvcModel& model, const FeatureVector& x) {
  const auto scores = decision_values(model, x);
  return prediction_from_scores(scores);
}

SampleMatrix to_sample_matrix(std::span<const LabeledFeature> samples) {
  SampleMatrix x(static_cast<Eigen::Index>(samples.size()), kFeatureSize);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto v = samples[i].features.values();
    for (int j = 0; j < kFeatureSize; ++j) {
      x(static_cast<Eigen::Index>(i), j) = v[static_cast<std::size_t>(j)];
    }
  }
  return x;
}

SvcModel train_svc(std::span<const LabeledFeature> samples, double c,
                   double gamma, const SmoOptions& options) {
  const SampleMatrix x = to_sample_matrix(samples);
  KernelCache cache(x, gamma, options.cache_bytes);
  return train_svc(cache, samples, c, options);
}

SvcModel train_svc(KernelCache& kernel, std::span<const LabeledFeature> samples,
                   double c, const SmoOptions& options) {
  std::vector<GazeClass> labels;
  labels.reserve(samples.size());
  for (const auto& s : samples) labels.push_back(s.label);
  const auto weights = class_weights(labels, kClassOrder);

  SvcModel model;
  model.c = c;
  model.gamma = kernel.gamma();
  for (GazeClass cls : kClassOrder) {
    model.class_weights[static_cast<std::size_t>(class_index(cls))] = weights.at(cls);
  }
  std::vector<double> sample_weight(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    sample_weight[i] = weights.at(samples[i].label);
  }
  for (GazeClass cls : kClassOrder) {
    const std::vector<int> y = one_vs_rest_labels(samples, cls);
    model.machines[static_cast<std::size_t>(class_index(cls))] =
        train_binary_svm(kernel, y, c, sample_weight, options);
  }
  return model;
}

double scale_gamma(std::span<const LabeledFeature> samples) {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& s : samples) {
    for (double v : s.features.values()) {
      sum += v;
      sum_sq += v * v;
      ++count;
    }
  }
  if (count == 0) return 1.0;
  const double mean = sum / static_cast<double>(count);
  const double var = sum_sq / static_cast<double>(count) - mean * mean;
  return var > 0.0 ? 1.0 / (kFeatureSize * var) : 1.0;
}

std::vector<int> stratified_folds(std::span<const LabeledFeature> samples,
                                  int folds, std::uint64_t seed) {
  std::vector<int> fold_of(samples.size(), 0);
  Rng rng(seed);
  for (GazeClass cls : kClassOrder) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].label == cls) members.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(members));
    for (std::size_t r = 0; r < members.size(); ++r) {
      fold_of[members[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
    }
  }
  return fold_of;
}

GridSearchReport grid_search_cv(std::span<const LabeledFeature> samples,
                                const SvcGrid& grid, int folds,
                                std::uint64_t seed, const AugmentPlan* augment,
                                const SmoOptions& options) {
  if (folds < 2) {
    throw Error(ErrorCode::kInvalidArgument, "cross-validation needs >= 2 folds");
  }
  std::array<std::size_t, kNumClasses> counts{};
  for (const auto& s : samples) ++counts[static_cast<std::size_t>(class_index(s.label))];
  for (GazeClass cls : kClassOrder) {
    if (counts[static_cast<std::size_t>(class_index(cls))] < static_cast<std::size_t>(folds)) {
      throw Error(ErrorCode::kTooFewSamples,
                  "class '" + std::string(class_name(cls)) + "' has fewer than " +
                      std::to_string(folds) + " samples");
    }
  }

  std::vector<double> gammas = grid.gamma_values;
  if (grid.include_scale_gamma) gammas.push_back(scale_gamma(samples));
  gammas = sorted_unique(std::move(gammas));
  const std::vector<double> cs = sorted_unique(grid.c_values);
  if (gammas.empty() || cs.empty()) {
    throw Error(ErrorCode::kConfigError, "empty search grid");
  }

  GridSearchReport report;
  report.folds = folds;
  report.fold_of_sample = stratified_folds(samples, folds, seed);
  for (double c : cs) {
    for (double g : gammas) report.cells.push_back({c, g, {}, 0.0});
  }
  const auto cell_index = [&](std::size_t ci, std::size_t gi) {
    return ci * gammas.size() + gi;
  };

  for (int f = 0; f < folds; ++f) {
    std::vector<LabeledFeature> train;
    std::vector<LabeledFeature> held_out;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      (report.fold_of_sample[i] == f ? held_out : train).push_back(samples[i]);
    }
    if (augment) {
      AugmentPlan plan = *augment;
      plan.seed = augment->seed + static_cast<std::uint64_t>(f) + 1;
      train = augment_classifier_set(train, plan);
    }
    const SampleMatrix x = to_sample_matrix(train);
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
      KernelCache cache(x, gammas[gi], options.cache_bytes);
      for (std::size_t ci = 0; ci < cs.size(); ++ci) {
        const SvcModel model = train_svc(cache, train, cs[ci], options);
        std::size_t correct = 0;
        for (const auto& s : held_out) {
          if (predict(model, s.features).label == s.label) ++correct;
        }
        report.cells[cell_index(ci, gi)].fold_accuracy.push_back(
            static_cast<double>(correct) / static_cast<double>(held_out.size()));
      }
    }
  }

  // Cells are ordered by (C, gamma) ascending, so a strict comparison keeps
  // the smallest C, then the smallest gamma, among equal means.
  double best = -1.0;
  for (auto& cell : report.cells) {
    double sum = 0.0;
    for (double a : cell.fold_accuracy) sum += a;
    cell.mean_accuracy = sum / static_cast<double>(cell.fold_accuracy.size());
    if (cell.mean_accuracy > best) {
      best = cell.mean_accuracy;
      report.selected_c = cell.c;
      report.selected_gamma = cell.gamma;
      report.selected_accuracy = cell.mean_accuracy;
    }
  }
  return report;
}

std::string serialize_svc(const SvcModel& model) {
  using text_io::format_double;
  std::ostringstream out;
  out << kFormatTag << " v" << kFormatVersion << '\n';
  out << "class_order";
  for (GazeClass cls : kClassOrder) out << ' ' << class_name(cls);
  out << '\n';
  out << "c " << format_double(model.c) << '\n';
  out << "gamma " << format_double(model.gamma) << '\n';
  out << "class_weights";
  for (double w : model.class_weights) out << ' ' << format_double(w);
  out << '\n';
  for (GazeClass cls : kClassOrder) {
    const BinarySvm& m = model.machines[static_cast<std::size_t>(class_index(cls))];
    out << "machine " << class_name(cls) << '\n';
    out << "gamma " << format_double(m.gamma) << '\n';
    out << "c " << format_double(m.c) << '\n';
    out << "bias " << format_double(m.bias) << '\n';
    out << "support_vectors " << m.support_vectors.rows() << ' '
        << m.support_vectors.cols() << '\n';
    for (Eigen::Index r = 0; r < m.support_vectors.rows(); ++r) {
      out << format_double(m.dual_coef[static_cast<std::size_t>(r)]);
      for (Eigen::Index col = 0; col < m.support_vectors.cols(); ++col) {
        out << ' ' << format_double(m.support_vectors(r, col));
      }
      out << '\n';
    }
  }
  out << "end\n";
  return out.str();
}

SvcModel parse_svc(std::string_view text) {
  text_io::TokenReader in(text);
  in.expect(kFormatTag);
  const std::string version = "v" + std::to_string(kFormatVersion);
  in.expect(version);
  in.expect("class_order");
  for (GazeClass cls : kClassOrder) in.expect(class_name(cls));
  SvcModel model;
  in.expect("c");
  model.c = in.number();
  in.expect("gamma");
  model.gamma = in.number();
  in.expect("class_weights");
  for (double& w : model.class_weights) w = in.number();
  for (GazeClass cls : kClassOrder) {
    BinarySvm& m = model.machines[static_cast<std::size_t>(class_index(cls))];
    in.expect("machine");
    in.expect(class_name(cls));
    in.expect("gamma");
    m.gamma = in.number();
    in.expect("c");
    m.c = in.number();
    in.expect("bias");
    m.bias = in.number();
    in.expect("support_vectors");
    const long rows = in.integer();
    const long cols = in.integer();
    if (rows < 0 || cols != kFeatureSize) {
      text_io::TokenReader::fail("bad support vector block shape");
    }
    m.support_vectors.resize(rows, cols);
    m.dual_coef.resize(static_cast<std::size_t>(rows));
    for (long r = 0; r < rows; ++r) {
      m.dual_coef[static_cast<std::size_t>(r)] = in.number();
      for (long col = 0; col < cols; ++col) m.support_vectors(r, col) = in.number();
    }
  }
  in.expect("end");
  return model;
}

void save_svc(const SvcModel& model, const std::filesystem::path& path) {
  text_io::write_file(path.string(), serialize_svc(model));
}

SvcModel load_svc(const std::filesystem::path& path) {
  return parse_svc(text_io::read_file(path.string()));
}

}  // namespace gazekit
