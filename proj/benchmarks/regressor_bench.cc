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

#include <vector>

#include <benchmark/benchmark.h>

#include "gazekit/random.h"
#include "gazekit/regressor.h"

namespace gazekit {
namespace {

std::vector<RegressionSample> random_batch(int n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RegressionSample> batch;
  for (int s = 0; s < n; ++s) {
    RegressionSample r;
    for (int i = 0; i < kNumKeypoints; ++i) {
      r.features.set(i, rng.normal(0.0, 0.3), rng.normal(0.0, 0.3), rng.uniform(0.2, 1.0));
    }
    r.target = Vec2(rng.normal(0.0, 20.0), rng.normal(0.0, 20.0));
    batch.push_back(r);
  }
  return batch;
}

void BM_RegressorForward(benchmark::State& state) {
  const CguRegressor net = CguRegressor::initialized(1);
  const auto batch = random_batch(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(forward(net, batch[0].features));
}
BENCHMARK(BM_RegressorForward);

void BM_RegressorBackward(benchmark::State& state) {
  const CguRegressor net = CguRegressor::initialized(1);
  const auto batch = random_batch(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(backward(net, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RegressorBackward)->Arg(32)->Arg(400);

void BM_RegressorTrainEpoch(benchmark::State& state) {
  const auto data = random_batch(560, 4);
  TrainConfig config;
  config.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(train_regressor(data, config));
}
BENCHMARK(BM_RegressorTrainEpoch)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace gazekit
