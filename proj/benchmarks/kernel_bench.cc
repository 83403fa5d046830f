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
#include "gazekit/svm.h"

namespace gazekit {
namespace {

SampleMatrix random_samples(int n, int dims, std::uint64_t seed) {
  Rng rng(seed);
  SampleMatrix x(n, dims);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.normal();
  return x;
}

void BM_RbfKernel(benchmark::State& state) {
  const SampleMatrix x = random_samples(2, 57, 1);
  const std::span<const double> a(x.row(0).data(), 57);
  const std::span<const double> b(x.row(1).data(), 57);
  for (auto _ : state) benchmark::DoNotOptimize(rbf_kernel(a, b, 0.1));
}
BENCHMARK(BM_RbfKernel);

// Cold cache: every row is computed once.
void BM_KernelRows(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SampleMatrix x = random_samples(n, 57, 2);
  for (auto _ : state) {
    KernelCache cache(x, 0.1);
    for (int i = 0; i < n; ++i) benchmark::DoNotOptimize(cache.row(static_cast<std::size_t>(i)));
  }
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_KernelRows)->Arg(256)->Arg(1024);

void BM_SmoBinary(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SampleMatrix x = random_samples(n, 57, 3);
  std::vector<int> y;
  for (int i = 0; i < n; ++i) {
    y.push_back(i % 2 == 0 ? 1 : -1);
    x(i, 0) += 0.8 * y.back();
  }
  const std::vector<double> c(static_cast<std::size_t>(n), 10.0);
  for (auto _ : state) {
    KernelCache cache(x, 1.0 / 57.0);
    benchmark::DoNotOptimize(solve_svm_dual(cache, y, c));
  }
}
BENCHMARK(BM_SmoBinary)->Arg(200)->Arg(800)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace gazekit
