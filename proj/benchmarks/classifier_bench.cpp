// Copyright 2026 The tagvalid Authors
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

#include <benchmark/benchmark.h>

#include <vector>

#include "tagvalid/rng.hpp"
#include "tagvalid/srcam.hpp"
#include "tagvalid/vqmm.hpp"

namespace {

using namespace tagvalid;

void BM_SolveBpdn(benchmark::State& state) {
  const auto rows = static_cast<Eigen::Index>(state.range(0));
  const auto cols = static_cast<Eigen::Index>(state.range(1));
  Rng rng(3);
  Eigen::MatrixXd d(rows, cols);
  for (Eigen::Index i = 0; i < d.size(); ++i) d.data()[i] = rng.normal();
  d.colwise().normalize();
  Eigen::VectorXd f(rows);
  for (Eigen::Index i = 0; i < rows; ++i) f(i) = rng.normal();
  f.normalize();
  for (auto _ : state) benchmark::DoNotOptimize(solve_bpdn(d, f, {.epsilon_sq = 0.01}));
}
BENCHMARK(BM_SolveBpdn)->Args({10, 20})->Args({768, 100})->Unit(benchmark::kMillisecond);

void BM_TrainCodebook(benchmark::State& state) {
  Rng rng(4);
  std::vector<MfccFrame> frames(20000);
  for (auto& f : frames) {
    for (double& v : f) v = rng.normal();
  }
  for (auto _ : state) benchmark::DoNotOptimize(train_codebook(frames, static_cast<std::size_t>(state.range(0)), 5));
}
BENCHMARK(BM_TrainCodebook)->Arg(75)->Unit(benchmark::kMillisecond);

}  // namespace
