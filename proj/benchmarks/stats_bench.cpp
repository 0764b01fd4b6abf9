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

#include "tagvalid/covariate.hpp"
#include "tagvalid/stats.hpp"

namespace {

using namespace tagvalid;

void BM_RandomConsistency(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const OutcomePair o{n * 3 / 4, n / 2, n, n};
  for (auto _ : state) benchmark::DoNotOptimize(random_consistency_pvalue(o));
}
BENCHMARK(BM_RandomConsistency)->Arg(20)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_PairedContradiction(benchmark::State& state) {
  const auto b = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(paired_contradiction_pvalue({b * 2 / 3, b - b * 2 / 3}));
}
BENCHMARK(BM_PairedContradiction)->Arg(30)->Arg(1000);

void BM_BoundTerm(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(divergence_bound_term(100000, 27, 0.05));
}
BENCHMARK(BM_BoundTerm);

}  // namespace
