// Copyright 2026 The A2L Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <memory>
#include <vector>

#include "a2l/bandit.h"
#include "a2l/dynamics.h"
#include "a2l/fisher.h"
#include "a2l/game.h"
#include "a2l/learners.h"
#include "a2l/reduction.h"
#include "benchmark/benchmark.h"

namespace a2l {
namespace {

// range(0): players, range(1): actions.
void BM_UtilityVector(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PolymatrixGame g = generate_game(GameKind::kRandomZeroSum, n,
                                         state.range(1), GraphSpec(), 1);
  StrategyProfile x;
  for (int i = 0; i < n; ++i) x.push_back(MixedStrategy::Uniform(g.num_actions(i)));
  for (auto _ : state) {
    for (int i = 0; i < n; ++i) benchmark::DoNotOptimize(utility_vector(g, i, x));
  }
}
BENCHMARK(BM_UtilityVector)->Args({2, 3})->Args({4, 10})->Args({8, 10});

void BM_OmwuStep(benchmark::State& state) {
  LearnerState s = LearnerState::Initial(state.range(0), 0.25);
  UtilityVector u = UtilityVector::Zeros(state.range(0));
  for (std::size_t a = 0; a < u.size(); ++a) u[a] = 0.01 * static_cast<double>(a);
  for (auto _ : state) {
    benchmark::DoNotOptimize(omwu_next(s));
    observe(s, u);
  }
}
BENCHMARK(BM_OmwuStep)->Arg(2)->Arg(10)->Arg(100);

// Wrapping cost: A2L-OMWU vs bare OMWU over one full-feedback run.
void BM_FullFeedbackRun(benchmark::State& state) {
  const PolymatrixGame g =
      generate_game(GameKind::kRandomZeroSum, 3, 5, GraphSpec(), 2);
  LearnerSpec spec;
  spec.algorithm = state.range(0) ? "a2l-omwu" : "omwu";
  spec.eta = DefaultGradientEta(3);
  const std::vector<LearnerSpec> specs(3, spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_full_feedback(g, specs, 1000, 0));
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_FullFeedbackRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BanditEpochs(benchmark::State& state) {
  const PolymatrixGame g =
      generate_game(GameKind::kRandomZeroSum, 2, 3, GraphSpec(), 3);
  BanditConfig config;
  config.epochs = state.range(0);
  config.eta = 1.0 / 12.0;
  for (auto _ : state) benchmark::DoNotOptimize(run_bandit(g, config, 0));
}
BENCHMARK(BM_BanditEpochs)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_A2LPrd(benchmark::State& state) {
  const FisherMarket m = FisherMarket::Random(state.range(0), state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(run_a2l_prd(m, 500));
}
BENCHMARK(BM_A2LPrd)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace a2l

BENCHMARK_MAIN();
