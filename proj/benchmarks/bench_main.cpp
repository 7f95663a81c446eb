// Copyright 2026 The qsmooth Authors
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

#include <cmath>
#include <numbers>
#include <vector>

#include <benchmark/benchmark.h>

#include "qsmooth/retrofilter.hpp"
#include "qsmooth/rng.hpp"
#include "qsmooth/smoother.hpp"
#include "qsmooth/trajectory.hpp"

namespace {

using namespace qsmooth;

const OpenSystemModel& atom() {
  static const OpenSystemModel model = two_level_atom(20.0, 1.0, 10.0 / 11.0, std::numbers::pi / 2);
  return model;
}

Record make_record(std::size_t steps) {
  RandomStream rng(7, 0, kTruthStream);
  return simulate_true_trajectory(atom(), DensityMatrix::pure(pauli::excited()), steps, 1e-3, rng)
      .record;
}

void BM_KrausStep(benchmark::State& state) {
  const StepOperators ops(atom(), 1e-3);
  auto rho = DensityMatrix::pure(pauli::excited());
  RecordStep step{{0.3}, {0}};
  const std::vector<double> probs{1e-4};
  for (auto _ : state) {
    auto next = kraus_step(ops, rho, step, probs);
    benchmark::DoNotOptimize(next);
  }
}
BENCHMARK(BM_KrausStep);

void BM_FilterForward(benchmark::State& state) {
  const auto record = make_record(static_cast<std::size_t>(state.range(0)));
  const auto rho0 = DensityMatrix::pure(pauli::excited());
  for (auto _ : state) {
    auto grid = filter_forward(atom(), record, rho0);
    benchmark::DoNotOptimize(grid);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterForward)->Arg(1000);

void BM_Retrofilter(benchmark::State& state) {
  const auto record = make_record(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto grid = retrofilter_record(atom(), record);
    benchmark::DoNotOptimize(grid);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Retrofilter)->Arg(1000);

// Items are sample-steps.
void BM_Smoother(benchmark::State& state) {
  const std::size_t steps = 1000;
  const auto record = make_record(steps);
  const auto rho0 = DensityMatrix::pure(pauli::excited());
  const auto filtered = filter_forward(atom(), record, rho0);
  const auto effects = retrofilter_record(atom(), record);
  SmoothingOptions opt;
  opt.ensemble_size = static_cast<std::size_t>(state.range(0));
  opt.seed = 3;
  for (auto _ : state) {
    auto s = smooth(atom(), record, rho0, filtered, effects, opt);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * static_cast<long>(steps));
}
BENCHMARK(BM_Smoother)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
