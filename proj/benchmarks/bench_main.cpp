// Copyright 2026 The ksl Authors
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

#include <benchmark/benchmark.h>

#include <cstddef>

#include "ksl/gaussian_integrals.hpp"
#include "ksl/simulator.hpp"
#include "ksl/spectrum.hpp"
#include "ksl/state_evolution.hpp"

namespace {

using namespace ksl;

void BM_IndicatorIntegral(benchmark::State& state) {
  const double eta = 0.9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gaussian_indicator_integral(1.3, eta, -2.0, 1.0, 2));
  }
}
BENCHMARK(BM_IndicatorIntegral);

void BM_SpectrumBuild(benchmark::State& state) {
  const auto p = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Spectrum s(PowerLawModel{2.0, 0.5, p});
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_SpectrumBuild)->Arg(10000)->Arg(1000000);

void BM_RidgeSolve(benchmark::State& state) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 10000});
  const double n = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_ridge(s, n, 1.0 / n, 0.0));
  }
}
BENCHMARK(BM_RidgeSolve)->Arg(256)->Arg(4096);

void BM_MaxMarginSolve(benchmark::State& state) {
  const Spectrum s(PowerLawModel{2.0, 0.25, 10000});
  const double n = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_maxmargin(s, n));
  }
}
BENCHMARK(BM_MaxMarginSolve)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_SvmTrain(benchmark::State& state) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 512});
  const auto n = static_cast<std::size_t>(state.range(0));
  const SyntheticDataset data = sample_dataset(s, n, 0.0, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_svm_hinge(data, 1e-4));
  }
}
BENCHMARK(BM_SvmTrain)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_RidgeTrain(benchmark::State& state) {
  const Spectrum s(PowerLawModel{2.0, 0.5, 512});
  const auto n = static_cast<std::size_t>(state.range(0));
  const SyntheticDataset data = sample_dataset(s, n, 0.0, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_ridge(data, 1e-2));
  }
}
BENCHMARK(BM_RidgeTrain)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
