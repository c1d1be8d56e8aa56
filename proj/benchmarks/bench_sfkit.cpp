// Copyright 2026 The sfkit Authors
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

#include <random>

#include "sfkit/geodesics.hpp"

using namespace sfkit;

namespace {

Matrix random_symmetric(int n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = normal(gen);
  return 0.5 * (g + g.transpose());
}

}  // namespace

static void BM_EigSym(benchmark::State& state) {
  const Matrix a = random_symmetric(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(eig_sym(a));
}
BENCHMARK(BM_EigSym)->Arg(8)->Arg(32)->Arg(128);

static void BM_SfPartition(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const OperatorPath p = OperatorPath::linear(random_symmetric(n, 2), random_symmetric(n, 3));
  for (auto _ : state) benchmark::DoNotOptimize(sf_partition(p).sf);
}
BENCHMARK(BM_SfPartition)->Arg(4)->Arg(12);

static void BM_AssembleB(benchmark::State& state) {
  const int modes = static_cast<int>(state.range(0));
  const GeodesicFrameData frame = example_frame("sphere_equator");
  const GalerkinSpace space(frame.n(), modes);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_B(0.75, space, frame));
}
BENCHMARK(BM_AssembleB)->Arg(8)->Arg(16)->Arg(32);

static void BM_JacobiFundamental(benchmark::State& state) {
  const GeodesicFrameData frame = example_frame("lorentz_product");
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_fundamental(frame, {0.0, 0.5, 1.0}));
}
BENCHMARK(BM_JacobiFundamental)->Unit(benchmark::kMillisecond);

static void BM_VerifyPeriodicFormula(benchmark::State& state) {
  const GeodesicFrameData frame = example_frame("sphere_equator");
  const int modes = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(verify_periodic_formula(frame, modes).sf);
}
BENCHMARK(BM_VerifyPeriodicFormula)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
