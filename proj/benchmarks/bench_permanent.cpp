// Copyright 2026 The bsdp Authors.
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

#include "bsdp/linalg.hpp"
#include "bsdp/rng.hpp"

namespace {

bsdp::ComplexMatrix gaussian_matrix(std::size_t n) {
  bsdp::Rng rng(n);
  bsdp::ComplexMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  return a;
}

void BM_PermanentRyser(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = gaussian_matrix(n);
  for (auto _ : state) benchmark::DoNotOptimize(bsdp::permanent_ryser(a));
  state.SetComplexityN(state.range(0));
  state.counters["n2^n"] = static_cast<double>(n) * static_cast<double>(1ull << n);
}
BENCHMARK(BM_PermanentRyser)->DenseRange(2, 20, 2)->Unit(benchmark::kMicrosecond);

void BM_PermanentPlain(benchmark::State& state) {
  const auto a = gaussian_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bsdp::detail::permanent_ryser_plain(a));
}
BENCHMARK(BM_PermanentPlain)->DenseRange(2, 14, 4)->Unit(benchmark::kMicrosecond);

void BM_Determinant(benchmark::State& state) {
  const auto a = gaussian_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(bsdp::determinant(a));
}
BENCHMARK(BM_Determinant)->DenseRange(2, 20, 6);

}  // namespace

BENCHMARK_MAIN();
