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

#include <memory>

#include "bsdp/binning.hpp"
#include "bsdp/distribution.hpp"
#include "bsdp/fock.hpp"
#include "bsdp/linalg.hpp"

namespace {

// Full output distribution of one collision-free seed; args are (M, N).
void BM_FullDistribution(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const auto n = static_cast<unsigned>(state.range(1));
  auto space = std::make_shared<const bsdp::FockSpace>(m, n);
  const auto u = bsdp::haar_unitary(m, std::uint64_t{1});
  std::vector<std::uint8_t> occ(m, 0);
  for (unsigned i = 0; i < n; ++i) occ[i] = 1;
  const bsdp::Configuration seed(occ);
  for (auto _ : state) {
    auto dist = bsdp::full_distribution(u, space, seed, bsdp::ParticleStatistics::boson);
    benchmark::DoNotOptimize(dist.probabilities().data());
  }
  state.counters["outcomes"] = static_cast<double>(space->size());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(space->size()));
}
BENCHMARK(BM_FullDistribution)
    ->Args({8, 2})
    ->Args({16, 2})
    ->Args({18, 3})
    ->Args({24, 3})
    ->Args({16, 4})
    ->Args({20, 4})
    ->Args({25, 5})
    ->Unit(benchmark::kMillisecond);

void BM_SeedBinProbabilities(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const auto n = static_cast<unsigned>(state.range(1));
  const bsdp::FockSpace space(m, n);
  const auto u = bsdp::haar_unitary(m, std::uint64_t{1});
  const auto partition = bsdp::make_partition(space.size(), 4);
  for (auto _ : state) {
    auto bins = bsdp::seed_bin_probabilities(u, space, space.configuration(0),
                                             bsdp::ParticleStatistics::boson, partition);
    benchmark::DoNotOptimize(bins.data());
  }
}
BENCHMARK(BM_SeedBinProbabilities)->Args({18, 4})->Unit(benchmark::kMillisecond);

}  // namespace
