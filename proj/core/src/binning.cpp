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

#include "bsdp/binning.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "bsdp/errors.hpp"

namespace bsdp {

BinPartition::BinPartition(std::uint64_t space_size, unsigned bins)
    : space_size_(space_size), bins_(bins) {
  if (bins < 2 || bins > space_size)
    throw ValidationError("bin count " + std::to_string(bins) +
                          " must satisfy 2 <= d <= |S| = " + std::to_string(space_size));
  const std::uint64_t base = space_size / bins;
  const std::uint64_t remainder = space_size % bins;
  widths_.resize(bins);
  offsets_.resize(bins + 1);
  offsets_[0] = 0;
  for (unsigned j = 0; j < bins; ++j) {
    widths_[j] = base + (j < remainder ? 1 : 0);
    offsets_[j + 1] = offsets_[j] + widths_[j];
  }
}

unsigned BinPartition::bin_of(std::uint64_t index) const {
  if (index >= space_size_)
    throw ValidationError("outcome index " + std::to_string(index) +
                          " outside a space of size " + std::to_string(space_size_));
  // offsets_ is strictly increasing; the bin is the last offset <= index.
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return static_cast<unsigned>(it - offsets_.begin() - 1);
}

BinPartition make_partition(std::uint64_t space_size, unsigned bins) {
  return BinPartition(space_size, bins);
}

void bin_sums(std::span<const double> probabilities, const BinPartition& partition,
              std::span<double> out) {
  if (probabilities.size() != partition.space_size())
    throw ValidationError("distribution size " + std::to_string(probabilities.size()) +
                          " does not match the partition size " +
                          std::to_string(partition.space_size()));
  if (out.size() != partition.bins())
    throw ValidationError("bin output buffer has the wrong size");
  for (unsigned j = 0; j < partition.bins(); ++j)
    out[j] = compensated_sum(probabilities.subspan(partition.offset(j), partition.width(j)));
}

BinnedDistribution bin_probabilities(const BSDistribution& distribution,
                                     const BinPartition& partition) {
  BinnedDistribution binned{partition, std::vector<double>(partition.bins()),
                            {distribution.seed().to_string(), distribution.unitary_tag(),
                             distribution.statistics()}};
  bin_sums(distribution.probabilities(), partition, binned.probabilities);
  return binned;
}

std::vector<double> seed_bin_probabilities(const UnitaryMatrix& u, const FockSpace& space,
                                           const Configuration& seed,
                                           ParticleStatistics statistics,
                                           const BinPartition& partition,
                                           unsigned threads) {
  std::vector<double> outcome(space.size());
  const double mass = fill_probabilities(u, space, seed, statistics, outcome, threads);
  std::vector<double> bins(partition.bins());
  bin_sums(outcome, partition, bins);
  if (space.outcome_set() == OutcomeSet::collision_free) {
    if (mass <= 0.0) throw ValidationError("no probability mass on collision-free outcomes");
    for (double& p : bins) p /= mass;
  }
  return bins;
}

MPBResult most_probable_bin(std::span<const double> probabilities, double tie_epsilon) {
  MPBResult result;
  if (probabilities.empty()) return result;
  result.p0 = probabilities[0];
  result.p1 = 0.0;
  bool have_second = false;
  for (unsigned j = 1; j < probabilities.size(); ++j) {
    const double p = probabilities[j];
    if (p > result.p0) {
      result.p1 = result.p0;
      result.p0 = p;
      result.label = j;
      have_second = true;
    } else if (!have_second || p > result.p1) {
      result.p1 = p;
      have_second = true;
    }
  }
  result.gap = result.p0 - result.p1;
  result.tie = result.gap <= tie_epsilon;
  return result;
}

MPBResult most_probable_bin(const BinnedDistribution& binned, double tie_epsilon) {
  return most_probable_bin(binned.probabilities, tie_epsilon);
}

double top_gap(const BinnedDistribution& binned) {
  return most_probable_bin(binned.probabilities).gap;
}

std::string binned_csv(const BinnedDistribution& binned) {
  std::ostringstream out;
  out << "# schema_version: 1\n"
      << "# statistics: " << to_string(binned.provenance.statistics) << '\n'
      << "# unitary_tag: " << binned.provenance.unitary_tag << '\n'
      << "# seed: " << binned.provenance.seed << '\n'
      << "# space_size: " << binned.partition.space_size() << '\n'
      << "bin,width,probability\n";
  char buffer[64];
  for (unsigned j = 0; j < binned.partition.bins(); ++j) {
    std::snprintf(buffer, sizeof buffer, "%.17g", binned.probabilities[j]);
    out << j << ',' << binned.partition.width(j) << ',' << buffer << '\n';
  }
  return out.str();
}

}  // namespace bsdp
