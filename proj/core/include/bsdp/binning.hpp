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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bsdp/distribution.hpp"

namespace bsdp {

/// Split of an ordered outcome set of size |S| into d contiguous bins.
///
/// Bin j covers indices [offset(j), offset(j+1)). Every bin holds
/// floor(|S|/d) outcomes and the first |S| mod d bins hold one more.
class BinPartition {
 public:
  BinPartition(std::uint64_t space_size, unsigned bins);

  [[nodiscard]] unsigned bins() const noexcept { return bins_; }
  [[nodiscard]] std::uint64_t space_size() const noexcept { return space_size_; }
  [[nodiscard]] std::uint64_t width(unsigned bin) const { return widths_.at(bin); }
  [[nodiscard]] std::uint64_t offset(unsigned bin) const { return offsets_.at(bin); }
  [[nodiscard]] std::span<const std::uint64_t> widths() const noexcept { return widths_; }
  /// d + 1 entries; offsets()[0] == 0 and offsets()[d] == |S|.
  [[nodiscard]] std::span<const std::uint64_t> offsets() const noexcept { return offsets_; }

  /// Label of the bin holding `index`; throws ValidationError when out of range.
  [[nodiscard]] unsigned bin_of(std::uint64_t index) const;

  friend bool operator==(const BinPartition&, const BinPartition&) = default;

 private:
  std::uint64_t space_size_;
  unsigned bins_;
  std::vector<std::uint64_t> widths_;
  std::vector<std::uint64_t> offsets_;
};

BinPartition make_partition(std::uint64_t space_size, unsigned bins);

struct Provenance {
  std::string seed;
  std::string unitary_tag;
  ParticleStatistics statistics = ParticleStatistics::boson;
};

struct BinnedDistribution {
  BinPartition partition;
  std::vector<double> probabilities;
  Provenance provenance;
};

/// P(B_j) = sum over outcomes r in bin j of P(r).
BinnedDistribution bin_probabilities(const BSDistribution& distribution,
                                     const BinPartition& partition);

/// Exact bin probabilities of one seed, computed without keeping the
/// outcome-level distribution. Collision-free spaces are renormalized as in
/// full_distribution().
std::vector<double> seed_bin_probabilities(const UnitaryMatrix& u, const FockSpace& space,
                                           const Configuration& seed,
                                           ParticleStatistics statistics,
                                           const BinPartition& partition,
                                           unsigned threads = 1);

/// Bin sums of a raw probability vector, written to `out` (size d).
void bin_sums(std::span<const double> probabilities, const BinPartition& partition,
              std::span<double> out);

struct MPBResult {
  unsigned label = 0;  // most probable bin; smallest label on exact ties
  double p0 = 0.0;     // largest bin probability
  double p1 = 0.0;     // second largest
  double gap = 0.0;    // p0 - p1
  bool tie = false;    // gap <= tie_epsilon
};

MPBResult most_probable_bin(std::span<const double> bin_probabilities,
                            double tie_epsilon = 0.0);
MPBResult most_probable_bin(const BinnedDistribution& binned, double tie_epsilon = 0.0);

/// Difference between the two largest bin probabilities.
double top_gap(const BinnedDistribution& binned);

/// CSV with a commented provenance header and columns bin,width,probability.
std::string binned_csv(const BinnedDistribution& binned);

}  // namespace bsdp
