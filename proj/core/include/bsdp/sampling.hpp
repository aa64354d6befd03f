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

#include "bsdp/binning.hpp"
#include "bsdp/distribution.hpp"
#include "bsdp/rng.hpp"

namespace bsdp {

/// Accuracy/confidence budget and the resulting number of runs.
///
/// n_min = ceil(3 d / (epsilon - delta)^2 * ln(2 (1 - gamma) / (eta - gamma))).
/// delta and gamma are the implementation accuracy and uncertainty; the
/// formula does not involve M or N.
struct SamplePlan {
  unsigned d = 2;
  double epsilon = 0.0;
  double delta = 0.0;
  double eta = 0.0;
  double gamma = 0.0;
  std::uint64_t n_min = 0;

  /// 3 d / (epsilon - delta)^2.
  [[nodiscard]] double prelog_factor() const noexcept;
  /// ln(2 (1 - gamma) / (eta - gamma)).
  [[nodiscard]] double log_factor() const noexcept;
};

/// Requires d >= 2, 0 <= delta < epsilon < 1 and 0 <= gamma < eta < 1.
SamplePlan chernoff_sample_size(unsigned d, double epsilon, double delta, double eta,
                                double gamma);

enum class SamplerMethod { automatic, cumulative, alias };

/// Draws outcome indices from a fixed discrete distribution.
///
/// Uses a cumulative table with binary search up to kAliasThreshold outcomes
/// and Vose's alias table above it (unless a method is forced).
class OutcomeSampler {
 public:
  static constexpr std::size_t kAliasThreshold = std::size_t{1} << 16;

  explicit OutcomeSampler(std::span<const double> probabilities,
                          SamplerMethod method = SamplerMethod::automatic);

  std::size_t operator()(Rng& rng) const;
  [[nodiscard]] SamplerMethod method() const noexcept { return method_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }

 private:
  SamplerMethod method_;
  std::size_t size_;
  std::vector<double> cumulative_;
  std::vector<double> alias_probability_;
  std::vector<std::uint32_t> alias_;
};

/// Multinomial sample of `runs` outcomes, returned as per-outcome counts.
std::vector<std::uint64_t> draw_outcomes(std::span<const double> probabilities,
                                         std::uint64_t runs, Rng& rng,
                                         SamplerMethod method = SamplerMethod::automatic);
std::vector<std::uint64_t> draw_outcomes(const BSDistribution& distribution,
                                         std::uint64_t runs, Rng& rng,
                                         SamplerMethod method = SamplerMethod::automatic);

struct EmpiricalBinned {
  BinPartition partition;
  std::vector<std::uint64_t> counts;
  std::uint64_t runs = 0;

  [[nodiscard]] std::vector<double> frequencies() const;
};

EmpiricalBinned empirical_binned(std::span<const std::uint64_t> outcome_counts,
                                 const BinPartition& partition);

struct MpbEstimate {
  MPBResult result;  // over empirical frequencies, tie_epsilon = epsilon - delta
  EmpiricalBinned empirical;
  std::string rng_tag;  // generator position before sampling
};

/// Draws plan.n_min outcomes and takes the argmax of the bin frequencies.
MpbEstimate estimate_mpb(const BSDistribution& distribution, const BinPartition& partition,
                         const SamplePlan& plan, Rng& rng);

/// U exp(i t H) for a random Hermitian H of unit operator norm; the result
/// differs from U by at most t in operator norm. Models an imperfectly
/// implemented interferometer.
UnitaryMatrix perturb_unitary(const UnitaryMatrix& u, double strength, Rng& rng);

std::string to_json(const SamplePlan& plan);
std::string to_json(const MpbEstimate& estimate, const SamplePlan& plan);

}  // namespace bsdp
