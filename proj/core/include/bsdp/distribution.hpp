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
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsdp/fock.hpp"
#include "bsdp/linalg.hpp"

namespace bsdp {

enum class ParticleStatistics { boson, fermion, distinguishable };

std::string_view to_string(ParticleStatistics statistics) noexcept;

/// Accepts "boson"/"B", "fermion"/"F", "distinguishable"/"D".
ParticleStatistics parse_statistics(std::string_view text);

/// Per(U_{s,r}) / sqrt(prod_j s_j! prod_j r_j!).
Complex amplitude(const UnitaryMatrix& u, const Configuration& input,
                  const Configuration& output);

/// P(r | s; U) for the given particle statistics:
///   boson            |amplitude|^2
///   fermion          |det U_{s,r}|^2 for collision-free r, 0 otherwise
///   distinguishable  Per(|U_{s,r}|^2) / prod_j r_j!
/// Fermions require a collision-free input (ValidationError otherwise).
double transition_probability(const UnitaryMatrix& u, const Configuration& input,
                              const Configuration& output,
                              ParticleStatistics statistics);

/// Neumaier-compensated sum in index order.
double compensated_sum(std::span<const double> values) noexcept;

/// Exact output distribution of one seed over a FockSpace.
///
/// Probabilities follow the space order. When the space holds only
/// collision-free outcomes the retained mass is recorded in support_mass()
/// and the stored probabilities are rescaled to sum to one.
class BSDistribution {
 public:
  BSDistribution(std::shared_ptr<const FockSpace> space, Configuration seed,
                 ParticleStatistics statistics, std::vector<double> probabilities,
                 std::string unitary_tag, double support_mass = 1.0);

  [[nodiscard]] const FockSpace& space() const noexcept { return *space_; }
  [[nodiscard]] const std::shared_ptr<const FockSpace>& space_ptr() const noexcept {
    return space_;
  }
  [[nodiscard]] const Configuration& seed() const noexcept { return seed_; }
  [[nodiscard]] ParticleStatistics statistics() const noexcept { return statistics_; }
  [[nodiscard]] std::span<const double> probabilities() const noexcept {
    return probabilities_;
  }
  [[nodiscard]] double probability(std::size_t index) const {
    return probabilities_.at(index);
  }
  [[nodiscard]] std::size_t size() const noexcept { return probabilities_.size(); }
  [[nodiscard]] const std::string& unitary_tag() const noexcept { return unitary_tag_; }
  [[nodiscard]] double support_mass() const noexcept { return support_mass_; }
  [[nodiscard]] double total() const noexcept { return compensated_sum(probabilities_); }

 private:
  std::shared_ptr<const FockSpace> space_;
  Configuration seed_;
  ParticleStatistics statistics_;
  std::vector<double> probabilities_;
  std::string unitary_tag_;
  double support_mass_;
};

struct DistributionOptions {
  unsigned threads = 1;  // 0 selects the hardware concurrency
};

/// Unnormalized transition probabilities P(r | seed) for every r in `space`,
/// written to `out` (size must equal space.size()). Returns their sum.
/// The result is bitwise independent of the thread count.
double fill_probabilities(const UnitaryMatrix& u, const FockSpace& space,
                          const Configuration& seed, ParticleStatistics statistics,
                          std::span<double> out, unsigned threads = 1);

BSDistribution full_distribution(const UnitaryMatrix& u,
                                 std::shared_ptr<const FockSpace> space,
                                 const Configuration& seed,
                                 ParticleStatistics statistics,
                                 const DistributionOptions& options = {});

struct MaxOutcome {
  std::size_t index = 0;
  Configuration configuration;
  double probability = 0.0;
};

/// Most probable outcome; ties go to the smaller space index.
MaxOutcome max_outcome(const BSDistribution& distribution);

/// CSV with a commented provenance header and columns
/// index,integer_code,occupancy,probability.
std::string distribution_csv(const BSDistribution& distribution);

}  // namespace bsdp
