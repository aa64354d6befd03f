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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bsdp/rng.hpp"

namespace bsdp {

/// Photon occupations of the M modes of an interferometer.
class Configuration {
 public:
  Configuration() = default;
  explicit Configuration(std::vector<std::uint8_t> occupations);
  Configuration(std::initializer_list<unsigned> occupations);

  /// Parses comma-separated occupancy digits such as "2,0,0,0".
  static Configuration parse(std::string_view text);

  [[nodiscard]] std::size_t modes() const noexcept { return occupations_.size(); }
  [[nodiscard]] unsigned photons() const noexcept;
  [[nodiscard]] std::span<const std::uint8_t> occupations() const noexcept {
    return occupations_;
  }
  std::uint8_t operator[](std::size_t mode) const { return occupations_[mode]; }

  /// Mode index of every photon, ascending; length equals photons().
  [[nodiscard]] std::vector<std::uint16_t> photon_modes() const;

  /// Throws ValidationError unless this has `modes` entries summing to `photons`.
  void validate(std::size_t modes, unsigned photons) const;

  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;

 private:
  std::vector<std::uint8_t> occupations_;
};

using IntegerCode = boost::multiprecision::cpp_int;

/// Base-N positional value sum_j t_j N^j of a configuration. Rejects N < 2,
/// where the code is not injective.
IntegerCode integer_code(const Configuration& config, unsigned photons);

/// binomial(M + N - 1, N). Throws CapacityError if it does not fit 64 bits.
std::uint64_t space_size(unsigned modes, unsigned photons);

/// Exact binomial coefficient.
IntegerCode binomial(unsigned n, unsigned k);

bool is_collision_free(const Configuration& config) noexcept;

/// Which configurations a FockSpace holds.
enum class OutcomeSet {
  full,            // every configuration of N photons in M modes
  collision_free,  // only configurations with at most one photon per mode
};

/// The configurations of N photons in M modes in ascending integer-code order.
///
/// Immutable after construction and safe to share between threads. Codes are
/// kept in machine words when N^M fits in 64 bits and as arbitrary-precision
/// integers otherwise. For N = 1 the order is by occupied mode (the base-2
/// code), since the base-N code degenerates.
class FockSpace {
 public:
  static constexpr std::size_t kDefaultEnumerationLimit = std::size_t{1} << 24;

  FockSpace(unsigned modes, unsigned photons, OutcomeSet set = OutcomeSet::full,
            std::size_t enumeration_limit = kDefaultEnumerationLimit);

  [[nodiscard]] unsigned modes() const noexcept { return modes_; }
  [[nodiscard]] unsigned photons() const noexcept { return photons_; }
  [[nodiscard]] OutcomeSet outcome_set() const noexcept { return set_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] bool wide_codes() const noexcept { return !wide_codes_.empty(); }

  [[nodiscard]] std::span<const std::uint8_t> occupations(std::size_t index) const;
  [[nodiscard]] std::span<const std::uint16_t> photon_modes(std::size_t index) const;
  [[nodiscard]] Configuration configuration(std::size_t index) const;
  [[nodiscard]] IntegerCode code(std::size_t index) const;

  /// Position of `config` in this space, or nullopt if it is not a member.
  [[nodiscard]] std::optional<std::size_t> index_of(const Configuration& config) const;

  [[nodiscard]] std::size_t collision_free_count() const noexcept;

 private:
  [[nodiscard]] IntegerCode ordering_key(std::span<const std::uint8_t> occ) const;

  unsigned modes_;
  unsigned photons_;
  OutcomeSet set_;
  std::size_t size_ = 0;
  std::vector<std::uint8_t> occupations_;     // size_ * modes_
  std::vector<std::uint16_t> photon_modes_;   // size_ * photons_
  std::vector<std::uint64_t> narrow_codes_;
  std::vector<IntegerCode> wide_codes_;
};

/// All configurations of N photons in M modes, sorted by integer code.
FockSpace enumerate_configurations(
    unsigned modes, unsigned photons,
    std::size_t enumeration_limit = FockSpace::kDefaultEnumerationLimit);

struct SeedDraw {
  Configuration configuration;
  std::size_t index = 0;
  std::string rng_state_tag;  // generator position before the draw
};

/// Uniform draw over the space, or over its collision-free members.
SeedDraw random_seed(const FockSpace& space, Rng& rng, bool collision_free_only);

}  // namespace bsdp
