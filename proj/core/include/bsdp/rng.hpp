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

#include <array>
#include <cstdint>
#include <string>

namespace bsdp {

/// Counter-based Philox4x32-10 generator.
///
/// A generator is identified by a 64-bit key (the user seed) and a 64-bit
/// stream id; the 64-bit block counter advances as values are drawn. Child
/// generators obtained through split() live on distinct streams, so parallel
/// work can be handed independent, reproducible generators regardless of the
/// order in which it is scheduled. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  /// Deterministically derives an independent generator for child `index`.
  [[nodiscard]] Rng split(std::uint64_t index) const noexcept;

  /// Uniform double in [0, 1) built from the top 53 bits of one draw.
  double uniform() noexcept;

  /// Uniform integer in [0, bound); bound must be positive.
  std::uint64_t uniform_below(std::uint64_t bound) noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

  /// Opaque token that identifies the current position of this generator.
  [[nodiscard]] std::string tag() const;

  /// Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox_block(
      std::array<std::uint32_t, 4> counter,
      std::array<std::uint32_t, 2> key) noexcept;

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned consumed_ = 2;
};

}  // namespace bsdp
