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

#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <set>
#include <vector>

#include "bsdp/rng.hpp"

namespace bsdp {
namespace {

// Known-answer vectors from the Random123 reference distribution.
TEST(PhiloxBlock, ZeroCounterZeroKey) {
  const auto out = Rng::philox_block({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
}

TEST(PhiloxBlock, AllOnes) {
  const auto out = Rng::philox_block({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                     {0xffffffff, 0xffffffff});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
}

TEST(PhiloxBlock, PiDigits) {
  const auto out = Rng::philox_block({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                     {0xa4093822, 0x299f31d0});
  EXPECT_EQ(out, (std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(Rng, SameSeedSameSequence) {
  Rng a(42), b(42);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(Rng, DifferentSeedsDiffer) {
  Rng a(1), b(2);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(Rng, SplitIsDeterministicAndDistinct) {
  const Rng root(7);
  std::set<std::uint64_t> firsts;
  for (std::uint64_t i = 0; i < 64; ++i) {
    Rng x = root.split(i);
    Rng y = root.split(i);
    const auto v = x();
    EXPECT_EQ(v, y());
    firsts.insert(v);
  }
  EXPECT_EQ(firsts.size(), 64u);
  Rng parent(7);
  Rng child = root.split(0);
  EXPECT_NE(parent(), child());
}

TEST(Rng, SplitDoesNotAdvanceParent) {
  Rng a(9), b(9);
  (void)a.split(3);
  EXPECT_EQ(a(), b());
}

TEST(Rng, UniformInUnitInterval) {
  Rng rng(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  // Mean of U(0,1) has standard error 1/sqrt(12 n).
  EXPECT_NEAR(sum / n, 0.5, 4.0 / std::sqrt(12.0 * n));
}

TEST(Rng, UniformBelowChiSquare) {
  Rng rng(11);
  const std::uint64_t k = 7;
  const int n = 700000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) {
    const auto v = rng.uniform_below(k);
    ASSERT_LT(v, k);
    ++counts[v];
  }
  double chi2 = 0.0;
  const double expected = static_cast<double>(n) / k;
  for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
  // 6 degrees of freedom; the 0.999 quantile is 22.46.
  EXPECT_LT(chi2, 22.46);
}

TEST(Rng, TagTracksPosition) {
  Rng a(5);
  const auto before = a.tag();
  (void)a();
  (void)a();
  (void)a();
  EXPECT_NE(before, a.tag());
  Rng b(5);
  EXPECT_EQ(before, b.tag());
}

}  // namespace
}  // namespace bsdp
