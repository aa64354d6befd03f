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

#include "bsdp/fock.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <set>

#include "bsdp/errors.hpp"

namespace bsdp {

Configuration::Configuration(std::vector<std::uint8_t> occupations)
    : occupations_(std::move(occupations)) {}

Configuration::Configuration(std::initializer_list<unsigned> occupations) {
  occupations_.reserve(occupations.size());
  for (unsigned n : occupations) {
    if (n > std::numeric_limits<std::uint8_t>::max())
      throw ValidationError("occupation " + std::to_string(n) + " exceeds 255");
    occupations_.push_back(static_cast<std::uint8_t>(n));
  }
}

Configuration Configuration::parse(std::string_view text) {
  std::vector<std::uint8_t> occ;
  std::size_t pos = 0;
  while (true) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    unsigned value = 0;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || value > 255)
      throw ValidationError("malformed configuration '" + std::string(text) + "'");
    occ.push_back(static_cast<std::uint8_t>(value));
    pos = static_cast<std::size_t>(ptr - text.data());
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos == text.size()) break;
    if (text[pos] != ',')
      throw ValidationError("malformed configuration '" + std::string(text) + "'");
    ++pos;
  }
  return Configuration(std::move(occ));
}

unsigned Configuration::photons() const noexcept {
  return std::accumulate(occupations_.begin(), occupations_.end(), 0u);
}

std::vector<std::uint16_t> Configuration::photon_modes() const {
  std::vector<std::uint16_t> modes;
  for (std::size_t m = 0; m < occupations_.size(); ++m)
    for (unsigned k = 0; k < occupations_[m]; ++k)
      modes.push_back(static_cast<std::uint16_t>(m));
  return modes;
}

void Configuration::validate(std::size_t modes, unsigned photons) const {
  if (occupations_.size() != modes)
    throw ValidationError("configuration " + to_string() + " has " +
                          std::to_string(occupations_.size()) +
                          " modes, expected " + std::to_string(modes));
  if (this->photons() != photons)
    throw ValidationError("configuration " + to_string() + " holds " +
                          std::to_string(this->photons()) +
                          " photons, expected " + std::to_string(photons));
}

std::string Configuration::to_string() const {
  std::string out;
  for (std::size_t m = 0; m < occupations_.size(); ++m) {
    if (m) out += ',';
    out += std::to_string(occupations_[m]);
  }
  return out;
}

namespace {

IntegerCode positional_value(std::span<const std::uint8_t> occ, unsigned base) {
  IntegerCode value = 0;
  for (std::size_t j = occ.size(); j-- > 0;) value = value * base + occ[j];
  return value;
}

// True when base^modes fits in 64 bits, so every code of the space does too.
bool fits_machine_word(unsigned base, unsigned modes) {
  std::uint64_t bound = 1;
  for (unsigned m = 0; m < modes; ++m) {
    if (bound > std::numeric_limits<std::uint64_t>::max() / base) return false;
    bound *= base;
  }
  return true;
}

std::uint64_t positional_value_narrow(std::span<const std::uint8_t> occ,
                                      unsigned base) {
  std::uint64_t value = 0;
  for (std::size_t j = occ.size(); j-- > 0;) value = value * base + occ[j];
  return value;
}

}  // namespace

IntegerCode integer_code(const Configuration& config, unsigned photons) {
  if (photons < 2)
    throw ValidationError("integer code requires N >= 2 (not injective for N = 1)");
  config.validate(config.modes(), photons);
  for (auto t : config.occupations())
    if (t > photons) throw ValidationError("occupation exceeds photon number");
  return positional_value(config.occupations(), photons);
}

IntegerCode binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  IntegerCode result = 1;
  for (unsigned i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

std::uint64_t space_size(unsigned modes, unsigned photons) {
  if (modes < 1 || photons < 1)
    throw ValidationError("space_size requires M >= 1 and N >= 1");
  const IntegerCode size = binomial(modes + photons - 1, photons);
  if (size > std::numeric_limits<std::uint64_t>::max())
    throw CapacityError("space size binomial(" + std::to_string(modes + photons - 1) +
                        ", " + std::to_string(photons) + ") overflows 64 bits");
  return size.convert_to<std::uint64_t>();
}

bool is_collision_free(const Configuration& config) noexcept {
  return std::all_of(config.occupations().begin(), config.occupations().end(),
                     [](std::uint8_t t) { return t <= 1; });
}

FockSpace::FockSpace(unsigned modes, unsigned photons, OutcomeSet set,
                     std::size_t enumeration_limit)
    : modes_(modes), photons_(photons), set_(set) {
  if (modes < 1 || photons < 1)
    throw ValidationError("a Fock space needs M >= 1 and N >= 1");
  if (photons > 255 || modes > 65535)
    throw CapacityError("at most 255 photons and 65535 modes are supported");
  if (set == OutcomeSet::collision_free && modes < photons)
    throw ValidationError("no collision-free configuration exists for M < N");

  const IntegerCode full = binomial(modes + photons - 1, photons);
  const IntegerCode target =
      set == OutcomeSet::full ? full : binomial(modes, photons);
  if (full > enumeration_limit || target > enumeration_limit)
    throw CapacityError("space of M=" + std::to_string(modes) +
                        ", N=" + std::to_string(photons) +
                        " exceeds the enumeration limit of " +
                        std::to_string(enumeration_limit));

  // Colexicographic walk over all compositions of N into M parts.
  std::vector<std::uint8_t> raw;
  raw.reserve(target.convert_to<std::size_t>() * modes);
  std::vector<std::uint8_t> t(modes, 0);
  t[0] = static_cast<std::uint8_t>(photons);
  for (;;) {
    if (set == OutcomeSet::full ||
        std::all_of(t.begin(), t.end(), [](std::uint8_t v) { return v <= 1; }))
      raw.insert(raw.end(), t.begin(), t.end());
    std::size_t i = 0;
    while (t[i] == 0) ++i;
    if (i + 1 == modes) break;
    const std::uint8_t v = t[i];
    t[i] = 0;
    t[0] = static_cast<std::uint8_t>(v - 1);
    ++t[i + 1];
  }
  size_ = raw.size() / modes;

  const unsigned base = std::max(photons, 2u);
  std::vector<std::size_t> order(size_);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto row = [&](std::size_t k) {
    return std::span<const std::uint8_t>(raw.data() + k * modes, modes);
  };
  if (fits_machine_word(base, modes)) {
    std::vector<std::uint64_t> keys(size_);
    for (std::size_t k = 0; k < size_; ++k) keys[k] = positional_value_narrow(row(k), base);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    narrow_codes_.reserve(size_);
    for (std::size_t k : order) narrow_codes_.push_back(keys[k]);
  } else {
    std::vector<IntegerCode> keys(size_);
    for (std::size_t k = 0; k < size_; ++k) keys[k] = positional_value(row(k), base);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    wide_codes_.reserve(size_);
    for (std::size_t k : order) wide_codes_.push_back(std::move(keys[k]));
  }

  occupations_.reserve(raw.size());
  photon_modes_.reserve(size_ * photons);
  for (std::size_t k : order) {
    const auto occ = row(k);
    occupations_.insert(occupations_.end(), occ.begin(), occ.end());
    for (unsigned m = 0; m < modes; ++m)
      for (unsigned c = 0; c < occ[m]; ++c)
        photon_modes_.push_back(static_cast<std::uint16_t>(m));
  }
}

std::span<const std::uint8_t> FockSpace::occupations(std::size_t index) const {
  return {occupations_.data() + index * modes_, modes_};
}

std::span<const std::uint16_t> FockSpace::photon_modes(std::size_t index) const {
  return {photon_modes_.data() + index * photons_, photons_};
}

Configuration FockSpace::configuration(std::size_t index) const {
  if (index >= size_) throw ValidationError("configuration index out of range");
  const auto occ = occupations(index);
  return Configuration(std::vector<std::uint8_t>(occ.begin(), occ.end()));
}

IntegerCode FockSpace::code(std::size_t index) const {
  if (index >= size_) throw ValidationError("configuration index out of range");
  return wide_codes() ? wide_codes_[index] : IntegerCode(narrow_codes_[index]);
}

IntegerCode FockSpace::ordering_key(std::span<const std::uint8_t> occ) const {
  return positional_value(occ, std::max(photons_, 2u));
}

std::optional<std::size_t> FockSpace::index_of(const Configuration& config) const {
  if (config.modes() != modes_ || config.photons() != photons_) return std::nullopt;
  if (set_ == OutcomeSet::collision_free && !is_collision_free(config))
    return std::nullopt;
  if (wide_codes()) {
    const IntegerCode key = ordering_key(config.occupations());
    auto it = std::lower_bound(wide_codes_.begin(), wide_codes_.end(), key);
    if (it == wide_codes_.end() || *it != key) return std::nullopt;
    return static_cast<std::size_t>(it - wide_codes_.begin());
  }
  const std::uint64_t key =
      positional_value_narrow(config.occupations(), std::max(photons_, 2u));
  auto it = std::lower_bound(narrow_codes_.begin(), narrow_codes_.end(), key);
  if (it == narrow_codes_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - narrow_codes_.begin());
}

std::size_t FockSpace::collision_free_count() const noexcept {
  if (set_ == OutcomeSet::collision_free) return size_;
  std::size_t count = 0;
  for (std::size_t i = 0; i < size_; ++i) {
    const auto occ = occupations(i);
    if (std::all_of(occ.begin(), occ.end(), [](std::uint8_t v) { return v <= 1; }))
      ++count;
  }
  return count;
}

FockSpace enumerate_configurations(unsigned modes, unsigned photons,
                                   std::size_t enumeration_limit) {
  return FockSpace(modes, photons, OutcomeSet::full, enumeration_limit);
}

SeedDraw random_seed(const FockSpace& space, Rng& rng, bool collision_free_only) {
  SeedDraw draw;
  draw.rng_state_tag = rng.tag();
  if (!collision_free_only || space.outcome_set() == OutcomeSet::collision_free) {
    draw.index = static_cast<std::size_t>(rng.uniform_below(space.size()));
    draw.configuration = space.configuration(draw.index);
    return draw;
  }
  if (space.modes() < space.photons())
    throw ValidationError("no collision-free seed exists for M < N");
  // Floyd's algorithm: a uniform N-subset of the M modes.
  std::set<unsigned> chosen;
  const unsigned m = space.modes();
  for (unsigned j = m - space.photons(); j < m; ++j) {
    const auto t = static_cast<unsigned>(rng.uniform_below(j + 1));
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint8_t> occ(m, 0);
  for (unsigned mode : chosen) occ[mode] = 1;
  draw.configuration = Configuration(std::move(occ));
  draw.index = *space.index_of(draw.configuration);
  return draw;
}

}  // namespace bsdp
