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

#include "bsdp/distribution.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "bsdp/errors.hpp"
#include "bsdp/parallel.hpp"

namespace bsdp {
namespace {

double factorial_product(std::span<const std::uint8_t> occupations) noexcept {
  double product = 1.0;
  for (auto t : occupations)
    for (unsigned k = 2; k <= t; ++k) product *= k;
  return product;
}

void require_fermion_seed(const Configuration& seed) {
  if (!is_collision_free(seed))
    throw ValidationError("fermionic input " + seed.to_string() +
                          " must be collision-free");
}

// Largest Ryser subset table (modes * 2^N entries) built per seed before
// falling back to one full permanent per outcome.
constexpr std::size_t kMaxTableEntries = std::size_t{1} << 22;

// Evaluates P(r | seed) for many outputs r of one seed.
//
// For bosons and distinguishable particles the permanent is expanded with
// Ryser's formula over subsets S of the seed's N photon columns:
//   Per(U_{s,r}) = (-1)^N sum_S (-1)^|S| prod_k rowsum(r_k, S),
// where rowsum(m, S) = sum_{j in S} U(m, c_j) does not depend on r, so it is
// tabulated once per seed. Each outcome then costs 2^N * N products.
class SeedKernel {
 public:
  SeedKernel(const UnitaryMatrix& u, const Configuration& seed,
             ParticleStatistics statistics)
      : u_(u), statistics_(statistics), columns_(seed.photon_modes()),
        photons_(static_cast<unsigned>(columns_.size())),
        seed_factorials_(factorial_product(seed.occupations())) {
    if (statistics_ == ParticleStatistics::fermion) return;
    const std::size_t modes = u.dimension();
    if (photons_ > 20 || (modes << photons_) > kMaxTableEntries) return;
    subsets_ = std::size_t{1} << photons_;
    table_re_.assign(modes * subsets_, 0.0);
    if (statistics_ == ParticleStatistics::boson) table_im_.assign(modes * subsets_, 0.0);
    for (std::size_t m = 0; m < modes; ++m) {
      double* re = table_re_.data() + m * subsets_;
      double* im = table_im_.empty() ? nullptr : table_im_.data() + m * subsets_;
      for (std::size_t s = 1; s < subsets_; ++s) {
        const std::size_t low = static_cast<std::size_t>(std::countr_zero(s));
        const std::size_t rest = s & (s - 1);
        const Complex entry = u(m, columns_[low]);
        if (im) {
          re[s] = re[rest] + entry.real();
          im[s] = im[rest] + entry.imag();
        } else {
          re[s] = re[rest] + std::norm(entry);
        }
      }
    }
    signs_.resize(subsets_);
    for (std::size_t s = 0; s < subsets_; ++s)
      signs_[s] = (std::popcount(s) & 1) ? -1.0 : 1.0;
  }

  struct Scratch {
    std::vector<double> re, im;
    std::vector<Complex> matrix;
  };

  [[nodiscard]] Scratch make_scratch() const {
    Scratch scratch;
    scratch.re.resize(subsets_);
    scratch.im.resize(subsets_);
    scratch.matrix.resize(std::size_t{photons_} * photons_);
    return scratch;
  }

  double probability(std::span<const std::uint16_t> rows,
                     std::span<const std::uint8_t> occupations, Scratch& scratch) const {
    switch (statistics_) {
      case ParticleStatistics::boson: {
        const double per_norm = std::norm(boson_permanent(rows, scratch));
        return per_norm / (seed_factorials_ * factorial_product(occupations));
      }
      case ParticleStatistics::distinguishable:
        return real_permanent(rows, scratch) / factorial_product(occupations);
      case ParticleStatistics::fermion: {
        for (auto t : occupations)
          if (t > 1) return 0.0;
        for (unsigned i = 0; i < photons_; ++i)
          for (unsigned j = 0; j < photons_; ++j)
            scratch.matrix[i * photons_ + j] = u_(rows[i], columns_[j]);
        return std::norm(detail::lu_determinant_inplace(scratch.matrix, photons_));
      }
    }
    return 0.0;
  }

 private:
  [[nodiscard]] ComplexMatrix outcome_matrix(std::span<const std::uint16_t> rows,
                                             bool squared) const {
    ComplexMatrix a(photons_, photons_);
    for (unsigned i = 0; i < photons_; ++i)
      for (unsigned j = 0; j < photons_; ++j) {
        const Complex z = u_(rows[i], columns_[j]);
        a(i, j) = squared ? Complex(std::norm(z)) : z;
      }
    return a;
  }

  Complex boson_permanent(std::span<const std::uint16_t> rows, Scratch& scratch) const {
    if (subsets_ == 0) return permanent_ryser(outcome_matrix(rows, false), photons_);
    double* pr = scratch.re.data();
    double* pi = scratch.im.data();
    {
      const double* tr = table_re_.data() + rows[0] * subsets_;
      const double* ti = table_im_.data() + rows[0] * subsets_;
      for (std::size_t s = 0; s < subsets_; ++s) {
        pr[s] = tr[s];
        pi[s] = ti[s];
      }
    }
    for (unsigned k = 1; k < photons_; ++k) {
      const double* tr = table_re_.data() + rows[k] * subsets_;
      const double* ti = table_im_.data() + rows[k] * subsets_;
      for (std::size_t s = 0; s < subsets_; ++s) {
        const double re = pr[s] * tr[s] - pi[s] * ti[s];
        const double im = pr[s] * ti[s] + pi[s] * tr[s];
        pr[s] = re;
        pi[s] = im;
      }
    }
    double re = 0.0, im = 0.0;
    for (std::size_t s = 1; s < subsets_; ++s) {
      re += signs_[s] * pr[s];
      im += signs_[s] * pi[s];
    }
    return (photons_ & 1) ? Complex(-re, -im) : Complex(re, im);
  }

  double real_permanent(std::span<const std::uint16_t> rows, Scratch& scratch) const {
    if (subsets_ == 0) return permanent_ryser(outcome_matrix(rows, true), photons_).real();
    double* pr = scratch.re.data();
    const double* t0 = table_re_.data() + rows[0] * subsets_;
    for (std::size_t s = 0; s < subsets_; ++s) pr[s] = t0[s];
    for (unsigned k = 1; k < photons_; ++k) {
      const double* t = table_re_.data() + rows[k] * subsets_;
      for (std::size_t s = 0; s < subsets_; ++s) pr[s] *= t[s];
    }
    double total = 0.0;
    for (std::size_t s = 1; s < subsets_; ++s) total += signs_[s] * pr[s];
    return (photons_ & 1) ? -total : total;
  }

  const UnitaryMatrix& u_;
  ParticleStatistics statistics_;
  std::vector<std::uint16_t> columns_;
  unsigned photons_;
  double seed_factorials_;
  std::size_t subsets_ = 0;
  std::vector<double> table_re_, table_im_, signs_;
};

constexpr std::size_t kChunk = 512;

}  // namespace

std::string_view to_string(ParticleStatistics statistics) noexcept {
  switch (statistics) {
    case ParticleStatistics::boson: return "boson";
    case ParticleStatistics::fermion: return "fermion";
    case ParticleStatistics::distinguishable: return "distinguishable";
  }
  return "unknown";
}

ParticleStatistics parse_statistics(std::string_view text) {
  if (text == "boson" || text == "B") return ParticleStatistics::boson;
  if (text == "fermion" || text == "F") return ParticleStatistics::fermion;
  if (text == "distinguishable" || text == "D") return ParticleStatistics::distinguishable;
  throw ValidationError("unknown particle statistics '" + std::string(text) + "'");
}

Complex amplitude(const UnitaryMatrix& u, const Configuration& input,
                  const Configuration& output) {
  const ComplexMatrix sub = submatrix(u, input, output);
  const double norm = std::sqrt(factorial_product(input.occupations()) *
                                factorial_product(output.occupations()));
  return permanent_ryser(sub) / norm;
}

double transition_probability(const UnitaryMatrix& u, const Configuration& input,
                              const Configuration& output,
                              ParticleStatistics statistics) {
  switch (statistics) {
    case ParticleStatistics::boson:
      return std::norm(amplitude(u, input, output));
    case ParticleStatistics::fermion: {
      require_fermion_seed(input);
      const ComplexMatrix sub = submatrix(u, input, output);
      if (!is_collision_free(output)) return 0.0;
      return std::norm(determinant(sub));
    }
    case ParticleStatistics::distinguishable: {
      const ComplexMatrix sub = submatrix(u, input, output);
      const ComplexMatrix squared = sub.cwiseAbs2().cast<Complex>();
      return permanent_ryser(squared).real() / factorial_product(output.occupations());
    }
  }
  return 0.0;
}

double compensated_sum(std::span<const double> values) noexcept {
  double sum = 0.0, carry = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) carry += (sum - t) + v;
    else carry += (v - t) + sum;
    sum = t;
  }
  return sum + carry;
}

BSDistribution::BSDistribution(std::shared_ptr<const FockSpace> space,
                               Configuration seed, ParticleStatistics statistics,
                               std::vector<double> probabilities,
                               std::string unitary_tag, double support_mass)
    : space_(std::move(space)), seed_(std::move(seed)), statistics_(statistics),
      probabilities_(std::move(probabilities)), unitary_tag_(std::move(unitary_tag)),
      support_mass_(support_mass) {
  if (!space_) throw ValidationError("distribution needs a space");
  if (probabilities_.size() != space_->size())
    throw ValidationError("probability vector does not match the space size");
}

double fill_probabilities(const UnitaryMatrix& u, const FockSpace& space,
                          const Configuration& seed, ParticleStatistics statistics,
                          std::span<double> out, unsigned threads) {
  if (u.dimension() != space.modes())
    throw ValidationError("unitary dimension " + std::to_string(u.dimension()) +
                          " does not match M=" + std::to_string(space.modes()));
  seed.validate(space.modes(), space.photons());
  if (statistics == ParticleStatistics::fermion) require_fermion_seed(seed);
  if (out.size() != space.size())
    throw ValidationError("output buffer does not match the space size");

  const SeedKernel kernel(u, seed, statistics);
  const std::size_t chunks = (space.size() + kChunk - 1) / kChunk;
  parallel_for(chunks, threads, [&](std::size_t chunk) {
    auto scratch = kernel.make_scratch();
    const std::size_t end = std::min(space.size(), (chunk + 1) * kChunk);
    for (std::size_t i = chunk * kChunk; i < end; ++i)
      out[i] = kernel.probability(space.photon_modes(i), space.occupations(i), scratch);
  });
  return compensated_sum(out);
}

BSDistribution full_distribution(const UnitaryMatrix& u,
                                 std::shared_ptr<const FockSpace> space,
                                 const Configuration& seed,
                                 ParticleStatistics statistics,
                                 const DistributionOptions& options) {
  if (!space) throw ValidationError("full_distribution needs a space");
  std::vector<double> probabilities(space->size());
  double mass = fill_probabilities(u, *space, seed, statistics, probabilities,
                                   options.threads);
  if (space->outcome_set() == OutcomeSet::collision_free) {
    if (mass <= 0.0) throw ValidationError("no probability mass on collision-free outcomes");
    for (double& p : probabilities) p /= mass;
  } else {
    mass = 1.0;
  }
  return BSDistribution(std::move(space), seed, statistics, std::move(probabilities),
                        u.tag(), mass);
}

MaxOutcome max_outcome(const BSDistribution& distribution) {
  const auto probs = distribution.probabilities();
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return {best, distribution.space().configuration(best), probs[best]};
}

std::string distribution_csv(const BSDistribution& distribution) {
  const FockSpace& space = distribution.space();
  std::ostringstream out;
  out << "# schema_version: 1\n"
      << "# M: " << space.modes() << '\n'
      << "# N: " << space.photons() << '\n'
      << "# statistics: " << to_string(distribution.statistics()) << '\n'
      << "# unitary_tag: " << distribution.unitary_tag() << '\n'
      << "# seed: " << distribution.seed().to_string() << '\n'
      << "# outcome_set: "
      << (space.outcome_set() == OutcomeSet::full ? "full" : "collision_free") << '\n';
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", distribution.support_mass());
  out << "# support_mass: " << buffer << '\n';
  out << "index,integer_code,occupancy,probability\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    std::snprintf(buffer, sizeof buffer, "%.17g", distribution.probability(i));
    out << i << ',' << space.code(i) << ",\"" << space.configuration(i).to_string()
        << "\"," << buffer << '\n';
  }
  return out.str();
}

}  // namespace bsdp
