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

#include "bsdp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <json.hpp>

#include "bsdp/errors.hpp"

namespace bsdp {

double SamplePlan::prelog_factor() const noexcept {
  const double margin = epsilon - delta;
  return 3.0 * d / (margin * margin);
}

double SamplePlan::log_factor() const noexcept {
  return std::log(2.0 * (1.0 - gamma) / (eta - gamma));
}

SamplePlan chernoff_sample_size(unsigned d, double epsilon, double delta, double eta,
                                double gamma) {
  if (d < 2) throw ValidationError("the sample plan needs d >= 2 bins");
  if (!(delta >= 0.0 && delta < epsilon && epsilon < 1.0))
    throw ValidationError("budget requires 0 <= delta < epsilon < 1");
  if (!(gamma >= 0.0 && gamma < eta && eta < 1.0))
    throw ValidationError("budget requires 0 <= gamma < eta < 1");
  SamplePlan plan{d, epsilon, delta, eta, gamma, 0};
  // Evaluated in extended precision so the ceiling is stable near integers.
  const long double margin = static_cast<long double>(epsilon) - delta;
  const long double value = 3.0L * d / (margin * margin) *
                            std::log(2.0L * (1.0L - gamma) /
                                     (static_cast<long double>(eta) - gamma));
  if (!(value < static_cast<long double>(std::numeric_limits<std::uint64_t>::max())))
    throw CapacityError("sample size overflows 64 bits");
  plan.n_min = static_cast<std::uint64_t>(std::ceil(value));
  return plan;
}

OutcomeSampler::OutcomeSampler(std::span<const double> probabilities,
                               SamplerMethod method)
    : method_(method), size_(probabilities.size()) {
  if (probabilities.empty()) throw ValidationError("cannot sample an empty distribution");
  for (double p : probabilities)
    if (!(p >= 0.0) || !std::isfinite(p))
      throw ValidationError("probabilities must be finite and non-negative");
  if (method_ == SamplerMethod::automatic)
    method_ = size_ <= kAliasThreshold ? SamplerMethod::cumulative : SamplerMethod::alias;
  if (size_ > std::numeric_limits<std::uint32_t>::max())
    throw CapacityError("too many outcomes for the sampler");

  const double total = compensated_sum(probabilities);
  if (!(total > 0.0)) throw ValidationError("distribution has zero mass");

  if (method_ == SamplerMethod::cumulative) {
    cumulative_.resize(size_);
    double running = 0.0;
    for (std::size_t i = 0; i < size_; ++i) {
      running += probabilities[i] / total;
      cumulative_[i] = running;
    }
    // Outcomes after the last positive entry must never be selected.
    std::size_t last = size_;
    while (last > 0 && probabilities[last - 1] == 0.0) --last;
    for (std::size_t i = last - 1; i < size_; ++i) cumulative_[i] = 1.0;
    return;
  }

  // Vose's alias method.
  alias_probability_.assign(size_, 0.0);
  alias_.assign(size_, 0);
  std::vector<double> scaled(size_);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < size_; ++i) {
    scaled[i] = probabilities[i] / total * static_cast<double>(size_);
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    alias_probability_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto l : large) {
    alias_probability_[l] = 1.0;
    alias_[l] = l;
  }
  // Leftovers from rounding: keep them only if they carry mass.
  for (auto s : small) {
    alias_probability_[s] = 1.0;
    alias_[s] = s;
    if (probabilities[s] == 0.0) {
      const auto target = std::max_element(probabilities.begin(), probabilities.end());
      alias_[s] = static_cast<std::uint32_t>(target - probabilities.begin());
      alias_probability_[s] = 0.0;
    }
  }
}

std::size_t OutcomeSampler::operator()(Rng& rng) const {
  if (method_ == SamplerMethod::cumulative) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative_.begin()),
                                 size_ - 1);
  }
  const auto column = static_cast<std::size_t>(rng.uniform_below(size_));
  return rng.uniform() < alias_probability_[column] ? column : alias_[column];
}

std::vector<std::uint64_t> draw_outcomes(std::span<const double> probabilities,
                                         std::uint64_t runs, Rng& rng,
                                         SamplerMethod method) {
  if (runs < 1) throw ValidationError("runs must be at least 1");
  const OutcomeSampler sampler(probabilities, method);
  std::vector<std::uint64_t> counts(probabilities.size(), 0);
  for (std::uint64_t k = 0; k < runs; ++k) ++counts[sampler(rng)];
  return counts;
}

std::vector<std::uint64_t> draw_outcomes(const BSDistribution& distribution,
                                         std::uint64_t runs, Rng& rng,
                                         SamplerMethod method) {
  return draw_outcomes(distribution.probabilities(), runs, rng, method);
}

std::vector<double> EmpiricalBinned::frequencies() const {
  std::vector<double> freq(counts.size(), 0.0);
  if (runs == 0) return freq;
  for (std::size_t j = 0; j < counts.size(); ++j)
    freq[j] = static_cast<double>(counts[j]) / static_cast<double>(runs);
  return freq;
}

EmpiricalBinned empirical_binned(std::span<const std::uint64_t> outcome_counts,
                                 const BinPartition& partition) {
  if (outcome_counts.size() != partition.space_size())
    throw ValidationError("outcome counts do not match the partition size");
  EmpiricalBinned result{partition, std::vector<std::uint64_t>(partition.bins(), 0), 0};
  for (unsigned j = 0; j < partition.bins(); ++j) {
    std::uint64_t sum = 0;
    for (std::uint64_t i = partition.offset(j); i < partition.offset(j + 1); ++i)
      sum += outcome_counts[i];
    result.counts[j] = sum;
    result.runs += sum;
  }
  return result;
}

MpbEstimate estimate_mpb(const BSDistribution& distribution, const BinPartition& partition,
                         const SamplePlan& plan, Rng& rng) {
  if (plan.n_min == 0) throw ValidationError("sample plan has no runs; compute it first");
  if (plan.d != partition.bins())
    throw ValidationError("sample plan and partition disagree on d");
  MpbEstimate estimate{{}, {partition, {}, 0}, rng.tag()};
  const auto counts = draw_outcomes(distribution, plan.n_min, rng);
  estimate.empirical = empirical_binned(counts, partition);
  const auto freq = estimate.empirical.frequencies();
  estimate.result = most_probable_bin(freq, plan.epsilon - plan.delta);
  return estimate;
}

UnitaryMatrix perturb_unitary(const UnitaryMatrix& u, double strength, Rng& rng) {
  if (strength < 0.0) throw ValidationError("perturbation strength must be >= 0");
  const auto m = static_cast<Eigen::Index>(u.dimension());
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  const Eigen::MatrixXcd h = (g + g.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eigen(h);
  const Eigen::VectorXd& values = eigen.eigenvalues();
  const double scale = std::max(std::abs(values.minCoeff()), std::abs(values.maxCoeff()));
  Eigen::VectorXcd phases(m);
  for (Eigen::Index k = 0; k < m; ++k)
    phases(k) = std::polar(1.0, scale > 0.0 ? strength * values(k) / scale : 0.0);
  const Eigen::MatrixXcd& v = eigen.eigenvectors();
  const Eigen::MatrixXcd rotation = v * phases.asDiagonal() * v.adjoint();
  const ComplexMatrix perturbed = u.matrix() * rotation;
  return UnitaryMatrix(perturbed, std::nullopt,
                       u.tag() + "+noise(" + std::to_string(strength) + ")");
}

std::string to_json(const SamplePlan& plan) {
  nlohmann::json doc;
  doc["schema_version"] = 1;
  doc["d"] = plan.d;
  doc["epsilon"] = plan.epsilon;
  doc["delta"] = plan.delta;
  doc["eta"] = plan.eta;
  doc["gamma"] = plan.gamma;
  doc["n_min"] = plan.n_min;
  doc["prelog_factor"] = plan.prelog_factor();
  doc["log_factor"] = plan.log_factor();
  return doc.dump(2);
}

std::string to_json(const MpbEstimate& estimate, const SamplePlan& plan) {
  nlohmann::json doc = nlohmann::json::parse(to_json(plan));
  doc["label"] = estimate.result.label;
  doc["p0"] = estimate.result.p0;
  doc["p1"] = estimate.result.p1;
  doc["gap"] = estimate.result.gap;
  doc["tie_flag"] = estimate.result.tie;
  doc["runs"] = estimate.empirical.runs;
  doc["counts"] = estimate.empirical.counts;
  doc["rng"] = estimate.rng_tag;
  return doc.dump(2);
}

}  // namespace bsdp
