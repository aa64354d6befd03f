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

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bsdp/distribution.hpp"
#include "bsdp/fock.hpp"
#include "bsdp/problems.hpp"

namespace bsdp {

struct GridPoint {
  unsigned modes = 0;
  unsigned photons = 0;

  friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Knobs shared by every experiment; each runner reads the fields it needs.
struct ExperimentConfig {
  std::string id;
  std::vector<GridPoint> grid;
  std::vector<unsigned> bins;
  unsigned unitary_count = 100;
  std::uint64_t master_seed = 0;
  std::string output_dir;

  double dp = 0.01;                    // histogram width
  std::vector<double> epsilons;        // gap thresholds
  unsigned seeds_per_unitary = 0;      // 0 means every seed
  bool identity_unitary = false;       // seed scan only
  OutcomeSet outcome_set = OutcomeSet::full;
  SeedPopulation seed_population = SeedPopulation::collision_free;
  std::vector<ParticleStatistics> compare_with;  // collision experiment

  std::vector<unsigned> permanent_sizes;  // single-permanent timing
  std::vector<GridPoint> timing_grid;     // full-distribution timing
  unsigned repetitions = 5;
  unsigned threads = 1;

  /// Throws ValidationError on empty grids, zero unitaries or grid points
  /// above the enumeration capacity.
  void validate() const;

  [[nodiscard]] std::string to_json() const;
  static ExperimentConfig from_json(std::string_view text);
};

/// Identifiers accepted by run_experiment().
std::vector<std::string> experiment_ids();

/// Default configuration for `id`; `quick` trims unitary counts and grids
/// to CI scale.
ExperimentConfig default_config(std::string_view id, bool quick, std::uint64_t master_seed);

struct ReportCell {
  std::map<std::string, double> params;
  std::map<std::string, double> values;
  std::map<std::string, std::vector<double>> series;
};

struct ExperimentReport {
  std::string id;
  ExperimentConfig config;
  std::string started_at;
  double elapsed_seconds = 0.0;
  std::vector<ReportCell> cells;

  /// {id, config, started_at, elapsed_seconds, cells: [...]}.
  [[nodiscard]] std::string to_json() const;
  /// Long format: one row per scalar value or series element.
  [[nodiscard]] std::string to_csv() const;
  /// The report without timing fields, for reproducibility comparisons.
  [[nodiscard]] std::string deterministic_json() const;
};

/// Exact most-probable-bin data for every (unitary, seed) of one grid point.
struct SeedSweep {
  GridPoint point;
  std::vector<unsigned> bins;
  unsigned unitary_count = 0;
  std::size_t seed_count = 0;
  /// Indexed [b][k * seed_count + s] for bin count b, unitary k, seed s.
  std::vector<std::vector<std::uint8_t>> labels;
  std::vector<std::vector<double>> p0;
  std::vector<std::vector<double>> gap;
};

/// Every seed of S(M, N) under unitary_count Haar unitaries; each outcome
/// distribution is computed once and binned for every d.
std::vector<SeedSweep> run_seed_sweep(const ExperimentConfig& config);

ExperimentReport bin_fraction_report(const ExperimentConfig& config,
                                     const std::vector<SeedSweep>& sweeps);
ExperimentReport pmax_histogram_report(const ExperimentConfig& config,
                                       const std::vector<SeedSweep>& sweeps);
ExperimentReport gap_report(const ExperimentConfig& config,
                            const std::vector<SeedSweep>& sweeps);

ExperimentReport run_mpb_seed_scan(const ExperimentConfig& config);
ExperimentReport run_bin_fraction_experiment(const ExperimentConfig& config);
ExperimentReport run_pmax_histogram(const ExperimentConfig& config);
ExperimentReport run_collision_experiment(const ExperimentConfig& config);
ExperimentReport run_gap_experiment(const ExperimentConfig& config);
ExperimentReport run_maxprob_scaling(const ExperimentConfig& config);
ExperimentReport run_ryser_benchmark(const ExperimentConfig& config);

/// Dispatches on config.id; unknown ids raise ValidationError.
ExperimentReport run_experiment(const ExperimentConfig& config);

struct PowerLawFit {
  double prefactor = 0.0;  // a in a * x^b
  double exponent = 0.0;   // b
  double r_squared = 0.0;
};

/// Least squares on (log x, log y).
PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y);

struct ExponentialFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double residual = 0.0;  // sum of squared residuals
};

/// Fits t = a * n * 2^(b n) + c. For each trial b the optimal (a, c) follow
/// from linear least squares; b is located by a coarse scan refined with a
/// golden-section search on [b_min, b_max].
ExponentialFit fit_ryser_law(std::span<const double> n, std::span<const double> t,
                             double b_min = 0.1, double b_max = 8.0);

/// Number of positions i where labels[i] != labels[i - 1].
std::size_t count_transitions(std::span<const double> labels);

}  // namespace bsdp
