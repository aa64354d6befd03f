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

#include <cmath>
#include <vector>

#include <json.hpp>

#include "bsdp/errors.hpp"
#include "bsdp/experiments.hpp"

namespace bsdp {
namespace {

ExperimentConfig small_sweep_config(std::uint64_t seed, unsigned threads = 1) {
  ExperimentConfig c = default_config("bin_fraction", true, seed);
  c.grid = {{8, 2}, {7, 3}};
  c.unitary_count = 4;
  c.threads = threads;
  return c;
}

const ReportCell* find_cell(const ExperimentReport& r, double d, double m = -1) {
  for (const auto& cell : r.cells) {
    const auto it = cell.params.find("d");
    if (it == cell.params.end() || it->second != d) continue;
    if (m >= 0 && cell.params.at("M") != m) continue;
    return &cell;
  }
  return nullptr;
}

TEST(ExperimentConfig, DefaultsExistForEveryId) {
  for (const auto& id : experiment_ids()) {
    const auto quick = default_config(id, true, 1);
    const auto full = default_config(id, false, 1);
    EXPECT_EQ(quick.id, id);
    EXPECT_NO_THROW(quick.validate()) << id;
    EXPECT_NO_THROW(full.validate()) << id;
    EXPECT_LE(quick.unitary_count, full.unitary_count);
  }
  EXPECT_EQ(default_config("gap", false, 1).unitary_count, 100u);
  EXPECT_THROW(default_config("nope", true, 1), ValidationError);
}

TEST(ExperimentConfig, JsonRoundTrip) {
  for (const auto& id : experiment_ids()) {
    auto c = default_config(id, true, 77);
    c.output_dir = "out";
    c.threads = 3;
    const auto back = ExperimentConfig::from_json(c.to_json());
    EXPECT_EQ(back.to_json(), c.to_json()) << id;
  }
}

TEST(ExperimentConfig, PartialJsonUsesDefaults) {
  const auto c = ExperimentConfig::from_json(R"({"id": "gap", "master_seed": 5, "unitary_count": 3})");
  EXPECT_EQ(c.unitary_count, 3u);
  EXPECT_EQ(c.master_seed, 5u);
  EXPECT_EQ(c.epsilons.size(), 10u);
  EXPECT_EQ(c.grid, (std::vector<GridPoint>{{18, 4}}));
  EXPECT_THROW(ExperimentConfig::from_json(R"({"id": "nope"})"), ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json("not json"), ValidationError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"id": "gap", "outcome_set": "odd"})"),
               ValidationError);
}

TEST(ExperimentConfig, Validation) {
  auto c = small_sweep_config(1);
  c.unitary_count = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c = small_sweep_config(1);
  c.grid = {{60, 8}};
  EXPECT_THROW(c.validate(), CapacityError);
  c = small_sweep_config(1);
  c.bins = {1};
  EXPECT_THROW(c.validate(), ValidationError);
  c = default_config("ryser", true, 1);
  c.permanent_sizes = {40};
  EXPECT_THROW(c.validate(), CapacityError);
}

TEST(SeedScan, IdentityTraceFollowsSeedIndex) {
  auto c = default_config("seed_scan", true, 3);
  c.identity_unitary = true;
  const auto report = run_mpb_seed_scan(c);
  ASSERT_EQ(report.cells.size(), 4u);
  for (const auto& cell : report.cells) {
    const auto d = static_cast<unsigned>(cell.params.at("d"));
    const auto& labels = cell.series.at("label");
    const auto partition = make_partition(labels.size(), d);
    for (std::size_t s = 0; s < labels.size(); ++s)
      ASSERT_EQ(labels[s], partition.bin_of(s));
    EXPECT_EQ(cell.values.at("bound_violations"), 0.0);
  }
}

TEST(SeedScan, HaarTraceIsStepLike) {
  const auto report = run_mpb_seed_scan(default_config("seed_scan", true, 1));
  for (const auto& cell : report.cells) {
    EXPECT_GE(cell.values.at("transitions_first_50"), 2.0);
    EXPECT_EQ(cell.values.at("bound_violations"), 0.0);
    EXPECT_GT(cell.values.at("min_p0_excess"), 0.0);
    for (double p : cell.series.at("p0")) ASSERT_GT(p, 1.0 / cell.params.at("d"));
  }
}

TEST(SeedSweep, ThreadCountIndependent) {
  const auto a = run_seed_sweep(small_sweep_config(9, 1));
  const auto b = run_seed_sweep(small_sweep_config(9, 3));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t g = 0; g < a.size(); ++g) {
    EXPECT_EQ(a[g].labels, b[g].labels);
    EXPECT_EQ(a[g].p0, b[g].p0);
    EXPECT_EQ(a[g].gap, b[g].gap);
  }
}

TEST(SeedSweep, SubsampledSeeds) {
  auto c = small_sweep_config(9);
  c.seeds_per_unitary = 5;
  const auto sweeps = run_seed_sweep(c);
  EXPECT_EQ(sweeps[0].seed_count, 5u);
  EXPECT_EQ(sweeps[0].labels[0].size(), 5u * c.unitary_count);
}

TEST(BinFraction, ReportInvariants) {
  const auto c = small_sweep_config(4);
  const auto report = run_bin_fraction_experiment(c);
  EXPECT_EQ(report.cells.size(), c.grid.size() * c.bins.size());
  for (const auto& cell : report.cells) {
    EXPECT_EQ(cell.values.at("fraction_sum_error"), 0.0);
    EXPECT_EQ(cell.values.at("bound_violations"), 0.0);
    double total = 0.0;
    for (double f : cell.series.at("mean_fraction")) {
      EXPECT_GE(f, 0.0);
      EXPECT_LE(f, 1.0);
      total += f;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    for (double s : cell.series.at("std_fraction")) EXPECT_GE(s, 0.0);
  }
}

// The spread across unitaries estimates a fixed population quantity; the
// uncertainty of the mean fraction is what grows when fewer unitaries are used.
TEST(BinFraction, FewerUnitariesWidenUncertainty) {
  auto few = default_config("bin_fraction", true, 11);
  few.grid = {{10, 2}, {9, 3}};
  few.unitary_count = 10;
  auto many = few;
  many.unitary_count = 40;
  const auto a = run_bin_fraction_experiment(few);
  const auto b = run_bin_fraction_experiment(many);
  for (const auto& cell : a.cells) {
    const double d = cell.params.at("d");
    const auto* other = find_cell(b, d, cell.params.at("M"));
    ASSERT_NE(other, nullptr);
    EXPECT_GT(cell.values.at("mean_std_fraction") / std::sqrt(10.0),
              other->values.at("mean_std_fraction") / std::sqrt(40.0))
        << "M=" << cell.params.at("M") << " d=" << d;
  }
}

TEST(BinFraction, ReproducibleFromConfig) {
  const auto c = small_sweep_config(4);
  const auto a = run_bin_fraction_experiment(c);
  const auto again = ExperimentConfig::from_json(a.config.to_json());
  const auto b = run_bin_fraction_experiment(again);
  EXPECT_EQ(a.deterministic_json(), b.deterministic_json());
  const auto other = run_bin_fraction_experiment(small_sweep_config(5));
  EXPECT_NE(a.deterministic_json(), other.deterministic_json());
}

TEST(PmaxHistogram, ReportInvariants) {
  auto c = small_sweep_config(6);
  c.id = "pmax_histogram";
  const auto report = run_pmax_histogram(c);
  for (const auto& cell : report.cells) {
    EXPECT_NEAR(cell.values.at("histogram_integral"), 1.0, 1e-12);
    EXPECT_EQ(cell.values.at("mass_at_or_below_uniform"), 0.0);
    EXPECT_GT(cell.values.at("mean_p0_minus_uniform"), 0.0);
    EXPECT_GE(cell.values.at("std_p0"), 0.0);
    EXPECT_EQ(cell.series.at("mean_fraction").size(), 100u);
  }
}

TEST(Gap, MonotoneInEpsilon) {
  auto c = small_sweep_config(8);
  c.id = "gap";
  c.epsilons = {0.01, 0.02, 0.05, 0.1, 0.2};
  const auto report = run_gap_experiment(c);
  for (const auto& cell : report.cells) {
    EXPECT_EQ(cell.values.at("monotone_in_epsilon"), 1.0);
    const auto& means = cell.series.at("mean_fraction");
    for (std::size_t i = 1; i < means.size(); ++i) EXPECT_GE(means[i], means[i - 1]);
    for (double m : means) {
      EXPECT_GE(m, 0.0);
      EXPECT_LE(m, 1.0);
    }
  }
}

TEST(Collision, ReportShape) {
  auto c = default_config("collision", true, 11);
  c.grid = {{9, 3}};
  c.bins = {2, 4};
  c.unitary_count = 3;
  const auto report = run_collision_experiment(c);
  // 2 statistics x 2 bin counts, plus one summary per pair.
  EXPECT_EQ(report.cells.size(), 8u);
  for (const auto& cell : report.cells) {
    if (!cell.values.count("p_col_mean")) continue;
    EXPECT_GE(cell.values.at("p_col_mean"), 0.0);
    EXPECT_LE(cell.values.at("p_col_mean"), 1.0);
    EXPECT_GE(cell.values.at("p_col_std"), 0.0);
    EXPECT_EQ(cell.values.at("seed_count"), 84.0);
  }
}

TEST(MaxProb, SmallGridFit) {
  auto c = default_config("maxprob", true, 3);
  c.grid = {{4, 2}, {8, 2}, {12, 2}, {9, 3}};
  c.unitary_count = 3;
  c.seeds_per_unitary = 3;
  const auto report = run_maxprob_scaling(c);
  ASSERT_EQ(report.cells.size(), 5u);
  const auto& fit = report.cells.back().values;
  EXPECT_LT(fit.at("exponent"), 0.0);
  EXPECT_GT(fit.at("prefactor"), 0.0);
  for (std::size_t i = 0; i + 1 < report.cells.size(); ++i) {
    const double p = report.cells[i].values.at("max_probability_mean");
    EXPECT_GT(p, 1.0 / report.cells[i].params.at("space_size"));
    EXPECT_LE(p, 1.0);
  }
}

TEST(Ryser, ReportHasTimingAndCounts) {
  auto c = default_config("ryser", true, 1);
  c.permanent_sizes = {6, 7, 8, 9};
  c.timing_grid = {{6, 2}, {9, 3}};
  c.repetitions = 1;
  const auto report = run_ryser_benchmark(c);
  bool saw_grid = false;
  for (const auto& cell : report.cells) {
    if (!cell.params.count("M")) continue;
    saw_grid = true;
    const double n = cell.params.at("N");
    EXPECT_EQ(cell.values.at("operations"),
              cell.values.at("configurations") * n * std::exp2(n));
    EXPECT_GE(cell.values.at("time_ms"), 0.0);
    EXPECT_GT(cell.values.at("collision_free_mass"), 0.0);
  }
  EXPECT_TRUE(saw_grid);
  const auto stripped = nlohmann::json::parse(report.deterministic_json());
  for (const auto& cell : stripped["cells"]) {
    EXPECT_FALSE(cell["values"].contains("time_ms"));
    EXPECT_FALSE(cell["values"].contains("median_seconds"));
  }
}

TEST(RunExperiment, RejectsUnknownId) {
  ExperimentConfig c = small_sweep_config(1);
  c.id = "nope";
  EXPECT_THROW(run_experiment(c), ValidationError);
}

TEST(Report, JsonEnvelopeAndCsv) {
  auto c = default_config("seed_scan", true, 3);
  c.bins = {2};
  const auto report = run_experiment(c);
  const auto doc = nlohmann::json::parse(report.to_json());
  EXPECT_EQ(doc["id"], "seed_scan");
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["config"]["master_seed"], 3);
  EXPECT_TRUE(doc.contains("started_at"));
  EXPECT_EQ(doc["cells"].size(), 1u);
  const auto csv = report.to_csv();
  EXPECT_EQ(csv.rfind("# schema_version: 1\n", 0), 0u);
  EXPECT_NE(csv.find("cell,M,N,d,quantity,index,value\n"), std::string::npos);
  EXPECT_NE(csv.find("0,15,3,2,bound_violations,,0\n"), std::string::npos);
}

TEST(FitPowerLaw, RecoversExactLaw) {
  std::vector<double> x, y;
  for (double s : {10.0, 50.0, 300.0, 2000.0, 6000.0}) {
    x.push_back(s);
    y.push_back(1.52 * std::pow(s, -0.7));
  }
  const auto fit = fit_power_law(x, y);
  EXPECT_NEAR(fit.exponent, -0.7, 1e-12);
  EXPECT_NEAR(fit.prefactor, 1.52, 1e-12);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  const std::vector<double> one{1.0};
  EXPECT_THROW(fit_power_law(one, one), ValidationError);
}

TEST(FitRyserLaw, RecoversSyntheticParameters) {
  std::vector<double> n, t;
  for (double k = 10; k <= 20; ++k) {
    n.push_back(k);
    t.push_back(3e-9 * k * std::exp2(1.05 * k) + 2e-4);
  }
  const auto fit = fit_ryser_law(n, t);
  EXPECT_NEAR(fit.b, 1.05, 1e-6);
  EXPECT_NEAR(fit.a, 3e-9, 1e-13);
  EXPECT_NEAR(fit.c, 2e-4, 1e-9);
}

TEST(CountTransitions, Values) {
  const std::vector<double> labels{0, 0, 1, 1, 0, 2, 2};
  EXPECT_EQ(count_transitions(labels), 3u);
  EXPECT_EQ(count_transitions(std::span<const double>()), 0u);
}

}  // namespace
}  // namespace bsdp
