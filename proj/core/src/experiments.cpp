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

#include "bsdp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "bsdp/binning.hpp"
#include "bsdp/errors.hpp"
#include "bsdp/io.hpp"
#include "bsdp/linalg.hpp"
#include "bsdp/parallel.hpp"

namespace bsdp {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t kMaxGridSpace = std::size_t{1} << 22;

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;
};

// Sample standard deviation; zero for fewer than two values.
MeanStd mean_std(std::span<const double> values) {
  MeanStd r;
  if (values.empty()) return r;
  r.mean = compensated_sum(values) / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - r.mean) * (v - r.mean);
    r.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return r;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 ? values[mid] : 0.5 * (values[mid - 1] + values[mid]);
}

std::string outcome_set_name(OutcomeSet set) {
  return set == OutcomeSet::full ? "full" : "collision_free";
}

OutcomeSet parse_outcome_set(const std::string& text) {
  if (text == "full") return OutcomeSet::full;
  if (text == "collision_free") return OutcomeSet::collision_free;
  throw ValidationError("unknown outcome set '" + text + "'");
}

double statistics_code(ParticleStatistics s) {
  return static_cast<double>(static_cast<int>(s));
}

std::uint64_t grid_space_size(const GridPoint& p, OutcomeSet set) {
  return set == OutcomeSet::full ? space_size(p.modes, p.photons)
                                 : binomial(p.modes, p.photons).convert_to<std::uint64_t>();
}

ExperimentReport start_report(const ExperimentConfig& config, std::string id) {
  ExperimentReport report;
  report.id = std::move(id);
  report.config = config;
  report.started_at = utc_timestamp();
  return report;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ComplexMatrix ginibre(std::size_t n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  ComplexMatrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      a(i, j) = Complex(re, im);
    }
  return a;
}

// Least squares for t ~ a * g + c with g = n 2^(b n); returns the residual.
double linear_fit_for_exponent(std::span<const double> n, std::span<const double> t, double b,
                               double& a, double& c) {
  const double k = static_cast<double>(n.size());
  double sg = 0, st = 0, sgg = 0, sgt = 0;
  std::vector<double> g(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    g[i] = n[i] * std::exp2(b * n[i]);
    sg += g[i];
    st += t[i];
    sgg += g[i] * g[i];
    sgt += g[i] * t[i];
  }
  const double det = k * sgg - sg * sg;
  if (std::abs(det) < 1e-300 * std::max(1.0, sgg)) {
    a = 0.0;
    c = st / k;
  } else {
    a = (k * sgt - sg * st) / det;
    c = (st - a * sg) / k;
  }
  double residual = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double e = t[i] - (a * g[i] + c);
    residual += e * e;
  }
  return residual;
}

Configuration first_modes_seed(unsigned modes, unsigned photons) {
  std::vector<std::uint8_t> occ(modes, 0);
  for (unsigned j = 0; j < photons; ++j) occ[j] = 1;
  return Configuration(std::move(occ));
}

json cell_json(const ReportCell& cell) {
  json j;
  j["params"] = cell.params;
  j["values"] = cell.values;
  j["series"] = cell.series;
  return j;
}

std::string format_double(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (unitary_count < 1) throw ValidationError("unitary_count must be at least 1");
  for (const auto& p : grid) {
    if (p.photons < 1 || p.modes < 1)
      throw ValidationError("grid points need M >= 1 and N >= 1");
    if (outcome_set == OutcomeSet::collision_free && p.modes < p.photons)
      throw ValidationError("collision-free grid points need M >= N");
    const auto size = grid_space_size(p, outcome_set);
    if (size > kMaxGridSpace)
      throw CapacityError("grid point M=" + std::to_string(p.modes) + ", N=" +
                          std::to_string(p.photons) + " has " + std::to_string(size) +
                          " outcomes, above the experiment capacity");
    for (unsigned d : bins)
      if (d < 2 || d > size)
        throw ValidationError("d=" + std::to_string(d) + " does not fit a space of size " +
                              std::to_string(size));
  }
  for (double e : epsilons)
    if (!(e >= 0.0 && e < 1.0)) throw ValidationError("epsilon values must lie in [0, 1)");
  if (!(dp > 0.0 && dp <= 1.0)) throw ValidationError("dp must lie in (0, 1]");
  for (unsigned n : permanent_sizes)
    if (n < 1 || n > kMaxPermanentDimension)
      throw CapacityError("permanent size " + std::to_string(n) + " outside 1.." +
                          std::to_string(kMaxPermanentDimension));
  for (const auto& p : timing_grid)
    if (p.modes < p.photons || binomial(p.modes, p.photons) > kMaxGridSpace)
      throw CapacityError("timing grid point outside capacity");
}

std::string ExperimentConfig::to_json() const {
  json doc;
  doc["schema_version"] = 1;
  doc["id"] = id;
  auto& g = doc["grid"] = json::array();
  for (const auto& p : grid) g.push_back({{"M", p.modes}, {"N", p.photons}});
  doc["bins"] = bins;
  doc["unitary_count"] = unitary_count;
  doc["master_seed"] = master_seed;
  doc["output_dir"] = output_dir;
  doc["dp"] = dp;
  doc["epsilons"] = epsilons;
  doc["seeds_per_unitary"] = seeds_per_unitary;
  doc["identity_unitary"] = identity_unitary;
  doc["outcome_set"] = outcome_set_name(outcome_set);
  doc["seed_population"] =
      seed_population == SeedPopulation::collision_free ? "collision_free" : "full";
  auto& c = doc["compare_with"] = json::array();
  for (auto s : compare_with) c.push_back(std::string(bsdp::to_string(s)));
  doc["permanent_sizes"] = permanent_sizes;
  auto& t = doc["timing_grid"] = json::array();
  for (const auto& p : timing_grid) t.push_back({{"M", p.modes}, {"N", p.photons}});
  doc["repetitions"] = repetitions;
  doc["threads"] = threads;
  return doc.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(std::string_view text) {
  ExperimentConfig c;
  try {
    const json doc = json::parse(text);
    c.id = doc.value("id", std::string());
    if (!c.id.empty()) {
      // Unspecified fields fall back to the full-scale defaults of the experiment.
      const auto known = experiment_ids();
      if (std::find(known.begin(), known.end(), c.id) == known.end())
        throw ValidationError("unknown experiment id '" + c.id + "'");
      c = default_config(c.id, false, doc.value("master_seed", std::uint64_t{0}));
    }
    auto points = [](const json& array) {
      std::vector<GridPoint> out;
      for (const auto& p : array) out.push_back({p.at("M").get<unsigned>(), p.at("N").get<unsigned>()});
      return out;
    };
    if (doc.contains("grid")) c.grid = points(doc["grid"]);
    if (doc.contains("bins")) c.bins = doc["bins"].get<std::vector<unsigned>>();
    c.unitary_count = doc.value("unitary_count", c.unitary_count);
    c.master_seed = doc.value("master_seed", c.master_seed);
    c.output_dir = doc.value("output_dir", c.output_dir);
    c.dp = doc.value("dp", c.dp);
    if (doc.contains("epsilons")) c.epsilons = doc["epsilons"].get<std::vector<double>>();
    c.seeds_per_unitary = doc.value("seeds_per_unitary", c.seeds_per_unitary);
    c.identity_unitary = doc.value("identity_unitary", c.identity_unitary);
    if (doc.contains("outcome_set"))
      c.outcome_set = parse_outcome_set(doc["outcome_set"].get<std::string>());
    if (doc.contains("seed_population")) {
      const auto p = doc["seed_population"].get<std::string>();
      if (p == "collision_free") c.seed_population = SeedPopulation::collision_free;
      else if (p == "full") c.seed_population = SeedPopulation::full;
      else throw ValidationError("unknown seed population '" + p + "'");
    }
    if (doc.contains("compare_with")) {
      c.compare_with.clear();
      for (const auto& s : doc["compare_with"])
        c.compare_with.push_back(parse_statistics(s.get<std::string>()));
    }
    if (doc.contains("permanent_sizes"))
      c.permanent_sizes = doc["permanent_sizes"].get<std::vector<unsigned>>();
    if (doc.contains("timing_grid")) c.timing_grid = points(doc["timing_grid"]);
    c.repetitions = doc.value("repetitions", c.repetitions);
    c.threads = doc.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed experiment config: ") + e.what());
  }
  return c;
}

std::vector<std::string> experiment_ids() {
  return {"seed_scan", "bin_fraction", "pmax_histogram", "collision",
          "gap",       "maxprob",      "ryser"};
}

ExperimentConfig default_config(std::string_view id, bool quick, std::uint64_t master_seed) {
  ExperimentConfig c;
  c.id = std::string(id);
  c.master_seed = master_seed;
  c.unitary_count = quick ? 20 : 100;
  if (id == "seed_scan") {
    c.grid = {{15, 3}};
    c.bins = {2, 3, 4, 5};
    c.unitary_count = 1;
  } else if (id == "bin_fraction") {
    c.grid = {{18, 2}, {18, 3}, {18, 4}};
    c.bins = {2, 3, 4, 5};
  } else if (id == "pmax_histogram") {
    c.grid = {{18, 4}};
    c.bins = {2, 3, 4, 5};
    c.dp = 0.01;
  } else if (id == "gap") {
    c.grid = {{18, 4}};
    c.bins = {2, 3, 4, 5};
    c.epsilons = {0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.10};
  } else if (id == "collision") {
    c.grid = {{16, 2}, {24, 2}, {18, 3}, {24, 3}, {16, 4}, {18, 4}};
    c.bins = {2, 4, 8, 16};
    c.outcome_set = OutcomeSet::collision_free;
    c.compare_with = {ParticleStatistics::distinguishable, ParticleStatistics::fermion};
  } else if (id == "maxprob") {
    c.grid = {{4, 2},  {5, 2},  {8, 2},  {12, 2}, {20, 2}, {32, 2}, {50, 2},
              {9, 3},  {12, 3}, {16, 3}, {24, 3}, {30, 3}, {16, 4}, {18, 4}};
    c.unitary_count = quick ? 10 : 20;
    c.seeds_per_unitary = quick ? 10 : 20;
  } else if (id == "ryser") {
    c.permanent_sizes = {14, 15, 16, 17, 18, 19, 20};
    c.timing_grid = {{4, 2}, {8, 2}, {16, 2}, {9, 3}, {18, 3}, {24, 3}, {16, 4}, {20, 4}, {25, 5}};
    if (!quick) c.timing_grid.push_back({30, 6});
    c.repetitions = quick ? 7 : 15;
    c.unitary_count = 1;
  } else {
    throw ValidationError("unknown experiment id '" + std::string(id) + "'");
  }
  return c;
}

std::string ExperimentReport::to_json() const {
  json doc;
  doc["schema_version"] = 1;
  doc["id"] = id;
  doc["config"] = json::parse(config.to_json());
  doc["started_at"] = started_at;
  doc["elapsed_seconds"] = elapsed_seconds;
  auto& list = doc["cells"] = json::array();
  for (const auto& cell : cells) list.push_back(cell_json(cell));
  return doc.dump(2);
}

std::string ExperimentReport::deterministic_json() const {
  json doc;
  doc["id"] = id;
  doc["config"] = json::parse(config.to_json());
  auto& list = doc["cells"] = json::array();
  for (const auto& cell : cells) {
    json j = cell_json(cell);
    // Wall-clock measurements are the only non-reproducible quantities.
    for (const char* key : {"time_ms", "implied_flops", "median_seconds", "ratio"}) {
      j["values"].erase(key);
      j["series"].erase(key);
    }
    for (auto it = j["values"].begin(); it != j["values"].end();)
      it = it.key().rfind("fit_", 0) == 0 ? j["values"].erase(it) : std::next(it);
    list.push_back(j);
  }
  return doc.dump();
}

std::string ExperimentReport::to_csv() const {
  std::set<std::string> keys;
  for (const auto& cell : cells)
    for (const auto& [k, v] : cell.params) keys.insert(k);
  std::ostringstream out;
  out << "# schema_version: 1\n# experiment: " << id << "\n# master_seed: " << config.master_seed
      << '\n';
  out << "cell";
  for (const auto& k : keys) out << ',' << k;
  out << ",quantity,index,value\n";
  for (std::size_t c = 0; c < cells.size(); ++c) {
    std::string prefix = std::to_string(c);
    for (const auto& k : keys) {
      prefix += ',';
      const auto it = cells[c].params.find(k);
      if (it != cells[c].params.end()) prefix += format_double(it->second);
    }
    for (const auto& [name, v] : cells[c].values)
      out << prefix << ',' << name << ",," << format_double(v) << '\n';
    for (const auto& [name, series] : cells[c].series)
      for (std::size_t i = 0; i < series.size(); ++i)
        out << prefix << ',' << name << ',' << i << ',' << format_double(series[i]) << '\n';
  }
  return out.str();
}

std::vector<SeedSweep> run_seed_sweep(const ExperimentConfig& config) {
  config.validate();
  if (config.bins.empty()) throw ValidationError("the seed sweep needs at least one d");
  const Rng master(config.master_seed);
  std::vector<SeedSweep> sweeps;
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const GridPoint point = config.grid[g];
    const FockSpace outcomes(point.modes, point.photons, config.outcome_set);
    const FockSpace seeds(point.modes, point.photons, OutcomeSet::full);
    std::vector<BinPartition> partitions;
    for (unsigned d : config.bins) partitions.emplace_back(outcomes.size(), d);
    const std::size_t per_unitary = config.seeds_per_unitary == 0
                                        ? seeds.size()
                                        : std::min<std::size_t>(config.seeds_per_unitary,
                                                                seeds.size());
    SeedSweep sweep;
    sweep.point = point;
    sweep.bins = config.bins;
    sweep.unitary_count = config.unitary_count;
    sweep.seed_count = per_unitary;
    const std::size_t total = per_unitary * config.unitary_count;
    sweep.labels.assign(config.bins.size(), std::vector<std::uint8_t>(total));
    sweep.p0.assign(config.bins.size(), std::vector<double>(total));
    sweep.gap.assign(config.bins.size(), std::vector<double>(total));

    const Rng cell_rng = master.split(g);
    for (unsigned k = 0; k < config.unitary_count; ++k) {
      Rng rng = cell_rng.split(k);
      const UnitaryMatrix u = haar_unitary(point.modes, rng);
      std::vector<std::size_t> chosen(seeds.size());
      std::iota(chosen.begin(), chosen.end(), std::size_t{0});
      if (per_unitary < seeds.size()) {
        std::vector<Configuration> draw = draw_distinct_seeds(seeds, per_unitary, rng);
        chosen.clear();
        for (const auto& s : draw) chosen.push_back(*seeds.index_of(s));
      }
      parallel_for(per_unitary, config.threads, [&](std::size_t s) {
        const Configuration seed = seeds.configuration(chosen[s]);
        std::vector<double> outcome(outcomes.size());
        const double mass =
            fill_probabilities(u, outcomes, seed, ParticleStatistics::boson, outcome);
        std::vector<double> binned;
        for (std::size_t b = 0; b < config.bins.size(); ++b) {
          binned.assign(config.bins[b], 0.0);
          bin_sums(outcome, partitions[b], binned);
          if (config.outcome_set == OutcomeSet::collision_free)
            for (double& p : binned) p /= mass;
          const MPBResult r = most_probable_bin(binned);
          const std::size_t slot = k * per_unitary + s;
          sweep.labels[b][slot] = static_cast<std::uint8_t>(r.label);
          sweep.p0[b][slot] = r.p0;
          sweep.gap[b][slot] = r.gap;
        }
      });
    }
    sweeps.push_back(std::move(sweep));
  }
  return sweeps;
}

ExperimentReport bin_fraction_report(const ExperimentConfig& config,
                                     const std::vector<SeedSweep>& sweeps) {
  ExperimentReport report = start_report(config, "bin_fraction");
  for (const auto& sweep : sweeps) {
    for (std::size_t b = 0; b < sweep.bins.size(); ++b) {
      const unsigned d = sweep.bins[b];
      std::vector<std::vector<double>> fractions(d, std::vector<double>(sweep.unitary_count));
      std::size_t violations = 0;
      double min_excess = 1.0;
      double worst_sum_error = 0.0;
      for (unsigned k = 0; k < sweep.unitary_count; ++k) {
        std::vector<std::uint64_t> counts(d, 0);
        for (std::size_t s = 0; s < sweep.seed_count; ++s) {
          const std::size_t slot = k * sweep.seed_count + s;
          ++counts[sweep.labels[b][slot]];
          const double excess = sweep.p0[b][slot] - 1.0 / d;
          min_excess = std::min(min_excess, excess);
          if (!(excess > 0.0)) ++violations;
        }
        std::uint64_t total = 0;
        for (unsigned l = 0; l < d; ++l) {
          fractions[l][k] = static_cast<double>(counts[l]) / static_cast<double>(sweep.seed_count);
          total += counts[l];
        }
        worst_sum_error = std::max(worst_sum_error,
                                   std::abs(static_cast<double>(total) /
                                                static_cast<double>(sweep.seed_count) -
                                            1.0));
      }
      ReportCell cell;
      cell.params = {{"M", sweep.point.modes}, {"N", sweep.point.photons}, {"d", d}};
      auto& means = cell.series["mean_fraction"];
      auto& stds = cell.series["std_fraction"];
      double max_dev = 0.0;
      for (unsigned l = 0; l < d; ++l) {
        const MeanStd ms = mean_std(fractions[l]);
        means.push_back(ms.mean);
        stds.push_back(ms.stddev);
        max_dev = std::max(max_dev, std::abs(ms.mean - 1.0 / d));
      }
      cell.values["max_abs_deviation_from_uniform"] = max_dev;
      cell.values["mean_std_fraction"] = mean_std(stds).mean;
      cell.values["bound_violations"] = static_cast<double>(violations);
      cell.values["min_p0_excess"] = min_excess;
      cell.values["fraction_sum_error"] = worst_sum_error;
      cell.values["seeds"] = static_cast<double>(sweep.seed_count);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

ExperimentReport pmax_histogram_report(const ExperimentConfig& config,
                                       const std::vector<SeedSweep>& sweeps) {
  ExperimentReport report = start_report(config, "pmax_histogram");
  const auto n_hist = static_cast<std::size_t>(std::ceil(1.0 / config.dp - 1e-9));
  for (const auto& sweep : sweeps) {
    for (std::size_t b = 0; b < sweep.bins.size(); ++b) {
      const unsigned d = sweep.bins[b];
      std::vector<std::vector<double>> hist(n_hist, std::vector<double>(sweep.unitary_count, 0.0));
      std::size_t below = 0;
      for (unsigned k = 0; k < sweep.unitary_count; ++k) {
        std::vector<std::uint64_t> counts(n_hist, 0);
        for (std::size_t s = 0; s < sweep.seed_count; ++s) {
          const double p = sweep.p0[b][k * sweep.seed_count + s];
          if (!(p > 1.0 / d)) ++below;
          const auto idx = std::min(n_hist - 1, static_cast<std::size_t>(p / config.dp));
          ++counts[idx];
        }
        for (std::size_t h = 0; h < n_hist; ++h)
          hist[h][k] = static_cast<double>(counts[h]) / static_cast<double>(sweep.seed_count);
      }
      ReportCell cell;
      cell.params = {{"M", sweep.point.modes}, {"N", sweep.point.photons}, {"d", d}};
      auto& means = cell.series["mean_fraction"];
      auto& stds = cell.series["std_fraction"];
      auto& lower = cell.series["p_lower"];
      for (std::size_t h = 0; h < n_hist; ++h) {
        const MeanStd ms = mean_std(hist[h]);
        means.push_back(ms.mean);
        stds.push_back(ms.stddev);
        lower.push_back(static_cast<double>(h) * config.dp);
      }
      const MeanStd p0 = mean_std(sweep.p0[b]);
      cell.values["mean_p0"] = p0.mean;
      cell.values["std_p0"] = p0.stddev;
      cell.values["mean_p0_minus_uniform"] = p0.mean - 1.0 / d;
      cell.values["histogram_integral"] = compensated_sum(means);
      cell.values["mass_at_or_below_uniform"] =
          static_cast<double>(below) /
          static_cast<double>(sweep.seed_count * sweep.unitary_count);
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

ExperimentReport gap_report(const ExperimentConfig& config,
                            const std::vector<SeedSweep>& sweeps) {
  ExperimentReport report = start_report(config, "gap");
  for (const auto& sweep : sweeps) {
    for (std::size_t b = 0; b < sweep.bins.size(); ++b) {
      ReportCell cell;
      cell.params = {{"M", sweep.point.modes}, {"N", sweep.point.photons},
                     {"d", sweep.bins[b]}};
      auto& eps = cell.series["epsilon"];
      auto& means = cell.series["mean_fraction"];
      auto& stds = cell.series["std_fraction"];
      for (double e : config.epsilons) {
        std::vector<double> per_unitary(sweep.unitary_count);
        for (unsigned k = 0; k < sweep.unitary_count; ++k) {
          std::size_t small = 0;
          for (std::size_t s = 0; s < sweep.seed_count; ++s)
            if (sweep.gap[b][k * sweep.seed_count + s] <= e) ++small;
          per_unitary[k] = static_cast<double>(small) / static_cast<double>(sweep.seed_count);
        }
        const MeanStd ms = mean_std(per_unitary);
        eps.push_back(e);
        means.push_back(ms.mean);
        stds.push_back(ms.stddev);
      }
      bool monotone = true;
      for (std::size_t i = 1; i < means.size(); ++i)
        if (config.epsilons[i] >= config.epsilons[i - 1] && means[i] < means[i - 1])
          monotone = false;
      cell.values["monotone_in_epsilon"] = monotone ? 1.0 : 0.0;
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

ExperimentReport run_mpb_seed_scan(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report = start_report(config, "seed_scan");
  const Rng master(config.master_seed);
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const GridPoint point = config.grid[g];
    const auto space = std::make_shared<const FockSpace>(point.modes, point.photons,
                                                         config.outcome_set);
    const FockSpace seeds(point.modes, point.photons, OutcomeSet::full);
    Rng rng = master.split(g).split(0);
    const UnitaryMatrix u = config.identity_unitary ? UnitaryMatrix::identity(point.modes)
                                                    : haar_unitary(point.modes, rng);
    const std::size_t count = config.seeds_per_unitary == 0
                                  ? seeds.size()
                                  : std::min<std::size_t>(config.seeds_per_unitary,
                                                          seeds.size());
    std::vector<BinPartition> partitions;
    for (unsigned d : config.bins) partitions.emplace_back(space->size(), d);
    std::vector<std::vector<double>> labels(config.bins.size(), std::vector<double>(count));
    std::vector<std::vector<double>> p0(config.bins.size(), std::vector<double>(count));
    parallel_for(count, config.threads, [&](std::size_t s) {
      const Configuration seed = seeds.configuration(s);
      std::vector<double> outcome(space->size());
      const double mass =
          fill_probabilities(u, *space, seed, ParticleStatistics::boson, outcome);
      std::vector<double> binned;
      for (std::size_t b = 0; b < config.bins.size(); ++b) {
        binned.assign(config.bins[b], 0.0);
        bin_sums(outcome, partitions[b], binned);
        if (config.outcome_set == OutcomeSet::collision_free)
          for (double& p : binned) p /= mass;
        const MPBResult r = most_probable_bin(binned);
        labels[b][s] = r.label;
        p0[b][s] = r.p0;
      }
    });
    for (std::size_t b = 0; b < config.bins.size(); ++b) {
      const unsigned d = config.bins[b];
      ReportCell cell;
      cell.params = {{"M", point.modes}, {"N", point.photons}, {"d", d}};
      std::size_t violations = 0;
      double min_excess = 1.0;
      for (double p : p0[b]) {
        min_excess = std::min(min_excess, p - 1.0 / d);
        if (!(p > 1.0 / d)) ++violations;
      }
      const std::size_t head = std::min<std::size_t>(50, count);
      cell.values["transitions_first_50"] =
          static_cast<double>(count_transitions(std::span(labels[b]).first(head)));
      cell.values["transitions"] = static_cast<double>(count_transitions(labels[b]));
      cell.values["bound_violations"] = static_cast<double>(violations);
      cell.values["min_p0_excess"] = min_excess;
      cell.series["label"] = std::move(labels[b]);
      cell.series["p0"] = std::move(p0[b]);
      report.cells.push_back(std::move(cell));
    }
  }
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_bin_fraction_experiment(const ExperimentConfig& config) {
  const auto start = Clock::now();
  auto report = bin_fraction_report(config, run_seed_sweep(config));
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_pmax_histogram(const ExperimentConfig& config) {
  const auto start = Clock::now();
  auto report = pmax_histogram_report(config, run_seed_sweep(config));
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_gap_experiment(const ExperimentConfig& config) {
  const auto start = Clock::now();
  auto report = gap_report(config, run_seed_sweep(config));
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_collision_experiment(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report = start_report(config, "collision");
  const Rng master(config.master_seed);
  CollisionOptions options;
  options.seeds = config.seed_population;
  options.outcomes = config.outcome_set;
  options.threads = config.threads;
  const auto& others = config.compare_with;
  // Per (statistics, d): means across the grid, for the size-variation summary.
  std::vector<std::vector<std::vector<double>>> grid_means(
      others.size(), std::vector<std::vector<double>>(config.bins.size()));
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const GridPoint point = config.grid[g];
    const auto results = collision_sweep(point.modes, point.photons, config.bins, others,
                                         config.unitary_count, master.split(g), options);
    for (std::size_t o = 0; o < others.size(); ++o)
      for (std::size_t b = 0; b < config.bins.size(); ++b) {
        const CollisionResult& r = results[o][b];
        ReportCell cell;
        cell.params = {{"M", point.modes},
                       {"N", point.photons},
                       {"d", config.bins[b]},
                       {"statistics", statistics_code(others[o])},
                       {"space_size", static_cast<double>(r.space_size)}};
        cell.values["p_col_mean"] = r.mean;
        cell.values["p_col_std"] = r.stddev;
        cell.values["seed_count"] = static_cast<double>(r.seed_count);
        cell.series["p_col_per_unitary"] = r.per_unitary;
        grid_means[o][b].push_back(r.mean);
        report.cells.push_back(std::move(cell));
      }
  }
  for (std::size_t o = 0; o < others.size(); ++o)
    for (std::size_t b = 0; b < config.bins.size(); ++b) {
      const auto& means = grid_means[o][b];
      if (means.empty()) continue;
      ReportCell cell;
      cell.params = {{"d", config.bins[b]}, {"statistics", statistics_code(others[o])}};
      const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
      cell.values["p_col_min_over_grid"] = *lo;
      cell.values["p_col_max_over_grid"] = *hi;
      cell.values["p_col_range_over_grid"] = *hi - *lo;
      report.cells.push_back(std::move(cell));
    }
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_maxprob_scaling(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report = start_report(config, "maxprob");
  const Rng master(config.master_seed);
  std::vector<double> sizes, maxima;
  for (std::size_t g = 0; g < config.grid.size(); ++g) {
    const GridPoint point = config.grid[g];
    const FockSpace outcomes(point.modes, point.photons, config.outcome_set);
    const FockSpace seeds(point.modes, point.photons, OutcomeSet::collision_free);
    const std::size_t per_unitary =
        config.seeds_per_unitary == 0
            ? seeds.size()
            : std::min<std::size_t>(config.seeds_per_unitary, seeds.size());
    std::vector<double> values(per_unitary * config.unitary_count);
    std::vector<double> seed_std(config.unitary_count);
    for (unsigned k = 0; k < config.unitary_count; ++k) {
      Rng rng = master.split(g).split(k);
      const UnitaryMatrix u = haar_unitary(point.modes, rng);
      const auto chosen = draw_distinct_seeds(seeds, per_unitary, rng);
      parallel_for(per_unitary, config.threads, [&](std::size_t s) {
        std::vector<double> outcome(outcomes.size());
        fill_probabilities(u, outcomes, chosen[s], ParticleStatistics::boson, outcome);
        values[k * per_unitary + s] = *std::max_element(outcome.begin(), outcome.end());
      });
      seed_std[k] =
          mean_std(std::span<const double>(values).subspan(k * per_unitary, per_unitary)).stddev;
    }
    const MeanStd ms = mean_std(values);
    ReportCell cell;
    cell.params = {{"M", point.modes},
                   {"N", point.photons},
                   {"space_size", static_cast<double>(outcomes.size())}};
    cell.values["max_probability_mean"] = ms.mean;
    cell.values["max_probability_std_over_seeds"] = mean_std(seed_std).mean;
    cell.values["max_probability_std_overall"] = ms.stddev;
    sizes.push_back(static_cast<double>(outcomes.size()));
    maxima.push_back(ms.mean);
    report.cells.push_back(std::move(cell));
  }
  if (sizes.size() >= 2) {
    const PowerLawFit fit = fit_power_law(sizes, maxima);
    ReportCell summary;
    summary.values["prefactor"] = fit.prefactor;
    summary.values["exponent"] = fit.exponent;
    summary.values["r_squared"] = fit.r_squared;
    report.cells.push_back(std::move(summary));
  }
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_ryser_benchmark(const ExperimentConfig& config) {
  config.validate();
  const auto start = Clock::now();
  ExperimentReport report = start_report(config, "ryser");
  const Rng master(config.master_seed);
  const unsigned reps = std::max(1u, config.repetitions);

  std::vector<double> ns, times;
  for (unsigned n : config.permanent_sizes) {
    Rng rng = master.split(n);
    const ComplexMatrix a = ginibre(n, rng);
    std::vector<double> samples;
    Complex value;
    for (unsigned r = 0; r < reps; ++r) {
      const auto t0 = Clock::now();
      value = permanent_ryser(a);
      samples.push_back(seconds_since(t0));
    }
    ReportCell cell;
    cell.params = {{"n", n}};
    cell.values["median_seconds"] = median(samples);
    cell.values["permanent_re"] = value.real();
    cell.values["permanent_im"] = value.imag();
    ns.push_back(n);
    times.push_back(median(samples));
    report.cells.push_back(std::move(cell));
  }
  if (ns.size() >= 2) {
    ReportCell summary;
    auto& ratios = summary.series["ratio"];
    for (std::size_t i = 1; i < ns.size(); ++i) ratios.push_back(times[i] / times[i - 1]);
    if (ns.size() >= 3) {
      const ExponentialFit fit = fit_ryser_law(ns, times);
      summary.values["fit_a"] = fit.a;
      summary.values["fit_b"] = fit.b;
      summary.values["fit_c"] = fit.c;
    }
    summary.params = {{"summary", 1}};
    report.cells.push_back(std::move(summary));
  }

  std::vector<double> grid_sizes, grid_times;
  for (std::size_t g = 0; g < config.timing_grid.size(); ++g) {
    const GridPoint point = config.timing_grid[g];
    const FockSpace space(point.modes, point.photons, OutcomeSet::collision_free);
    Rng rng = master.split(1000 + g);
    const UnitaryMatrix u = haar_unitary(point.modes, rng);
    const Configuration seed = first_modes_seed(point.modes, point.photons);
    std::vector<double> outcome(space.size());
    std::vector<double> samples;
    double mass = 0.0;
    for (unsigned r = 0; r < reps; ++r) {
      const auto t0 = Clock::now();
      mass = fill_probabilities(u, space, seed, ParticleStatistics::boson, outcome);
      samples.push_back(seconds_since(t0));
    }
    const double seconds = median(samples);
    const double xi = static_cast<double>(space.size());
    ReportCell cell;
    cell.params = {{"M", point.modes}, {"N", point.photons}};
    cell.values["configurations"] = xi;
    cell.values["permanents"] = xi;
    cell.values["operations"] = xi * point.photons * std::exp2(point.photons);
    cell.values["time_ms"] = seconds * 1e3;
    cell.values["implied_flops"] =
        seconds > 0.0 ? xi * point.photons * std::exp2(point.photons) / seconds : 0.0;
    cell.values["collision_free_mass"] = mass;
    grid_sizes.push_back(xi);
    grid_times.push_back(seconds);
    report.cells.push_back(std::move(cell));
  }
  if (grid_sizes.size() >= 2) {
    ReportCell summary;
    summary.params = {{"summary", 2}};
    summary.values["fit_size_exponent"] = fit_power_law(grid_sizes, grid_times).exponent;
    report.cells.push_back(std::move(summary));
  }
  report.elapsed_seconds = seconds_since(start);
  return report;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  if (config.id == "seed_scan") return run_mpb_seed_scan(config);
  if (config.id == "bin_fraction") return run_bin_fraction_experiment(config);
  if (config.id == "pmax_histogram") return run_pmax_histogram(config);
  if (config.id == "collision") return run_collision_experiment(config);
  if (config.id == "gap") return run_gap_experiment(config);
  if (config.id == "maxprob") return run_maxprob_scaling(config);
  if (config.id == "ryser") return run_ryser_benchmark(config);
  throw ValidationError("unknown experiment id '" + config.id + "'");
}

PowerLawFit fit_power_law(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw ValidationError("power-law fit needs at least two paired points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0))
      throw ValidationError("power-law fit needs positive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw ValidationError("power-law fit needs distinct x values");
  PowerLawFit fit;
  fit.exponent = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.exponent * sx) / n;
  fit.prefactor = std::exp(intercept);
  const double mean_y = sy / n;
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double pred = intercept + fit.exponent * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - mean_y) * (ly[i] - mean_y);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

ExponentialFit fit_ryser_law(std::span<const double> n, std::span<const double> t,
                             double b_min, double b_max) {
  if (n.size() != t.size() || n.size() < 3)
    throw ValidationError("the timing fit needs at least three points");
  if (!(b_min < b_max)) throw ValidationError("empty exponent search interval");
  auto residual = [&](double b) {
    double a, c;
    return linear_fit_for_exponent(n, t, b, a, c);
  };
  constexpr int kScan = 400;
  double best_b = b_min, best_r = residual(b_min);
  for (int i = 1; i <= kScan; ++i) {
    const double b = b_min + (b_max - b_min) * i / kScan;
    const double r = residual(b);
    if (r < best_r) {
      best_r = r;
      best_b = b;
    }
  }
  const double step = (b_max - b_min) / kScan;
  double lo = std::max(b_min, best_b - step), hi = std::min(b_max, best_b + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double f1 = residual(x1), f2 = residual(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = residual(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = residual(x2);
    }
  }
  ExponentialFit fit;
  fit.b = 0.5 * (lo + hi);
  fit.residual = linear_fit_for_exponent(n, t, fit.b, fit.a, fit.c);
  if (best_r < fit.residual) {
    fit.b = best_b;
    fit.residual = linear_fit_for_exponent(n, t, fit.b, fit.a, fit.c);
  }
  return fit;
}

std::size_t count_transitions(std::span<const double> labels) {
  std::size_t transitions = 0;
  for (std::size_t i = 1; i < labels.size(); ++i)
    if (labels[i] != labels[i - 1]) ++transitions;
  return transitions;
}

}  // namespace bsdp
