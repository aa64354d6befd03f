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

#include "bsdp/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

#include "bsdp/errors.hpp"
#include "bsdp/parallel.hpp"

namespace bsdp {
namespace {

using nlohmann::json;

std::int64_t y_at(std::span<const std::int64_t> y, std::size_t k, std::string_view who) {
  if (y.size() <= k)
    throw ValidationError(std::string(who) + " needs at least " + std::to_string(k + 1) +
                          " ancillary integers y");
  return y[k];
}

IntegerCode sum_of(std::span<const unsigned> x) {
  IntegerCode total = 0;
  for (unsigned v : x) total += v;
  return total;
}

void require_images(const FunctionArgs& args, std::string_view who) {
  if (args.x.empty()) throw ValidationError(std::string(who) + " needs a non-empty x");
}

// y[0] = j selects an image, y[1] = i the outcome inside bin B_{x_j}; both 1-based.
IntegerCode indexed_outcome(const FunctionArgs& args, bool by_rank) {
  require_images(args, "indexed_outcome");
  if (args.space == nullptr) throw ValidationError("indexed_outcome needs the outcome space");
  const std::int64_t j = y_at(args.y, 0, "indexed_outcome");
  const std::int64_t i = y_at(args.y, 1, "indexed_outcome");
  if (j < 1 || static_cast<std::uint64_t>(j) > args.x.size())
    throw ValidationError("image index j=" + std::to_string(j) + " outside 1.." +
                          std::to_string(args.x.size()));
  if (i < 1) throw ValidationError("outcome position i must be >= 1");
  unsigned label;
  if (by_rank) {
    std::vector<unsigned> sorted(args.x.begin(), args.x.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    label = sorted[static_cast<std::size_t>(j - 1)];
  } else {
    label = args.x[static_cast<std::size_t>(j - 1)];
  }
  return outcome_in_bin(*args.space, args.bins, label, static_cast<std::uint64_t>(i));
}

std::shared_ptr<const FockSpace> instance_space(const ProblemInstance& instance) {
  return std::make_shared<const FockSpace>(instance.modes, instance.photons,
                                           instance.outcome_set);
}

}  // namespace

std::string_view to_string(ProblemKind kind) noexcept {
  return kind == ProblemKind::decision ? "decision" : "function";
}

ProblemKind parse_problem_kind(std::string_view text) {
  if (text == "decision") return ProblemKind::decision;
  if (text == "function") return ProblemKind::function;
  throw ValidationError("unknown problem kind '" + std::string(text) + "'");
}

void ProblemInstance::validate(const ProblemPolicy& policy) const {
  if (modes < 1) throw ValidationError("M must be at least 1");
  if (photons < policy.min_photons)
    throw ValidationError("N=" + std::to_string(photons) + " is below the minimum of " +
                          std::to_string(policy.min_photons) + " photons");
  if (unitary && unitary->dimension() != modes)
    throw ValidationError("explicit unitary does not match M");
  if (!unitary && !haar_seed) throw ValidationError("instance needs a haar_seed or a unitary");
  if (seeds.empty()) throw ValidationError("instance needs at least one seed");
  const std::uint64_t size = outcome_set == OutcomeSet::full
                                 ? space_size(modes, photons)
                                 : binomial(modes, photons).convert_to<std::uint64_t>();
  if (bins < 2 || bins > size)
    throw ValidationError("d=" + std::to_string(bins) + " must satisfy 2 <= d <= |S| = " +
                          std::to_string(size));
  if (policy.sparsity_divisor > 0 && seeds.size() * policy.sparsity_divisor >= size)
    throw ValidationError("n=" + std::to_string(seeds.size()) + " seeds is not small against |S|=" +
                          std::to_string(size) + " (need n < |S|/" +
                          std::to_string(policy.sparsity_divisor) + ")");
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& s : seeds) {
    s.validate(modes, photons);
    if (statistics == ParticleStatistics::fermion && !is_collision_free(s))
      throw ValidationError("fermionic seeds must be collision-free: " + s.to_string());
    if (!seen.emplace(s.occupations().begin(), s.occupations().end()).second)
      throw ValidationError("seed " + s.to_string() + " appears more than once");
  }
  if (f_id.empty()) throw ValidationError("instance needs an f_id");
}

UnitaryMatrix ProblemInstance::resolve_unitary() const {
  if (unitary) return *unitary;
  if (!haar_seed) throw ValidationError("instance needs a haar_seed or a unitary");
  return haar_unitary(modes, *haar_seed);
}

std::string ProblemInstance::unitary_tag() const {
  if (unitary) return unitary->tag();
  return haar_seed ? "haar:" + std::to_string(*haar_seed) : std::string("none");
}

std::string ProblemInstance::to_json() const {
  json doc;
  doc["schema_version"] = 1;
  doc["M"] = modes;
  doc["N"] = photons;
  doc["d"] = bins;
  if (haar_seed) doc["haar_seed"] = *haar_seed;
  if (unitary) doc["unitary"] = json::parse(unitary->to_json());
  auto& seed_list = doc["seeds"] = json::array();
  for (const auto& s : seeds) seed_list.push_back(s.to_string());
  doc["y"] = y;
  doc["kind"] = std::string(to_string(kind));
  doc["f_id"] = f_id;
  doc["statistics"] = std::string(bsdp::to_string(statistics));
  doc["outcome_set"] = outcome_set == OutcomeSet::full ? "full" : "collision_free";
  return doc.dump(2);
}

ProblemInstance ProblemInstance::from_json(std::string_view text) {
  ProblemInstance instance;
  try {
    const json doc = json::parse(text);
    instance.modes = doc.at("M").get<unsigned>();
    instance.photons = doc.at("N").get<unsigned>();
    instance.bins = doc.at("d").get<unsigned>();
    if (doc.contains("haar_seed") && !doc["haar_seed"].is_null())
      instance.haar_seed = doc["haar_seed"].get<std::uint64_t>();
    if (doc.contains("unitary") && !doc["unitary"].is_null())
      instance.unitary = UnitaryMatrix::from_json(doc["unitary"].dump());
    for (const auto& s : doc.at("seeds"))
      instance.seeds.push_back(Configuration::parse(s.get<std::string>()));
    if (doc.contains("y")) instance.y = doc["y"].get<std::vector<std::int64_t>>();
    instance.kind = parse_problem_kind(doc.at("kind").get<std::string>());
    instance.f_id = doc.at("f_id").get<std::string>();
    if (doc.contains("statistics"))
      instance.statistics = parse_statistics(doc["statistics"].get<std::string>());
    if (doc.contains("outcome_set")) {
      const auto set = doc["outcome_set"].get<std::string>();
      if (set == "full") instance.outcome_set = OutcomeSet::full;
      else if (set == "collision_free") instance.outcome_set = OutcomeSet::collision_free;
      else throw ValidationError("unknown outcome_set '" + set + "'");
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed problem instance: ") + e.what());
  }
  return instance;
}

std::vector<Configuration> draw_distinct_seeds(const FockSpace& space, std::size_t count,
                                               Rng& rng, bool collision_free_only) {
  const std::size_t admissible =
      collision_free_only ? space.collision_free_count() : space.size();
  if (count > admissible)
    throw ValidationError("cannot draw " + std::to_string(count) + " distinct seeds from " +
                          std::to_string(admissible));
  std::vector<Configuration> seeds;
  std::set<std::size_t> taken;
  while (seeds.size() < count) {
    SeedDraw draw = random_seed(space, rng, collision_free_only);
    if (taken.insert(draw.index).second) seeds.push_back(std::move(draw.configuration));
  }
  return seeds;
}

ImageVector evaluate_images(const UnitaryMatrix& u, std::shared_ptr<const FockSpace> space,
                            std::span<const Configuration> seeds, unsigned bins,
                            const EvaluationOptions& options) {
  if (!space) throw ValidationError("evaluate_images needs a space");
  const BinPartition partition(space->size(), bins);
  const bool sampled = options.mode == EvaluationMode::sampled;
  if (sampled) {
    if (!options.plan) throw ValidationError("sampled mode needs a sample plan");
    if (!options.rng_seed) throw ValidationError("sampled mode needs an rng seed");
    if (options.plan->d != bins) throw ValidationError("sample plan and d disagree");
  }
  for (const auto& s : seeds) s.validate(space->modes(), space->photons());

  ImageVector images{bins, std::vector<unsigned>(seeds.size()),
                     std::vector<MPBResult>(seeds.size())};
  parallel_for(seeds.size(), options.threads, [&](std::size_t j) {
    if (sampled) {
      const auto dist = full_distribution(u, space, seeds[j], options.statistics);
      Rng rng = Rng(*options.rng_seed).split(j);
      images.diagnostics[j] = estimate_mpb(dist, partition, *options.plan, rng).result;
    } else {
      const auto probs =
          seed_bin_probabilities(u, *space, seeds[j], options.statistics, partition);
      images.diagnostics[j] = most_probable_bin(probs);
    }
    images.x[j] = images.diagnostics[j].label;
  });
  return images;
}

ImageVector evaluate_images(const ProblemInstance& instance,
                            const EvaluationOptions& options) {
  EvaluationOptions effective = options;
  effective.statistics = instance.statistics;
  return evaluate_images(instance.resolve_unitary(), instance_space(instance), instance.seeds,
                         instance.bins, effective);
}

std::int64_t gcd_convention(std::int64_t a, std::int64_t b) noexcept {
  return std::gcd(a, b);
}

IntegerCode outcome_in_bin(const FockSpace& space, unsigned bins, unsigned bin,
                           std::uint64_t position) {
  const BinPartition partition(space.size(), bins);
  if (bin >= bins) throw ValidationError("bin label outside 0..d-1");
  if (position < 1 || position > partition.width(bin))
    throw ValidationError("outcome position " + std::to_string(position) + " outside bin " +
                          std::to_string(bin) + " of width " +
                          std::to_string(partition.width(bin)));
  return space.code(partition.offset(bin) + position - 1);
}

FunctionRegistry FunctionRegistry::with_builtins() {
  FunctionRegistry r;
  r.add_function("max", [](const FunctionArgs& a) {
    require_images(a, "max");
    return IntegerCode(*std::max_element(a.x.begin(), a.x.end()));
  });
  r.add_function("min", [](const FunctionArgs& a) {
    require_images(a, "min");
    return IntegerCode(*std::min_element(a.x.begin(), a.x.end()));
  });
  r.add_function("sum", [](const FunctionArgs& a) { return sum_of(a.x); });
  r.add_function("sum_parity", [](const FunctionArgs& a) {
    return IntegerCode(sum_of(a.x) % 2);
  });
  r.add_function("gcd_sum_y1", [](const FunctionArgs& a) {
    const auto total = sum_of(a.x).convert_to<std::int64_t>();
    return IntegerCode(gcd_convention(total, y_at(a.y, 0, "gcd_sum_y1")));
  });
  r.add_function("indexed_outcome",
                 [](const FunctionArgs& a) { return indexed_outcome(a, false); });
  r.add_function("ranked_outcome",
                 [](const FunctionArgs& a) { return indexed_outcome(a, true); });

  r.add_predicate("max_eq_y1", "max", [](const IntegerCode& v, std::span<const std::int64_t> y) {
    return v == y_at(y, 0, "max_eq_y1");
  });
  r.add_predicate("min_eq_y1", "min", [](const IntegerCode& v, std::span<const std::int64_t> y) {
    return v == y_at(y, 0, "min_eq_y1");
  });
  r.add_predicate("sum_gt_y1", "sum", [](const IntegerCode& v, std::span<const std::int64_t> y) {
    return v > y_at(y, 0, "sum_gt_y1");
  });
  r.add_predicate("sum_even", "sum_parity",
                  [](const IntegerCode& v, std::span<const std::int64_t>) { return v == 0; });
  r.add_predicate("gcd_sum_y1_eq_y2", "gcd_sum_y1",
                  [](const IntegerCode& v, std::span<const std::int64_t> y) {
                    return v == y_at(y, 1, "gcd_sum_y1_eq_y2");
                  });
  r.add_predicate("indexed_outcome_gt_y3", "indexed_outcome",
                  [](const IntegerCode& v, std::span<const std::int64_t> y) {
                    return v > y_at(y, 2, "indexed_outcome_gt_y3");
                  });
  return r;
}

void FunctionRegistry::add_function(std::string id, ProblemFunction fn) {
  if (!fn) throw ValidationError("function '" + id + "' is empty");
  functions_[std::move(id)] = std::move(fn);
}

void FunctionRegistry::add_predicate(std::string id, std::string function_id,
                                     ProblemPredicate predicate) {
  if (!has_function(function_id))
    throw ValidationError("predicate '" + id + "' refers to unknown function '" +
                          function_id + "'");
  if (!predicate) throw ValidationError("predicate '" + id + "' is empty");
  predicates_[std::move(id)] = Predicate{std::move(function_id), std::move(predicate)};
}

bool FunctionRegistry::has_function(std::string_view id) const {
  return functions_.find(id) != functions_.end();
}

bool FunctionRegistry::has_predicate(std::string_view id) const {
  return predicates_.find(id) != predicates_.end();
}

std::vector<std::string> FunctionRegistry::function_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : functions_) ids.push_back(id);
  return ids;
}

std::vector<std::string> FunctionRegistry::predicate_ids() const {
  std::vector<std::string> ids;
  for (const auto& [id, p] : predicates_) ids.push_back(id);
  return ids;
}

IntegerCode FunctionRegistry::evaluate(std::string_view function_id,
                                       const FunctionArgs& args) const {
  const auto it = functions_.find(function_id);
  if (it == functions_.end())
    throw ValidationError("unknown function '" + std::string(function_id) + "'");
  return it->second(args);
}

bool FunctionRegistry::test(std::string_view predicate_id, const FunctionArgs& args) const {
  const auto it = predicates_.find(predicate_id);
  if (it == predicates_.end())
    throw ValidationError("unknown predicate '" + std::string(predicate_id) + "'");
  return it->second.predicate(evaluate(it->second.function_id, args), args.y);
}

const std::string& FunctionRegistry::function_of(std::string_view predicate_id) const {
  const auto it = predicates_.find(predicate_id);
  if (it == predicates_.end())
    throw ValidationError("unknown predicate '" + std::string(predicate_id) + "'");
  return it->second.function_id;
}

IntegerCode solve_function(const ProblemInstance& instance, const ImageVector& images,
                           const FunctionRegistry& registry) {
  const std::string& id = instance.kind == ProblemKind::decision
                              ? registry.function_of(instance.f_id)
                              : instance.f_id;
  const bool needs_space = id == "indexed_outcome" || id == "ranked_outcome";
  std::optional<FockSpace> space;
  if (needs_space) space.emplace(instance.modes, instance.photons, instance.outcome_set);
  const FunctionArgs args{images.x, instance.y, instance.bins,
                          space ? &*space : nullptr};
  return registry.evaluate(id, args);
}

bool decide(const ProblemInstance& instance, const ImageVector& images,
            const FunctionRegistry& registry) {
  if (instance.kind != ProblemKind::decision)
    throw ValidationError("decide() needs a decision-kind instance");
  const auto& fn = registry.function_of(instance.f_id);
  std::optional<FockSpace> space;
  if (fn == "indexed_outcome" || fn == "ranked_outcome")
    space.emplace(instance.modes, instance.photons, instance.outcome_set);
  const FunctionArgs args{images.x, instance.y, instance.bins, space ? &*space : nullptr};
  return registry.test(instance.f_id, args);
}

std::vector<std::vector<CollisionResult>> collision_sweep(
    unsigned modes, unsigned photons, std::span<const unsigned> bins,
    std::span<const ParticleStatistics> others, unsigned unitary_count, const Rng& rng,
    const CollisionOptions& options) {
  if (modes < photons) throw ValidationError("collision experiment needs M >= N");
  if (unitary_count < 1) throw ValidationError("unitary_count must be at least 1");
  const bool fermions = std::find(others.begin(), others.end(), ParticleStatistics::fermion) !=
                        others.end();
  if (fermions && options.seeds == SeedPopulation::full)
    throw ValidationError("fermionic comparisons need collision-free seeds");

  const FockSpace outcomes(modes, photons, options.outcomes);
  std::vector<BinPartition> partitions;
  for (unsigned d : bins) partitions.emplace_back(outcomes.size(), d);
  const FockSpace seed_space(modes, photons,
                             options.seeds == SeedPopulation::collision_free
                                 ? OutcomeSet::collision_free
                                 : OutcomeSet::full);
  const std::size_t n_seeds = seed_space.size();
  const std::size_t n_bins = bins.size();
  const std::size_t n_others = others.size();

  // matches[k][o][b]
  std::vector<std::uint64_t> matches(static_cast<std::size_t>(unitary_count) * n_others * n_bins,
                                     0);
  for (unsigned k = 0; k < unitary_count; ++k) {
    Rng child = rng.split(k);
    const UnitaryMatrix u = haar_unitary(modes, child);
    // hits[s][o][b] so seeds can be processed in parallel.
    std::vector<std::uint8_t> hits(n_seeds * n_others * n_bins, 0);
    parallel_for(n_seeds, options.threads, [&](std::size_t s) {
      const Configuration seed = seed_space.configuration(s);
      std::vector<double> outcome(outcomes.size());
      std::vector<double> binned;
      auto labels_for = [&](ParticleStatistics stats) {
        const double mass = fill_probabilities(u, outcomes, seed, stats, outcome);
        std::vector<unsigned> labels(n_bins);
        for (std::size_t b = 0; b < n_bins; ++b) {
          binned.assign(bins[b], 0.0);
          bin_sums(outcome, partitions[b], binned);
          if (options.outcomes == OutcomeSet::collision_free)
            for (double& p : binned) p /= mass;
          labels[b] = most_probable_bin(binned).label;
        }
        return labels;
      };
      const auto boson = labels_for(ParticleStatistics::boson);
      for (std::size_t o = 0; o < n_others; ++o) {
        const auto other = others[o] == ParticleStatistics::boson ? boson : labels_for(others[o]);
        for (std::size_t b = 0; b < n_bins; ++b)
          hits[(s * n_others + o) * n_bins + b] = other[b] == boson[b];
      }
    });
    for (std::size_t s = 0; s < n_seeds; ++s)
      for (std::size_t ob = 0; ob < n_others * n_bins; ++ob)
        matches[k * n_others * n_bins + ob] += hits[s * n_others * n_bins + ob];
  }

  std::vector<std::vector<CollisionResult>> results(n_others, std::vector<CollisionResult>(n_bins));
  for (std::size_t o = 0; o < n_others; ++o)
    for (std::size_t b = 0; b < n_bins; ++b) {
      CollisionResult& r = results[o][b];
      r.seed_count = n_seeds;
      r.space_size = outcomes.size();
      r.per_unitary.resize(unitary_count);
      for (unsigned k = 0; k < unitary_count; ++k)
        r.per_unitary[k] = static_cast<double>(matches[(k * n_others + o) * n_bins + b]) /
                           static_cast<double>(n_seeds);
      r.mean = compensated_sum(r.per_unitary) / unitary_count;
      if (unitary_count > 1) {
        double ss = 0.0;
        for (double f : r.per_unitary) ss += (f - r.mean) * (f - r.mean);
        r.stddev = std::sqrt(ss / (unitary_count - 1));
      }
    }
  return results;
}

CollisionResult collision_probability(unsigned modes, unsigned photons, unsigned bins,
                                      ParticleStatistics other, unsigned unitary_count,
                                      const Rng& rng, const CollisionOptions& options) {
  const unsigned bin_list[] = {bins};
  const ParticleStatistics other_list[] = {other};
  return collision_sweep(modes, photons, bin_list, other_list, unitary_count, rng, options)[0][0];
}

double joint_success_probability(double p_col, unsigned n) {
  if (!(p_col >= 0.0 && p_col <= 1.0)) throw ValidationError("p_col must lie in [0, 1]");
  if (n < 1) throw ValidationError("n must be at least 1");
  return std::pow(p_col, static_cast<double>(n));
}

std::string answer_json(const ProblemInstance& instance, const ImageVector& images,
                        const EvaluationOptions& options, const std::string& answer) {
  json doc;
  doc["schema_version"] = 1;
  doc["instance"] = json::parse(instance.to_json());
  doc["mode"] = options.mode == EvaluationMode::exact ? "exact" : "sampled";
  if (options.plan) doc["n_min"] = options.plan->n_min;
  if (options.rng_seed) doc["rng_seed"] = *options.rng_seed;
  doc["unitary_tag"] = instance.unitary_tag();
  doc["x"] = images.x;
  auto& diag = doc["diagnostics"] = json::array();
  for (const auto& r : images.diagnostics)
    diag.push_back({{"label", r.label}, {"p0", r.p0}, {"p1", r.p1}, {"gap", r.gap},
                    {"tie_flag", r.tie}});
  doc["answer"] = answer;
  return doc.dump(2);
}

}  // namespace bsdp
