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
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bsdp/binning.hpp"
#include "bsdp/distribution.hpp"
#include "bsdp/fock.hpp"
#include "bsdp/linalg.hpp"
#include "bsdp/rng.hpp"
#include "bsdp/sampling.hpp"

namespace bsdp {

enum class ProblemKind { decision, function };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view text);

/// Limits enforced by ProblemInstance::validate().
struct ProblemPolicy {
  unsigned min_photons = 3;        // N > 2
  std::uint64_t sparsity_divisor = 10;  // n < |S| / sparsity_divisor
};

struct ProblemInstance {
  unsigned modes = 0;
  unsigned photons = 0;
  unsigned bins = 2;
  std::optional<std::uint64_t> haar_seed;
  std::optional<UnitaryMatrix> unitary;  // takes precedence over haar_seed
  std::vector<Configuration> seeds;
  std::vector<std::int64_t> y;
  ProblemKind kind = ProblemKind::function;
  std::string f_id;
  ParticleStatistics statistics = ParticleStatistics::boson;
  OutcomeSet outcome_set = OutcomeSet::full;

  /// Throws ValidationError on malformed fields, repeated seeds, too many
  /// seeds for the space, or too few photons.
  void validate(const ProblemPolicy& policy = {}) const;

  [[nodiscard]] UnitaryMatrix resolve_unitary() const;
  [[nodiscard]] std::string unitary_tag() const;

  [[nodiscard]] std::string to_json() const;
  static ProblemInstance from_json(std::string_view text);
};

/// n distinct seeds drawn uniformly without replacement.
std::vector<Configuration> draw_distinct_seeds(const FockSpace& space, std::size_t count,
                                               Rng& rng, bool collision_free_only = false);

struct ImageVector {
  unsigned bins = 0;
  std::vector<unsigned> x;
  std::vector<MPBResult> diagnostics;
};

enum class EvaluationMode { exact, sampled };

struct EvaluationOptions {
  EvaluationMode mode = EvaluationMode::exact;
  ParticleStatistics statistics = ParticleStatistics::boson;
  std::optional<SamplePlan> plan;   // required in sampled mode
  std::optional<std::uint64_t> rng_seed;  // required in sampled mode
  unsigned threads = 1;
};

/// x_j = label of the most probable bin of seed j. In sampled mode seed j
/// draws from Rng(rng_seed).split(j), so results do not depend on threads.
ImageVector evaluate_images(const UnitaryMatrix& u, std::shared_ptr<const FockSpace> space,
                            std::span<const Configuration> seeds, unsigned bins,
                            const EvaluationOptions& options = {});

ImageVector evaluate_images(const ProblemInstance& instance,
                            const EvaluationOptions& options = {});

/// Arguments handed to registered functions.
struct FunctionArgs {
  std::span<const unsigned> x;
  std::span<const std::int64_t> y;
  unsigned bins = 0;
  const FockSpace* space = nullptr;  // needed by outcome-indexed functions
};

using ProblemFunction = std::function<IntegerCode(const FunctionArgs&)>;
using ProblemPredicate = std::function<bool(const IntegerCode&, std::span<const std::int64_t>)>;

/// Named functions f(x, y) and predicates built on them.
///
/// A predicate is bound to one function; decide() evaluates the function and
/// applies the predicate to its value.
class FunctionRegistry {
 public:
  /// Registry preloaded with the built-ins.
  static FunctionRegistry with_builtins();

  void add_function(std::string id, ProblemFunction fn);
  void add_predicate(std::string id, std::string function_id, ProblemPredicate predicate);

  [[nodiscard]] bool has_function(std::string_view id) const;
  [[nodiscard]] bool has_predicate(std::string_view id) const;
  [[nodiscard]] std::vector<std::string> function_ids() const;
  [[nodiscard]] std::vector<std::string> predicate_ids() const;

  [[nodiscard]] IntegerCode evaluate(std::string_view function_id,
                                     const FunctionArgs& args) const;
  [[nodiscard]] bool test(std::string_view predicate_id, const FunctionArgs& args) const;
  [[nodiscard]] const std::string& function_of(std::string_view predicate_id) const;

 private:
  struct Predicate {
    std::string function_id;
    ProblemPredicate predicate;
  };
  std::map<std::string, ProblemFunction, std::less<>> functions_;
  std::map<std::string, Predicate, std::less<>> predicates_;
};

/// gcd with gcd(0, y) = |y| and gcd(0, 0) = 0.
std::int64_t gcd_convention(std::int64_t a, std::int64_t b) noexcept;

/// Integer code (ordering key for N = 1) of the i-th outcome, 1-based, of bin
/// `bin` of `space`.
IntegerCode outcome_in_bin(const FockSpace& space, unsigned bins, unsigned bin,
                           std::uint64_t position);

/// f(x, y) for a function-kind instance (or the function behind a predicate).
IntegerCode solve_function(const ProblemInstance& instance, const ImageVector& images,
                           const FunctionRegistry& registry = FunctionRegistry::with_builtins());

/// YES (true) or NO (false) for a decision-kind instance.
bool decide(const ProblemInstance& instance, const ImageVector& images,
            const FunctionRegistry& registry = FunctionRegistry::with_builtins());

enum class SeedPopulation { collision_free, full };

struct CollisionOptions {
  SeedPopulation seeds = SeedPopulation::collision_free;
  OutcomeSet outcomes = OutcomeSet::full;
  unsigned threads = 1;
};

struct CollisionResult {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation across unitaries
  std::vector<double> per_unitary;
  std::uint64_t seed_count = 0;
  std::uint64_t space_size = 0;
};

/// Fraction of seeds whose boson image matches the image under `other`,
/// averaged over `unitary_count` Haar unitaries drawn from rng.split(k).
/// Every admissible seed is evaluated.
CollisionResult collision_probability(unsigned modes, unsigned photons, unsigned bins,
                                      ParticleStatistics other, unsigned unitary_count,
                                      const Rng& rng, const CollisionOptions& options = {});

/// collision_probability() for several statistics and bin counts at once,
/// sharing the per-seed distributions. Entry [o][b] pairs others[o] with
/// bins[b]; each entry equals the corresponding single call.
std::vector<std::vector<CollisionResult>> collision_sweep(
    unsigned modes, unsigned photons, std::span<const unsigned> bins,
    std::span<const ParticleStatistics> others, unsigned unitary_count, const Rng& rng,
    const CollisionOptions& options = {});

/// p_col^n.
double joint_success_probability(double p_col, unsigned n);

/// JSON answer record with the instance provenance.
std::string answer_json(const ProblemInstance& instance, const ImageVector& images,
                        const EvaluationOptions& options, const std::string& answer);

}  // namespace bsdp
