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

#include "bsdp/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsdp/binning.hpp"
#include "bsdp/distribution.hpp"
#include "bsdp/errors.hpp"
#include "bsdp/experiments.hpp"
#include "bsdp/fock.hpp"
#include "bsdp/io.hpp"
#include "bsdp/linalg.hpp"
#include "bsdp/parallel.hpp"
#include "bsdp/problems.hpp"
#include "bsdp/rng.hpp"
#include "bsdp/sampling.hpp"

namespace bsdp::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kOutputDirVariable = "BSDP_OUTPUT_DIR";

struct UnitarySource {
  std::optional<std::uint64_t> haar_seed;
  std::string unitary_file;
  bool identity = false;

  void add_to(CLI::App& cmd) {
    auto* haar = cmd.add_option("--haar-seed", haar_seed, "Seed of the Haar-random unitary");
    auto* file = cmd.add_option("--unitary", unitary_file, "Unitary JSON file")
                     ->check(CLI::ExistingFile);
    auto* ident = cmd.add_flag("--identity", identity, "Use the identity network");
    haar->excludes(file)->excludes(ident);
    file->excludes(ident);
  }

  [[nodiscard]] UnitaryMatrix resolve(unsigned modes) const {
    if (identity) return UnitaryMatrix::identity(modes);
    if (!unitary_file.empty()) {
      auto u = UnitaryMatrix::from_json(read_file(unitary_file));
      if (u.dimension() != modes)
        throw ValidationError("unitary file has dimension " + std::to_string(u.dimension()) +
                              ", expected M=" + std::to_string(modes));
      return u;
    }
    if (!haar_seed)
      throw ValidationError("a unitary is required: pass --haar-seed, --unitary or --identity");
    return haar_unitary(modes, *haar_seed);
  }
};

struct Budget {
  double epsilon = 0.1;
  double delta = 0.05;
  double eta = 0.05;
  double gamma = 0.01;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--epsilon", epsilon, "Accuracy of the bin estimate")->capture_default_str();
    cmd.add_option("--delta", delta, "Implementation error budget")->capture_default_str();
    cmd.add_option("--eta", eta, "Allowed failure probability")->capture_default_str();
    cmd.add_option("--gamma", gamma, "Implementation failure budget")->capture_default_str();
  }

  [[nodiscard]] SamplePlan plan(unsigned d) const {
    return chernoff_sample_size(d, epsilon, delta, eta, gamma);
  }
};

OutcomeSet parse_outcomes(const std::string& text) {
  if (text == "full") return OutcomeSet::full;
  if (text == "collision_free") return OutcomeSet::collision_free;
  throw ValidationError("unknown outcome set '" + text + "'");
}

// Explicit path, else $BSDP_OUTPUT_DIR/default_name, else empty (stdout).
fs::path resolve_output(const std::string& explicit_path, const std::string& default_name) {
  if (!explicit_path.empty()) return explicit_path;
  if (const char* dir = std::getenv(kOutputDirVariable); dir && *dir)
    return fs::path(dir) / default_name;
  return {};
}

void emit(const fs::path& path, std::string content, std::ostream& out) {
  if (!content.empty() && content.back() != '\n') content += '\n';
  if (path.empty()) {
    out << content;
    return;
  }
  write_file_atomic(path, content);
  out << "wrote " << path.string() << '\n';
}

unsigned effective_threads(unsigned requested) {
  return requested == 0 ? default_thread_count() : requested;
}

// distribution ---------------------------------------------------------------

struct DistributionArgs {
  unsigned modes = 0;
  unsigned photons = 0;
  UnitarySource unitary;
  std::string seed_config;
  std::string statistics = "boson";
  std::string outcomes = "full";
  unsigned bins = 0;
  std::string out;
};

void run_distribution(const DistributionArgs& a, unsigned threads, std::ostream& out) {
  const auto seed = Configuration::parse(a.seed_config);
  seed.validate(a.modes, a.photons);
  const auto u = a.unitary.resolve(a.modes);
  auto space = std::make_shared<const FockSpace>(a.modes, a.photons, parse_outcomes(a.outcomes));
  const auto dist =
      full_distribution(u, space, seed, parse_statistics(a.statistics), {threads});
  const std::string name =
      "distribution_M" + std::to_string(a.modes) + "_N" + std::to_string(a.photons);
  if (a.bins == 0) {
    emit(resolve_output(a.out, name + ".csv"), distribution_csv(dist), out);
    return;
  }
  const auto binned = bin_probabilities(dist, make_partition(dist.size(), a.bins));
  emit(resolve_output(a.out, name + "_d" + std::to_string(a.bins) + ".csv"),
       binned_csv(binned), out);
}

// mpb ------------------------------------------------------------------------

struct MpbArgs {
  unsigned modes = 0;
  unsigned photons = 0;
  unsigned bins = 2;
  UnitarySource unitary;
  std::string seed_config;
  std::string statistics = "boson";
  std::string outcomes = "full";
  std::string mode = "exact";
  Budget budget;
  std::optional<std::uint64_t> rng_seed;
  std::string out;
};

void run_mpb(const MpbArgs& a, unsigned threads, std::ostream& out) {
  const auto seed = Configuration::parse(a.seed_config);
  seed.validate(a.modes, a.photons);
  if (a.mode != "exact" && a.mode != "sampled")
    throw ValidationError("--mode must be exact or sampled");
  const bool sampled = a.mode == "sampled";
  std::optional<SamplePlan> plan;
  if (sampled) {
    plan = a.budget.plan(a.bins);
    if (!a.rng_seed) throw ValidationError("sampled mode needs --rng-seed");
  }
  const auto u = a.unitary.resolve(a.modes);
  auto space = std::make_shared<const FockSpace>(a.modes, a.photons, parse_outcomes(a.outcomes));
  const auto dist =
      full_distribution(u, space, seed, parse_statistics(a.statistics), {threads});
  const auto partition = make_partition(dist.size(), a.bins);

  json doc;
  if (sampled) {
    Rng rng(*a.rng_seed);
    const auto estimate = estimate_mpb(dist, partition, *plan, rng);
    doc = json::parse(to_json(estimate, *plan));
    doc["rng_seed"] = *a.rng_seed;
  } else {
    const auto r = most_probable_bin(bin_probabilities(dist, partition));
    doc["schema_version"] = 1;
    doc["label"] = r.label;
    doc["p0"] = r.p0;
    doc["p1"] = r.p1;
    doc["gap"] = r.gap;
    doc["tie_flag"] = r.tie;
  }
  doc["mode"] = a.mode;
  doc["M"] = a.modes;
  doc["N"] = a.photons;
  doc["seed"] = seed.to_string();
  doc["statistics"] = a.statistics;
  doc["unitary_tag"] = u.tag();
  emit(resolve_output(a.out, "mpb.json"), doc.dump(2), out);
}

// plan -----------------------------------------------------------------------

struct PlanArgs {
  unsigned bins = 2;
  Budget budget;
  std::string out;
};

// unitary --------------------------------------------------------------------

struct UnitaryArgs {
  unsigned modes = 0;
  std::optional<std::uint64_t> haar_seed;
  std::string out;
};

// instance -------------------------------------------------------------------

struct InstanceArgs {
  unsigned modes = 0;
  unsigned photons = 0;
  unsigned bins = 2;
  std::size_t seed_count = 5;
  std::optional<std::uint64_t> haar_seed;
  std::optional<std::uint64_t> rng_seed;
  std::string kind = "function";
  std::string f_id = "max";
  std::vector<std::int64_t> y;
  std::string statistics = "boson";
  std::string outcomes = "full";
  bool collision_free_seeds = false;
  std::string out;
};

void run_instance(const InstanceArgs& a, std::ostream& out) {
  if (!a.haar_seed) throw ValidationError("instance generation needs --haar-seed");
  if (!a.rng_seed) throw ValidationError("instance generation needs --rng-seed");
  ProblemInstance instance;
  instance.modes = a.modes;
  instance.photons = a.photons;
  instance.bins = a.bins;
  instance.haar_seed = a.haar_seed;
  instance.y = a.y;
  instance.kind = parse_problem_kind(a.kind);
  instance.f_id = a.f_id;
  instance.statistics = parse_statistics(a.statistics);
  instance.outcome_set = parse_outcomes(a.outcomes);
  const FockSpace space(a.modes, a.photons, instance.outcome_set);
  Rng rng(*a.rng_seed);
  instance.seeds = draw_distinct_seeds(space, a.seed_count, rng,
                                       a.collision_free_seeds ||
                                           instance.statistics == ParticleStatistics::fermion);
  instance.validate();
  emit(resolve_output(a.out, "instance.json"), instance.to_json(), out);
}

// problem --------------------------------------------------------------------

struct ProblemArgs {
  std::string instance_file;
  bool solve = false;
  bool decide = false;
  std::string mode = "exact";
  Budget budget;
  std::optional<std::uint64_t> rng_seed;
  unsigned min_photons = ProblemPolicy{}.min_photons;
  std::string out;
};

void run_problem(const ProblemArgs& a, unsigned threads, std::ostream& out) {
  const auto instance = ProblemInstance::from_json(read_file(a.instance_file));
  ProblemPolicy policy;
  policy.min_photons = a.min_photons;
  instance.validate(policy);
  const bool want_decision = a.decide || (!a.solve && instance.kind == ProblemKind::decision);
  if (want_decision && instance.kind != ProblemKind::decision)
    throw ValidationError("--decide needs a decision instance");
  if (a.solve && instance.kind != ProblemKind::function)
    throw ValidationError("--solve needs a function instance");

  EvaluationOptions options;
  options.threads = threads;
  if (a.mode == "sampled") {
    options.mode = EvaluationMode::sampled;
    options.plan = a.budget.plan(instance.bins);
    if (!a.rng_seed) throw ValidationError("sampled mode needs --rng-seed");
    options.rng_seed = a.rng_seed;
  } else if (a.mode != "exact") {
    throw ValidationError("--mode must be exact or sampled");
  }
  const auto images = evaluate_images(instance, options);
  std::string answer;
  if (want_decision) {
    answer = decide(instance, images) ? "YES" : "NO";
  } else {
    std::ostringstream text;
    text << solve_function(instance, images);
    answer = text.str();
  }
  emit(resolve_output(a.out, "answer.json"), answer_json(instance, images, options, answer),
       out);
}

// experiment -----------------------------------------------------------------

struct ExperimentArgs {
  std::string id;
  std::string config_file;
  bool quick = false;
  std::optional<std::uint64_t> master_seed;
  std::optional<unsigned> unitaries;
  std::string out_dir;
  bool deterministic = false;
};

void run_experiment_command(const ExperimentArgs& a, unsigned threads, std::ostream& out) {
  const auto ids = experiment_ids();
  if (std::find(ids.begin(), ids.end(), a.id) == ids.end())
    throw ValidationError("unknown experiment id '" + a.id + "'");

  ExperimentConfig config;
  bool seeded = a.master_seed.has_value();
  if (!a.config_file.empty()) {
    json doc;
    try {
      doc = json::parse(read_file(a.config_file));
    } catch (const json::exception& e) {
      throw ValidationError(std::string("malformed experiment config: ") + e.what());
    }
    if (doc.contains("id") && doc["id"] != a.id)
      throw ValidationError("config file is for experiment '" +
                            doc["id"].get<std::string>() + "'");
    doc["id"] = a.id;
    seeded = seeded || doc.contains("master_seed");
    config = ExperimentConfig::from_json(doc.dump());
  } else {
    config = default_config(a.id, a.quick, 0);
  }
  if (!seeded) throw ValidationError("experiments need --master-seed or a config master_seed");
  if (a.master_seed) config.master_seed = *a.master_seed;
  if (a.unitaries) config.unitary_count = *a.unitaries;
  config.threads = threads;

  fs::path dir = a.out_dir;
  if (dir.empty()) dir = config.output_dir;
  if (dir.empty()) {
    const char* env = std::getenv(kOutputDirVariable);
    dir = env && *env ? fs::path(env) : fs::path("bsdp_reports");
  }
  config.output_dir = dir.string();
  config.validate();

  const auto report = run_experiment(config);
  const auto json_path = dir / (a.id + ".json");
  const auto csv_path = dir / (a.id + ".csv");
  write_file_atomic(json_path,
                    (a.deterministic ? report.deterministic_json() : report.to_json()) + "\n");
  write_file_atomic(csv_path, report.to_csv());
  out << "wrote " << json_path.string() << '\n' << "wrote " << csv_path.string() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact boson-sampling distributions, binning and most-probable-bin problems",
               "bsdp"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker threads; 0 uses every core")
      ->capture_default_str();

  DistributionArgs dist;
  auto* dist_cmd = app.add_subcommand("distribution", "Exact output distribution as CSV");
  dist_cmd->add_option("-M,--modes", dist.modes, "Number of modes")->required();
  dist_cmd->add_option("-N,--photons", dist.photons, "Number of photons")->required();
  dist.unitary.add_to(*dist_cmd);
  dist_cmd->add_option("--seed-config", dist.seed_config, "Input occupations, e.g. 1,1,0,0")
      ->required();
  dist_cmd->add_option("--statistics", dist.statistics, "boson, fermion or distinguishable")
      ->capture_default_str();
  dist_cmd->add_option("--outcomes", dist.outcomes, "full or collision_free")
      ->capture_default_str();
  dist_cmd->add_option("-d,--bins", dist.bins, "Write the binned distribution instead");
  dist_cmd->add_option("-o,--out", dist.out, "Output CSV path");

  MpbArgs mpb;
  auto* mpb_cmd = app.add_subcommand("mpb", "Most probable bin of one seed");
  mpb_cmd->add_option("-M,--modes", mpb.modes, "Number of modes")->required();
  mpb_cmd->add_option("-N,--photons", mpb.photons, "Number of photons")->required();
  mpb_cmd->add_option("-d,--bins", mpb.bins, "Number of bins")->capture_default_str();
  mpb.unitary.add_to(*mpb_cmd);
  mpb_cmd->add_option("--seed-config", mpb.seed_config, "Input occupations")->required();
  mpb_cmd->add_option("--statistics", mpb.statistics, "boson, fermion or distinguishable")
      ->capture_default_str();
  mpb_cmd->add_option("--outcomes", mpb.outcomes, "full or collision_free")
      ->capture_default_str();
  mpb_cmd->add_option("--mode", mpb.mode, "exact or sampled")->capture_default_str();
  mpb.budget.add_to(*mpb_cmd);
  mpb_cmd->add_option("--rng-seed", mpb.rng_seed, "Sampling seed (sampled mode)");
  mpb_cmd->add_option("-o,--out", mpb.out, "Output JSON path");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Chernoff sample size for a budget");
  plan_cmd->add_option("-d,--bins", plan.bins, "Number of bins")->capture_default_str();
  plan.budget.add_to(*plan_cmd);
  plan_cmd->add_option("-o,--out", plan.out, "Output JSON path");

  UnitaryArgs unitary;
  auto* unitary_cmd = app.add_subcommand("unitary", "Haar-random unitary as JSON");
  unitary_cmd->add_option("-M,--modes", unitary.modes, "Number of modes")->required();
  unitary_cmd->add_option("--haar-seed", unitary.haar_seed, "Generator seed");
  unitary_cmd->add_option("-o,--out", unitary.out, "Output JSON path");

  InstanceArgs inst;
  auto* inst_cmd = app.add_subcommand("instance", "Draw a problem instance");
  inst_cmd->add_option("-M,--modes", inst.modes, "Number of modes")->required();
  inst_cmd->add_option("-N,--photons", inst.photons, "Number of photons")->required();
  inst_cmd->add_option("-d,--bins", inst.bins, "Number of bins")->capture_default_str();
  inst_cmd->add_option("-n,--seeds", inst.seed_count, "Number of seeds")->capture_default_str();
  inst_cmd->add_option("--haar-seed", inst.haar_seed, "Seed of the network unitary");
  inst_cmd->add_option("--rng-seed", inst.rng_seed, "Seed for drawing input configurations");
  inst_cmd->add_option("--kind", inst.kind, "function or decision")->capture_default_str();
  inst_cmd->add_option("--f", inst.f_id, "Function or predicate id")->capture_default_str();
  inst_cmd->add_option("--y", inst.y, "Integer parameters")->delimiter(',');
  inst_cmd->add_option("--statistics", inst.statistics, "boson, fermion or distinguishable")
      ->capture_default_str();
  inst_cmd->add_option("--outcomes", inst.outcomes, "full or collision_free")
      ->capture_default_str();
  inst_cmd->add_flag("--collision-free-seeds", inst.collision_free_seeds,
                     "Draw only collision-free inputs");
  inst_cmd->add_option("-o,--out", inst.out, "Output JSON path");

  ProblemArgs prob;
  auto* prob_cmd = app.add_subcommand("problem", "Solve or decide a problem instance");
  prob_cmd->add_option("instance", prob.instance_file, "Instance JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* solve_flag = prob_cmd->add_flag("--solve", prob.solve, "Evaluate the function");
  auto* decide_flag = prob_cmd->add_flag("--decide", prob.decide, "Answer YES or NO");
  solve_flag->excludes(decide_flag);
  prob_cmd->add_option("--mode", prob.mode, "exact or sampled")->capture_default_str();
  prob.budget.add_to(*prob_cmd);
  prob_cmd->add_option("--rng-seed", prob.rng_seed, "Sampling seed (sampled mode)");
  prob_cmd->add_option("--min-photons", prob.min_photons, "Smallest admissible N")
      ->capture_default_str();
  prob_cmd->add_option("-o,--out", prob.out, "Output JSON path");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a numerical experiment");
  exp_cmd->add_option("id", exp.id, "Experiment id")->required();
  exp_cmd->add_option("-c,--config", exp.config_file, "Experiment config JSON")
      ->check(CLI::ExistingFile);
  exp_cmd->add_flag("--quick", exp.quick, "CI-scale defaults (ignored with --config)");
  exp_cmd->add_option("--master-seed", exp.master_seed, "Master RNG seed");
  exp_cmd->add_option("--unitaries", exp.unitaries, "Override the unitary count");
  exp_cmd->add_option("--out-dir", exp.out_dir, "Report directory");
  exp_cmd->add_flag("--deterministic", exp.deterministic, "Omit timing fields from the JSON");

  std::vector<const char*> argv{"bsdp"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "bsdp: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    const unsigned t = effective_threads(threads);
    if (*dist_cmd) {
      run_distribution(dist, t, out);
    } else if (*mpb_cmd) {
      run_mpb(mpb, t, out);
    } else if (*plan_cmd) {
      emit(resolve_output(plan.out, "plan.json"), to_json(plan.budget.plan(plan.bins)), out);
    } else if (*unitary_cmd) {
      if (!unitary.haar_seed) throw ValidationError("unitary needs --haar-seed");
      emit(resolve_output(unitary.out, "unitary.json"),
           haar_unitary(unitary.modes, *unitary.haar_seed).to_json(), out);
    } else if (*inst_cmd) {
      run_instance(inst, out);
    } else if (*prob_cmd) {
      run_problem(prob, t, out);
    } else if (*exp_cmd) {
      run_experiment_command(exp, t, out);
    }
  } catch (const ValidationError& e) {
    err << "bsdp: invalid input: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CapacityError& e) {
    err << "bsdp: capacity exceeded: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const std::exception& e) {
    err << "bsdp: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace bsdp::cli
