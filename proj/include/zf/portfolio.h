// Copyright 2026 The zfolio Authors.
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

#ifndef ZF_PORTFOLIO_H_
#define ZF_PORTFOLIO_H_

#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "zf/cnf.h"
#include "zf/features.h"
#include "zf/harness.h"
#include "zf/hierarchy.h"
#include "zf/learning.h"
#include "zf/runtime_matrix.h"
#include "zf/scoring.h"

namespace zf {

class PortfolioError : public std::runtime_error {
 public:
  enum class Kind { kTooManySolvers, kInsufficientData, kInvalidConfig, kFormat };

  PortfolioError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class Objective { kMinRuntime, kMaxScore };

std::string to_string(Objective objective);
Objective objective_from_string(const std::string& name);  // "runtime"/"min_runtime", "score"/"max_score"

// Conditional models per solver: none, {sat, unsat}, or category x {sat, unsat}.
enum class HierarchyMode { kNone, kSat2, kGeneral6 };

std::string to_string(HierarchyMode mode);
HierarchyMode hierarchy_mode_from_string(const std::string& name);

inline constexpr double kPresolverCutoffs[] = {0.0, 2.0, 5.0, 10.0};

struct PresolverEntry {
  std::string solver_id;
  double cutoff_seconds = 0.0;  // 0: not run

  bool operator==(const PresolverEntry&) const = default;
};

struct PresolverSchedule {
  std::vector<PresolverEntry> entries;  // at most one complete and one local search

  // Entries with a positive cutoff, in run order.
  std::vector<PresolverEntry> active() const;
  bool operator==(const PresolverSchedule&) const = default;
};

struct PresolverCandidates {
  std::vector<std::string> complete;
  std::vector<std::string> local_search;
};

// Top `per_kind` solvers of each kind by validation score when run alone
// with every run capped at 10 s; ties go to the smaller id.
PresolverCandidates select_presolver_candidates(const RuntimeMatrix& validation,
                                                const std::vector<SolverDescriptor>& solvers, const PurseConfig& purse,
                                                const SeriesMap& series, size_t per_kind = 3);

// complete slot (solver x cutoff) x local slot (solver x cutoff) x 2 orders.
// With only one kind present, one slot and one order.
std::vector<PresolverSchedule> enumerate_presolver_configs(const PresolverCandidates& candidates);

// A trained per-solver predictor.
struct SolverModel {
  std::variant<RidgeModel, HierarchicalModel> model;

  double predict(std::span<const double> x) const;
  Target target() const;
  bool operator==(const SolverModel&) const = default;
};

struct PortfolioMember {
  std::string solver_id;
  SolverModel model;

  bool operator==(const PortfolioMember&) const = default;
};

struct PortfolioConfig {
  std::vector<SolverDescriptor> solvers;  // full candidate set
  PresolverSchedule presolvers;
  std::string backup_solver;
  std::vector<PortfolioMember> subset;
  Objective objective = Objective::kMinRuntime;
  HierarchyMode hierarchy = HierarchyMode::kNone;
  double cutoff_seconds = 1200.0;
  ProbeBudget feature_budget;
  uint64_t seed = 0;

  const SolverDescriptor& solver(const std::string& id) const;
  void validate() const;
  bool operator==(const PortfolioConfig&) const = default;
};

// Performance on a validation set, larger is better: minus the average
// runtime (min_runtime) or the competition score (max_score).
double performance_ratio(double found, double optimum, Objective objective);

// Evaluates a subset given as sorted indices into the candidate list.
using SubsetEvaluator = std::function<double(const std::vector<size_t>&)>;

struct SubsetResult {
  std::vector<size_t> subset;  // sorted candidate indices
  double performance = 0.0;
  size_t evaluations = 0;
};

// Every nonempty subset; ties go to smaller subsets, then to the
// lexicographically smaller index list. Throws kTooManySolvers above 12.
SubsetResult subset_search_exhaustive(size_t num_candidates, const SubsetEvaluator& evaluate);

struct LocalSearchOptions {
  int runs = 10;
  int max_stale_steps = 100;
  double accept_worse = 0.05;
};

// Randomized single add/drop iterative improvement with restarts.
SubsetResult subset_search_local(size_t num_candidates, const SubsetEvaluator& evaluate, uint64_t seed,
                                 const LocalSearchOptions& options = {});

// Backup solver: best by objective on validation instances that the
// schedule leaves unsolved and whose features time out; the overall winner
// if there are none. Only `eligible` solvers are considered.
std::string choose_backup(const RuntimeMatrix& validation, const PresolverSchedule& schedule,
                          const std::vector<bool>& feature_timed_out, Objective objective, const PurseConfig& purse,
                          const SeriesMap& series, const std::vector<std::string>& eligible);

// Executes solvers and feature extraction for one instance.
class Runner {
 public:
  virtual ~Runner() = default;
  virtual RunRecord run(const SolverDescriptor& solver, double budget_seconds) = 0;
  virtual FeatureVector features(const ProbeBudget& budget) = 0;
};

// Real child processes and real feature extraction.
class ExternalRunner : public Runner {
 public:
  ExternalRunner(std::string instance_path, std::string instance_id, CnfFormula formula, uint64_t seed);
  RunRecord run(const SolverDescriptor& solver, double budget_seconds) override;
  FeatureVector features(const ProbeBudget& budget) override;

 private:
  std::string path_;
  std::string id_;
  CnfFormula formula_;
  uint64_t seed_;
};

// Replays recorded runtimes and features of one instance.
class SimulatedRunner : public Runner {
 public:
  SimulatedRunner(const RuntimeMatrix& matrix, const FeatureTable& features, std::string instance_id);
  RunRecord run(const SolverDescriptor& solver, double budget_seconds) override;
  FeatureVector features(const ProbeBudget& budget) override;

 private:
  const RuntimeMatrix& matrix_;
  const FeatureTable& features_;
  std::string id_;
};

// Wraps a runner, turning runs of the listed solvers into crashes after
// `crash_after` seconds and optionally forcing a feature timeout.
class FaultInjectingRunner : public Runner {
 public:
  FaultInjectingRunner(Runner& inner, std::set<std::string> crashing, bool feature_timeout, double crash_after = 1.0);
  RunRecord run(const SolverDescriptor& solver, double budget_seconds) override;
  FeatureVector features(const ProbeBudget& budget) override;

 private:
  Runner& inner_;
  std::set<std::string> crashing_;
  bool feature_timeout_;
  double crash_after_;
};

enum class SolveStatus { kSat, kUnsat, kTimeout, kCrashExhausted };

std::string to_string(SolveStatus status);

struct TraceEvent {
  std::string phase;  // presolve, features, predict, run, backup
  std::string solver_id;
  double start_seconds = 0.0;
  double budget_seconds = 0.0;
  double used_seconds = 0.0;
  std::string detail;
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kTimeout;
  std::string chosen_solver;  // "<id>", "presolver:<id>" or "backup:<id>"
  double total_time_seconds = 0.0;
  std::vector<TraceEvent> trace;
};

// Online procedure: pre-solvers, features, prediction, then the selected
// solver with crash fallback to the next best prediction.
SolveOutcome solve(const PortfolioConfig& portfolio, Runner& runner);

// Runtime-matrix record of an outcome, attributed to `solver_id`.
RunRecord outcome_record(const SolveOutcome& outcome, const std::string& solver_id, const std::string& instance_id,
                         double cutoff_seconds);

// Replays the portfolio on every instance of the matrix.
std::vector<SolveOutcome> simulate_portfolio(const PortfolioConfig& portfolio, const RuntimeMatrix& matrix,
                                             const FeatureTable& features);

// Copy of `matrix` with the outcomes as an extra solver column.
RuntimeMatrix with_portfolio_column(const RuntimeMatrix& matrix, const std::vector<SolveOutcome>& outcomes,
                                    const std::string& solver_id);

// Inputs of portfolio construction.
struct PortfolioData {
  std::vector<SolverDescriptor> solvers;
  RuntimeMatrix train;
  RuntimeMatrix validation;
  FeatureTable features;  // covers train and validation instances
  std::map<std::string, std::string> categories;  // instance id -> category (general6)
};

struct PortfolioBuildOptions {
  Objective objective = Objective::kMinRuntime;
  HierarchyMode hierarchy = HierarchyMode::kNone;
  PurseConfig purse;
  SeriesMap series;
  HardnessModelOptions model;
  HierarchicalOptions hierarchical;
  ProbeBudget feature_budget;
  size_t presolver_candidates_per_kind = 3;
  size_t min_training_rows = 10;
  size_t exhaustive_limit = 12;
  LocalSearchOptions local_search;
  uint64_t seed = 0;
  int workers = 1;
};

struct ScheduleResult {
  PresolverSchedule schedule;
  bool rejected = false;
  std::string backup;
  std::vector<std::string> subset;
  double performance = 0.0;
};

struct BuildReport {
  PresolverCandidates candidates;
  std::vector<ScheduleResult> schedules;
  size_t chosen = 0;
  size_t distinct_training_sets = 0;
  std::vector<std::string> warnings;
};

PortfolioConfig build_portfolio(const PortfolioData& data, const PortfolioBuildOptions& options,
                                BuildReport* report = nullptr);

}  // namespace zf

#endif  // ZF_PORTFOLIO_H_
