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

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

#include "zf/portfolio.h"

namespace zf {

namespace {

using Kind = PortfolioError::Kind;

// Seconds a run actually consumed out of its budget.
double consumed(const RunRecord& r, double budget) {
  if (r.status == RunStatus::kTimeout) return budget;
  return std::clamp(r.runtime_seconds, 0.0, budget);
}

bool solved_within(const RunRecord& r, double budget) {
  return is_solved(r.status) && r.runtime_seconds <= budget;
}

SolveStatus status_of(const RunRecord& r) {
  return r.status == RunStatus::kSat ? SolveStatus::kSat : SolveStatus::kUnsat;
}

}  // namespace

double SolverModel::predict(std::span<const double> x) const {
  if (const auto* ridge = std::get_if<RidgeModel>(&model)) return ridge_predict(*ridge, x);
  return predict_hier(std::get<HierarchicalModel>(model), x);
}

Target SolverModel::target() const {
  if (const auto* ridge = std::get_if<RidgeModel>(&model)) return ridge->target;
  return std::get<HierarchicalModel>(model).target();
}

const SolverDescriptor& PortfolioConfig::solver(const std::string& id) const {
  for (const auto& d : solvers) {
    if (d.id == id) return d;
  }
  throw PortfolioError(Kind::kInvalidConfig, "unknown solver " + id);
}

void PortfolioConfig::validate() const {
  for (size_t a = 0; a < solvers.size(); ++a) {
    for (size_t b = a + 1; b < solvers.size(); ++b) {
      if (solvers[a].id == solvers[b].id) throw PortfolioError(Kind::kInvalidConfig, "duplicate solver " + solvers[a].id);
    }
  }
  if (subset.empty()) throw PortfolioError(Kind::kInvalidConfig, "empty solver subset");
  if (!(cutoff_seconds > 0.0)) throw PortfolioError(Kind::kInvalidConfig, "cutoff must be positive");
  solver(backup_solver);
  const Target expected = objective == Objective::kMinRuntime ? Target::kLogRuntime : Target::kScore;
  for (size_t a = 0; a < subset.size(); ++a) {
    solver(subset[a].solver_id);
    if (subset[a].model.target() != expected) {
      throw PortfolioError(Kind::kInvalidConfig, "model of " + subset[a].solver_id + " has the wrong target");
    }
    for (size_t b = a + 1; b < subset.size(); ++b) {
      if (subset[a].solver_id == subset[b].solver_id) {
        throw PortfolioError(Kind::kInvalidConfig, "solver " + subset[a].solver_id + " has two models");
      }
    }
  }
  if (presolvers.entries.size() > 2) throw PortfolioError(Kind::kInvalidConfig, "more than two pre-solvers");
  int complete = 0, local = 0;
  for (const auto& e : presolvers.entries) {
    const SolverDescriptor& d = solver(e.solver_id);
    (d.kind == SolverKind::kLocalSearch ? local : complete)++;
    if (std::find(std::begin(kPresolverCutoffs), std::end(kPresolverCutoffs), e.cutoff_seconds) ==
        std::end(kPresolverCutoffs)) {
      throw PortfolioError(Kind::kInvalidConfig, "pre-solver cutoff must be 0, 2, 5 or 10");
    }
  }
  if (complete > 1 || local > 1) throw PortfolioError(Kind::kInvalidConfig, "at most one pre-solver per kind");
}

std::string to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kSat:
      return "sat";
    case SolveStatus::kUnsat:
      return "unsat";
    case SolveStatus::kTimeout:
      return "timeout";
    default:
      return "crash_exhausted";
  }
}

ExternalRunner::ExternalRunner(std::string instance_path, std::string instance_id, CnfFormula formula, uint64_t seed)
    : path_(std::move(instance_path)), id_(std::move(instance_id)), formula_(std::move(formula)), seed_(seed) {}

RunRecord ExternalRunner::run(const SolverDescriptor& solver, double budget_seconds) {
  return run_external(solver, path_, id_, budget_seconds);
}

FeatureVector ExternalRunner::features(const ProbeBudget& budget) { return extract_all(formula_, budget, seed_); }

SimulatedRunner::SimulatedRunner(const RuntimeMatrix& matrix, const FeatureTable& features, std::string instance_id)
    : matrix_(matrix), features_(features), id_(std::move(instance_id)) {}

RunRecord SimulatedRunner::run(const SolverDescriptor& solver, double budget_seconds) {
  const RunRecord& r = matrix_.at(matrix_.solver_index(solver.id), matrix_.instance_index(id_));
  if ((is_solved(r.status) || r.status == RunStatus::kCrash) && r.runtime_seconds <= budget_seconds) {
    return make_record(solver.id, id_, r.runtime_seconds, r.status, budget_seconds);
  }
  return make_record(solver.id, id_, budget_seconds, RunStatus::kTimeout, budget_seconds);
}

FeatureVector SimulatedRunner::features(const ProbeBudget& budget) {
  FeatureVector fv = features_.at(id_);
  if (fv.feature_time_seconds > budget.total_seconds) {
    fv.values.reset();
    fv.timed_out = true;
    fv.feature_time_seconds = budget.total_seconds;
  }
  return fv;
}

FaultInjectingRunner::FaultInjectingRunner(Runner& inner, std::set<std::string> crashing, bool feature_timeout,
                                           double crash_after)
    : inner_(inner), crashing_(std::move(crashing)), feature_timeout_(feature_timeout), crash_after_(crash_after) {}

RunRecord FaultInjectingRunner::run(const SolverDescriptor& solver, double budget_seconds) {
  RunRecord r = inner_.run(solver, budget_seconds);
  if (crashing_.count(solver.id) && crash_after_ < budget_seconds) {
    return make_record(r.solver_id, r.instance_id, crash_after_, RunStatus::kCrash, budget_seconds);
  }
  return r;
}

FeatureVector FaultInjectingRunner::features(const ProbeBudget& budget) {
  if (!feature_timeout_) return inner_.features(budget);
  FeatureVector fv;
  fv.timed_out = true;
  fv.feature_time_seconds = budget.total_seconds;
  return fv;
}

SolveOutcome solve(const PortfolioConfig& portfolio, Runner& runner) {
  SolveOutcome out;
  const double cutoff = portfolio.cutoff_seconds;
  double elapsed = 0.0;
  auto remaining = [&] { return cutoff - elapsed; };
  auto finish = [&](SolveStatus status, std::string chosen) {
    out.status = status;
    out.chosen_solver = std::move(chosen);
    out.total_time_seconds = std::min(elapsed, cutoff);
    return out;
  };

  for (const auto& entry : portfolio.presolvers.active()) {
    if (remaining() <= 0.0) break;
    const double budget = std::min(entry.cutoff_seconds, remaining());
    RunRecord r = runner.run(portfolio.solver(entry.solver_id), budget);
    const double used = consumed(r, budget);
    out.trace.push_back({"presolve", entry.solver_id, elapsed, budget, used, to_string(r.status)});
    elapsed += used;
    if (solved_within(r, budget)) return finish(status_of(r), "presolver:" + entry.solver_id);
  }
  if (remaining() <= 0.0) return finish(SolveStatus::kTimeout, "");

  ProbeBudget fb = portfolio.feature_budget;
  fb.total_seconds = std::min(fb.total_seconds, remaining());
  FeatureVector fv;
  std::string feature_detail;
  try {
    fv = runner.features(fb);
    feature_detail = fv.timed_out ? "timed_out" : "ok";
  } catch (const std::exception& e) {
    fv = FeatureVector{};
    fv.timed_out = true;
    feature_detail = std::string("error: ") + e.what();
  }
  const double feature_used = std::clamp(fv.feature_time_seconds, 0.0, remaining());
  out.trace.push_back({"features", "", elapsed, fb.total_seconds, feature_used, feature_detail});
  elapsed += feature_used;
  if (remaining() <= 0.0) return finish(SolveStatus::kTimeout, "");

  if (fv.timed_out || !fv.values) {
    const double budget = remaining();
    RunRecord r = runner.run(portfolio.solver(portfolio.backup_solver), budget);
    const double used = consumed(r, budget);
    out.trace.push_back({"backup", portfolio.backup_solver, elapsed, budget, used, to_string(r.status)});
    elapsed += used;
    const std::string chosen = "backup:" + portfolio.backup_solver;
    if (solved_within(r, budget)) return finish(status_of(r), chosen);
    return finish(r.status == RunStatus::kCrash ? SolveStatus::kCrashExhausted : SolveStatus::kTimeout, chosen);
  }

  // Rank the subset by predicted objective; ties to the smaller id.
  std::vector<std::pair<double, std::string>> ranked;
  std::ostringstream predictions;
  predictions << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& member : portfolio.subset) {
    double p = member.model.predict(*fv.values);
    ranked.emplace_back(portfolio.objective == Objective::kMinRuntime ? p : -p, member.solver_id);
    predictions << (predictions.tellp() > 0 ? ";" : "") << member.solver_id << '=' << p;
  }
  std::sort(ranked.begin(), ranked.end());
  out.trace.push_back({"predict", "", elapsed, 0.0, 0.0, predictions.str()});

  std::string last;
  for (const auto& [score, id] : ranked) {
    if (remaining() <= 0.0) return finish(SolveStatus::kTimeout, last);
    const double budget = remaining();
    RunRecord r = runner.run(portfolio.solver(id), budget);
    const double used = consumed(r, budget);
    out.trace.push_back({"run", id, elapsed, budget, used, to_string(r.status)});
    elapsed += used;
    last = id;
    if (solved_within(r, budget)) return finish(status_of(r), id);
    if (r.status != RunStatus::kCrash) return finish(SolveStatus::kTimeout, id);
  }
  return finish(SolveStatus::kCrashExhausted, last);
}

RunRecord outcome_record(const SolveOutcome& outcome, const std::string& solver_id, const std::string& instance_id,
                         double cutoff_seconds) {
  RunStatus status = RunStatus::kTimeout;
  switch (outcome.status) {
    case SolveStatus::kSat:
      status = RunStatus::kSat;
      break;
    case SolveStatus::kUnsat:
      status = RunStatus::kUnsat;
      break;
    case SolveStatus::kCrashExhausted:
      status = RunStatus::kCrash;
      break;
    case SolveStatus::kTimeout:
      break;
  }
  return make_record(solver_id, instance_id, outcome.total_time_seconds, status, cutoff_seconds);
}

std::vector<SolveOutcome> simulate_portfolio(const PortfolioConfig& portfolio, const RuntimeMatrix& matrix,
                                             const FeatureTable& features) {
  std::vector<SolveOutcome> out;
  out.reserve(matrix.num_instances());
  for (const auto& id : matrix.instances()) {
    SimulatedRunner runner(matrix, features, id);
    out.push_back(solve(portfolio, runner));
  }
  return out;
}

RuntimeMatrix with_portfolio_column(const RuntimeMatrix& matrix, const std::vector<SolveOutcome>& outcomes,
                                    const std::string& solver_id) {
  if (outcomes.size() != matrix.num_instances()) {
    throw PortfolioError(Kind::kInvalidConfig, "one outcome per instance expected");
  }
  RuntimeMatrix out = matrix;
  const size_t col = out.add_solver(solver_id);
  for (size_t i = 0; i < outcomes.size(); ++i) {
    out.set(col, i, outcome_record(outcomes[i], solver_id, matrix.instances()[i], matrix.cutoff()));
  }
  return out;
}

}  // namespace zf
