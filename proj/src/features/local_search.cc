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
#include <cmath>
#include <numeric>

#include "probing.h"
#include "stats.h"

namespace zf {
namespace probing {

namespace {

// Clause-weighted flip state shared by SAPS and GSAT. Scores hold the
// weighted decrease in unsatisfied weight obtained by flipping a variable.
class FlipState {
 public:
  explicit FlipState(const ClauseDb& db)
      : db_(db),
        var_clauses_(static_cast<size_t>(db.num_vars) + 1),
        truth_(static_cast<size_t>(db.num_vars) + 1, false),
        true_count_(db.clauses.size(), 0),
        weight_(db.clauses.size(), 1.0),
        score_(static_cast<size_t>(db.num_vars) + 1, 0.0),
        unsat_pos_(db.clauses.size(), kAbsent) {
    for (uint32_t c = 0; c < db.clauses.size(); ++c) {
      for (Literal lit : db.clauses[c]) var_clauses_[static_cast<size_t>(lit.var())].push_back(c);
    }
  }

  void randomize(Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    for (size_t v = 1; v < truth_.size(); ++v) truth_[v] = coin(rng);
    std::fill(weight_.begin(), weight_.end(), 1.0);
    weight_sum_ = static_cast<double>(weight_.size());
    recompute();
  }

  void recompute() {
    std::fill(score_.begin(), score_.end(), 0.0);
    unsat_.clear();
    std::fill(unsat_pos_.begin(), unsat_pos_.end(), kAbsent);
    for (uint32_t c = 0; c < db_.clauses.size(); ++c) {
      int32_t count = 0;
      for (Literal lit : db_.clauses[c]) count += is_true(lit) ? 1 : 0;
      true_count_[c] = count;
      if (count == 0) add_unsat(c);
      apply(c, +1.0);
    }
    work_ += db_.total_literals();
  }

  void flip(int32_t var) {
    const auto& clauses = var_clauses_[static_cast<size_t>(var)];
    for (uint32_t c : clauses) apply(c, -1.0);
    truth_[static_cast<size_t>(var)] = !truth_[static_cast<size_t>(var)];
    for (uint32_t c : clauses) {
      bool now_true = false;
      for (Literal lit : db_.clauses[c]) {
        if (lit.var() == var) {
          now_true = is_true(lit);
          break;
        }
      }
      int32_t before = true_count_[c];
      true_count_[c] += now_true ? 1 : -1;
      if (before == 0) remove_unsat(c);
      if (true_count_[c] == 0) add_unsat(c);
      apply(c, +1.0);
    }
    work_ += static_cast<int64_t>(clauses.size()) * 3;
  }

  // Multiplies the weight of every unsatisfied clause by factor.
  void scale_unsat(double factor) {
    for (uint32_t c : unsat_) {
      apply(c, -1.0);
      weight_sum_ += weight_[c] * (factor - 1.0);
      weight_[c] *= factor;
      apply(c, +1.0);
    }
    work_ += static_cast<int64_t>(unsat_.size());
  }

  void smooth(double rho) {
    if (weight_.empty()) return;
    double mean = std::accumulate(weight_.begin(), weight_.end(), 0.0) / static_cast<double>(weight_.size());
    double norm = mean > 1e50 ? 1.0 / mean : 1.0;
    for (double& w : weight_) w = norm * (rho * w + (1.0 - rho) * mean);
    weight_sum_ = std::accumulate(weight_.begin(), weight_.end(), 0.0);
    recompute_scores();
  }

  // Renormalizes weights before they can overflow.
  void guard_weights() {
    double top = 0.0;
    for (uint32_t c : unsat_) top = std::max(top, weight_[c]);
    if (top < 1e100) return;
    double mean = std::accumulate(weight_.begin(), weight_.end(), 0.0) / static_cast<double>(weight_.size());
    for (double& w : weight_) w /= mean;
    weight_sum_ = std::accumulate(weight_.begin(), weight_.end(), 0.0);
    recompute_scores();
  }

  size_t num_unsat() const { return unsat_.size(); }
  const std::vector<uint32_t>& unsat() const { return unsat_; }
  const std::vector<Literal>& clause(uint32_t c) const { return db_.clauses[c]; }
  double score(int32_t var) const { return score_[static_cast<size_t>(var)]; }
  double mean_weight() const {
    return weight_.empty() ? 1.0 : weight_sum_ / static_cast<double>(weight_.size());
  }
  int32_t num_vars() const { return db_.num_vars; }
  int64_t work() const { return work_; }
  void charge(int64_t units) { work_ += units; }

 private:
  static constexpr size_t kAbsent = SIZE_MAX;

  bool is_true(Literal lit) const { return truth_[static_cast<size_t>(lit.var())] == lit.positive(); }

  void apply(uint32_t c, double sign) {
    const double w = sign * weight_[c];
    if (true_count_[c] == 0) {
      for (Literal lit : db_.clauses[c]) score_[static_cast<size_t>(lit.var())] += w;
    } else if (true_count_[c] == 1) {
      for (Literal lit : db_.clauses[c]) {
        if (is_true(lit)) {
          score_[static_cast<size_t>(lit.var())] -= w;
          break;
        }
      }
    }
  }

  void recompute_scores() {
    std::fill(score_.begin(), score_.end(), 0.0);
    for (uint32_t c = 0; c < db_.clauses.size(); ++c) apply(c, +1.0);
    work_ += db_.total_literals();
  }

  void add_unsat(uint32_t c) {
    unsat_pos_[c] = unsat_.size();
    unsat_.push_back(c);
  }

  void remove_unsat(uint32_t c) {
    size_t pos = unsat_pos_[c];
    uint32_t last = unsat_.back();
    unsat_[pos] = last;
    unsat_pos_[last] = pos;
    unsat_.pop_back();
    unsat_pos_[c] = kAbsent;
  }

  const ClauseDb& db_;
  std::vector<std::vector<uint32_t>> var_clauses_;
  std::vector<bool> truth_;
  std::vector<int32_t> true_count_;
  std::vector<double> weight_;
  std::vector<double> score_;
  std::vector<uint32_t> unsat_;
  std::vector<size_t> unsat_pos_;
  double weight_sum_ = 0.0;
  int64_t work_ = 0;
};

// Per-run trajectory summary common to both probes.
struct RunTrace {
  size_t initial_unsat = 0;
  size_t best_unsat = 0;
  int64_t best_step = 0;
  bool saw_local_min = false;
  size_t first_lm_unsat = 0;
  std::vector<double> lm_unsat;

  void start(size_t unsat) {
    initial_unsat = best_unsat = unsat;
    best_step = 0;
  }

  void observe(size_t unsat, int64_t step) {
    if (unsat < best_unsat) {
      best_unsat = unsat;
      best_step = step;
    }
  }

  void local_min(size_t unsat) {
    if (!saw_local_min) {
      saw_local_min = true;
      first_lm_unsat = unsat;
    }
    lm_unsat.push_back(static_cast<double>(unsat));
  }

  // A run that never stalls credits all of its improvement to the first minimum.
  double first_lm_ratio() const {
    if (initial_unsat <= best_unsat) return 1.0;
    size_t first = saw_local_min ? first_lm_unsat : best_unsat;
    return static_cast<double>(initial_unsat - std::max(first, best_unsat)) /
           static_cast<double>(initial_unsat - best_unsat);
  }

  double avg_improvement() const {
    if (best_step == 0) return 0.0;
    return static_cast<double>(initial_unsat - best_unsat) / static_cast<double>(best_step);
  }

  double lm_cv() const {
    stats::Summary s = stats::summarize(lm_unsat);
    return s.coeff;
  }
};

int64_t steps_per_run(const ProbeBudget& budget) {
  return std::max<int64_t>(1, budget.max_ls_steps / std::max(1, budget.ls_probe_runs));
}

// Picks uniformly among the best-scoring candidates.
template <typename Candidates>
int32_t argmax_score(const FlipState& state, const Candidates& candidates, double tolerance, Rng& rng,
                     double& best_score) {
  best_score = -std::numeric_limits<double>::infinity();
  int32_t chosen = 0;
  size_t ties = 0;
  for (int32_t v : candidates) {
    double s = state.score(v);
    if (s > best_score + tolerance) {
      best_score = s;
      chosen = v;
      ties = 1;
    } else if (s >= best_score - tolerance) {
      // Reservoir sampling over ties.
      ++ties;
      if (std::uniform_int_distribution<size_t>(0, ties - 1)(rng) == 0) chosen = v;
    }
  }
  return chosen;
}

}  // namespace

SapsProbeFeatures run_saps(const ClauseDb& db, const ProbeBudget& budget, const SapsParams& params,
                           WorkClock& clock, double deadline, Rng& rng) {
  SapsProbeFeatures out;
  FlipState state(db);
  const int64_t max_steps = steps_per_run(budget);
  std::vector<double> best_steps;
  double improvement_sum = 0.0;
  double first_lm_sum = 0.0;
  double cv_sum = 0.0;
  std::vector<int32_t> candidates;
  std::vector<uint32_t> stamp(static_cast<size_t>(db.num_vars) + 1, 0);
  uint32_t epoch = 0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  for (int run = 0; run < budget.ls_probe_runs; ++run) {
    if (clock.elapsed() >= deadline) break;
    int64_t charged = state.work();
    state.randomize(rng);
    RunTrace trace;
    trace.start(state.num_unsat());
    bool aborted = false;

    for (int64_t step = 1; step <= max_steps && state.num_unsat() > 0; ++step) {
      candidates.clear();
      ++epoch;
      for (uint32_t c : state.unsat()) {
        for (Literal lit : state.clause(c)) {
          auto v = static_cast<size_t>(lit.var());
          if (stamp[v] != epoch) {
            stamp[v] = epoch;
            candidates.push_back(lit.var());
          }
        }
      }
      state.charge(static_cast<int64_t>(candidates.size()));
      double best = 0.0;
      int32_t var = argmax_score(state, candidates, 1e-12 * state.mean_weight(), rng, best);
      if (best > 1e-9 * state.mean_weight()) {
        state.flip(var);
      } else {
        trace.local_min(state.num_unsat());
        if (unit(rng) < params.walk_probability && db.num_vars > 0) {
          state.flip(std::uniform_int_distribution<int32_t>(1, db.num_vars)(rng));
        } else {
          state.scale_unsat(params.alpha);
          if (unit(rng) < params.smooth_probability) state.smooth(params.rho);
          state.guard_weights();
        }
      }
      trace.observe(state.num_unsat(), step);
      clock.charge(state.work() - charged);
      charged = state.work();
      if (clock.elapsed() >= deadline) {
        aborted = true;
        break;
      }
    }
    clock.charge(state.work() - charged);
    if (aborted) break;
    best_steps.push_back(static_cast<double>(trace.best_step));
    improvement_sum += trace.avg_improvement();
    first_lm_sum += trace.first_lm_ratio();
    cv_sum += trace.lm_cv();
    ++out.completed_runs;
  }

  if (out.completed_runs > 0) {
    const double n = out.completed_runs;
    out.best_step_mean = std::accumulate(best_steps.begin(), best_steps.end(), 0.0) / n;
    out.best_step_median = stats::quantile(best_steps, 0.5);
    out.best_step_q10 = stats::quantile(best_steps, 0.1);
    out.best_step_q90 = stats::quantile(best_steps, 0.9);
    out.avg_improvement = improvement_sum / n;
    out.first_lm_ratio = first_lm_sum / n;
    out.lm_unsat_cv = cv_sum / n;
  }
  return out;
}

GsatProbeFeatures run_gsat(const ClauseDb& db, const ProbeBudget& budget, WorkClock& clock, double deadline,
                           Rng& rng) {
  GsatProbeFeatures out;
  FlipState state(db);
  const int64_t max_steps = steps_per_run(budget);
  const int64_t stagnation_limit = std::max<int64_t>(50, db.num_vars);
  std::vector<int32_t> all_vars(static_cast<size_t>(std::max(db.num_vars, 0)));
  std::iota(all_vars.begin(), all_vars.end(), 1);
  double first_lm_sum = 0.0;

  for (int run = 0; run < budget.ls_probe_runs; ++run) {
    if (clock.elapsed() >= deadline) break;
    int64_t charged = state.work();
    state.randomize(rng);
    RunTrace trace;
    trace.start(state.num_unsat());
    size_t try_best = state.num_unsat();
    int64_t since_improvement = 0;
    bool aborted = false;

    for (int64_t step = 1; step <= max_steps && state.num_unsat() > 0 && !all_vars.empty(); ++step) {
      state.charge(static_cast<int64_t>(all_vars.size()));
      double best = 0.0;
      int32_t var = argmax_score(state, all_vars, 1e-12, rng, best);
      if (best <= 0.0) trace.local_min(state.num_unsat());
      state.flip(var);
      trace.observe(state.num_unsat(), step);
      if (state.num_unsat() < try_best) {
        try_best = state.num_unsat();
        since_improvement = 0;
      } else if (++since_improvement >= stagnation_limit) {
        state.randomize(rng);
        try_best = state.num_unsat();
        since_improvement = 0;
        trace.observe(state.num_unsat(), step);
      }
      clock.charge(state.work() - charged);
      charged = state.work();
      if (clock.elapsed() >= deadline) {
        aborted = true;
        break;
      }
    }
    clock.charge(state.work() - charged);
    if (aborted) break;
    first_lm_sum += trace.first_lm_ratio();
    ++out.completed_runs;
  }

  if (out.completed_runs > 0) out.first_lm_ratio = first_lm_sum / out.completed_runs;
  return out;
}

}  // namespace probing

SapsProbeFeatures saps_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed,
                             const SapsParams& params) {
  probing::ClauseDb db = probing::ClauseDb::build(formula, /*drop_tautologies=*/true);
  probing::WorkClock clock(budget.mode, budget.work_units_per_second);
  probing::Rng rng(seed);
  return probing::run_saps(db, budget, params, clock, budget.per_probe_seconds, rng);
}

GsatProbeFeatures gsat_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed) {
  probing::ClauseDb db = probing::ClauseDb::build(formula, /*drop_tautologies=*/true);
  probing::WorkClock clock(budget.mode, budget.work_units_per_second);
  probing::Rng rng(seed);
  return probing::run_gsat(db, budget, clock, budget.per_probe_seconds, rng);
}

}  // namespace zf
