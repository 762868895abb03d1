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
#include <ctime>

#include "probing.h"

namespace zf {
namespace probing {

namespace {

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

}  // namespace

WorkClock::WorkClock(TimingMode mode, double units_per_second)
    : mode_(mode), units_per_second_(units_per_second) {
  if (mode_ == TimingMode::kWallClock) start_cpu_ = thread_cpu_seconds();
}

double WorkClock::elapsed() const {
  if (mode_ == TimingMode::kStepCount) return static_cast<double>(units_) / units_per_second_;
  return thread_cpu_seconds() - start_cpu_;
}

ClauseDb ClauseDb::build(const CnfFormula& formula, bool drop_tautologies) {
  ClauseDb db;
  db.num_vars = formula.num_vars;
  db.occurrences.resize(2 * (static_cast<size_t>(formula.num_vars) + 1));
  std::vector<int8_t> seen(static_cast<size_t>(formula.num_vars) + 1, 0);
  for (const Clause& clause : formula.clauses) {
    std::vector<Literal> lits;
    bool tautology = false;
    for (Literal lit : clause) {
      int8_t sign = lit.positive() ? 1 : -1;
      int8_t& mark = seen[static_cast<size_t>(lit.var())];
      if (mark == sign) continue;
      if (mark == -sign) tautology = true;
      mark = mark == 0 ? sign : 2;  // 2: both polarities present
      lits.push_back(lit);
    }
    for (Literal lit : clause) seen[static_cast<size_t>(lit.var())] = 0;
    if (tautology && drop_tautologies) continue;
    const auto cid = static_cast<uint32_t>(db.clauses.size());
    for (Literal lit : lits) db.occurrences[lit_code(lit)].push_back(cid);
    db.clauses.push_back(std::move(lits));
  }
  return db;
}

int64_t ClauseDb::total_literals() const {
  int64_t total = 0;
  for (const auto& c : clauses) total += static_cast<int64_t>(c.size());
  return total;
}

Propagator::Propagator(const ClauseDb& db) : db_(db) { reset(); }

void Propagator::reset() {
  const auto n = static_cast<size_t>(db_.num_vars);
  values_.assign(n + 1, Value::kUnassigned);
  num_true_.assign(db_.clauses.size(), 0);
  num_false_.assign(db_.clauses.size(), 0);
  pending_.clear();
  unassigned_.resize(n);
  unassigned_pos_.assign(n + 1, 0);
  for (size_t v = 1; v <= n; ++v) {
    unassigned_[v - 1] = static_cast<int32_t>(v);
    unassigned_pos_[v] = v - 1;
  }
  satisfied_ = 0;
  conflict_ = false;
  work_ += static_cast<int64_t>(n + db_.clauses.size());
  for (uint32_t c = 0; c < db_.clauses.size(); ++c) {
    if (db_.clauses[c].size() == 1) pending_.push_back(c);
  }
}

bool Propagator::lit_true(Literal lit) const {
  Value v = values_[static_cast<size_t>(lit.var())];
  return lit.positive() ? v == Value::kTrue : v == Value::kFalse;
}

bool Propagator::lit_false(Literal lit) const {
  Value v = values_[static_cast<size_t>(lit.var())];
  return lit.positive() ? v == Value::kFalse : v == Value::kTrue;
}

void Propagator::set(Literal lit) {
  const auto var = static_cast<size_t>(lit.var());
  values_[var] = lit.positive() ? Value::kTrue : Value::kFalse;
  // Swap-remove from the unassigned pool.
  size_t pos = unassigned_pos_[var];
  int32_t last = unassigned_.back();
  unassigned_[pos] = last;
  unassigned_pos_[static_cast<size_t>(last)] = pos;
  unassigned_.pop_back();

  for (uint32_t c : db_.occurrences[lit_code(lit)]) {
    if (num_true_[c]++ == 0) ++satisfied_;
  }
  for (uint32_t c : db_.occurrences[lit_code(-lit)]) {
    const auto len = static_cast<int32_t>(db_.clauses[c].size());
    ++num_false_[c];
    if (num_true_[c] > 0) continue;
    if (num_false_[c] == len) {
      conflict_ = true;
    } else if (num_false_[c] == len - 1) {
      pending_.push_back(c);
    }
  }
  work_ += static_cast<int64_t>(db_.occurrences[lit_code(lit)].size() + db_.occurrences[lit_code(-lit)].size());
}

bool Propagator::assign(Literal lit) {
  if (lit_false(lit)) {
    conflict_ = true;
    return false;
  }
  if (!lit_true(lit)) set(lit);
  return !conflict_;
}

int64_t Propagator::propagate() {
  int64_t forced = 0;
  while (!conflict_ && !pending_.empty()) {
    uint32_t c = pending_.back();
    pending_.pop_back();
    if (num_true_[c] > 0) continue;
    const auto& lits = db_.clauses[c];
    work_ += static_cast<int64_t>(lits.size());
    for (Literal lit : lits) {
      if (values_[static_cast<size_t>(lit.var())] == Value::kUnassigned) {
        set(lit);
        ++forced;
        break;
      }
    }
  }
  pending_.clear();
  return forced;
}

namespace {

constexpr std::array<int, 5> kProbeDepths = {1, 4, 16, 64, 256};

// log2(mean_p (2^(d_p + 1) - 1)) computed without overflow.
double log2_mean_node_estimate(const std::vector<int64_t>& depths) {
  if (depths.empty()) return 0.0;
  int64_t top = *std::max_element(depths.begin(), depths.end()) + 1;
  double scaled = 0.0;
  for (int64_t d : depths) {
    scaled += std::exp2(static_cast<double>(d + 1 - top)) - std::exp2(static_cast<double>(-top));
  }
  double result = static_cast<double>(top) + std::log2(scaled) - std::log2(static_cast<double>(depths.size()));
  return std::max(0.0, result);
}

}  // namespace

DpllProbeFeatures run_dpll_probes(const ClauseDb& db, int num_probes, WorkClock& clock, double deadline,
                                  Rng& rng) {
  DpllProbeFeatures out;
  Propagator prop(db);
  std::array<double, 5> prop_sums{};
  double depth_sum = 0.0;
  std::vector<int64_t> depths;

  for (int probe = 0; probe < num_probes; ++probe) {
    if (clock.elapsed() >= deadline) break;
    int64_t work_before = prop.work();
    prop.reset();
    int64_t props = prop.propagate();
    int64_t depth = 0;
    std::array<double, 5> at_depth{};
    size_t next = 0;
    bool aborted = false;

    while (!prop.conflict() && !prop.all_satisfied() && !prop.unassigned().empty()) {
      const auto& pool = prop.unassigned();
      std::uniform_int_distribution<size_t> pick(0, pool.size() - 1);
      int32_t var = pool[pick(rng)];
      bool positive = std::bernoulli_distribution(0.5)(rng);
      ++depth;
      prop.assign(Literal(positive ? var : -var));
      props += prop.propagate();
      while (next < kProbeDepths.size() && kProbeDepths[next] <= depth) {
        at_depth[next++] = static_cast<double>(props);
      }
      clock.charge(prop.work() - work_before);
      work_before = prop.work();
      if (clock.elapsed() >= deadline) {
        aborted = true;
        break;
      }
    }
    clock.charge(prop.work() - work_before);
    if (aborted) break;
    for (; next < kProbeDepths.size(); ++next) at_depth[next] = static_cast<double>(props);
    for (size_t i = 0; i < prop_sums.size(); ++i) prop_sums[i] += at_depth[i];
    depth_sum += static_cast<double>(depth);
    depths.push_back(depth);
    ++out.completed_probes;
  }

  if (out.completed_probes > 0) {
    const double n = out.completed_probes;
    for (size_t i = 0; i < prop_sums.size(); ++i) out.unit_props[i] = prop_sums[i] / n;
    out.mean_depth_to_contradiction = depth_sum / n;
    out.log_nodes_estimate = log2_mean_node_estimate(depths);
  }
  return out;
}

}  // namespace probing

PropagationResult unit_propagate(const CnfFormula& formula, Assignment assignment) {
  probing::ClauseDb db = probing::ClauseDb::build(formula, /*drop_tautologies=*/false);
  probing::Propagator prop(db);
  for (int32_t v = 1; v <= formula.num_vars && v <= assignment.num_vars(); ++v) {
    Value value = assignment[v];
    if (value == Value::kUnassigned) continue;
    prop.assign(Literal(value == Value::kTrue ? v : -v));
  }
  PropagationResult result;
  result.propagation_count = prop.propagate();
  result.conflict = prop.conflict();
  result.assignment = Assignment(formula.num_vars);
  for (int32_t v = 1; v <= formula.num_vars; ++v) result.assignment[v] = prop.value(v);
  return result;
}

DpllProbeFeatures dpll_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed,
                             int num_probes) {
  probing::ClauseDb db = probing::ClauseDb::build(formula, false);
  probing::WorkClock clock(budget.mode, budget.work_units_per_second);
  probing::Rng rng(seed);
  return probing::run_dpll_probes(db, num_probes, clock, budget.per_probe_seconds, rng);
}

DpllProbeFeatures dpll_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed) {
  return dpll_probe(formula, budget, seed, budget.dpll_probe_runs);
}

}  // namespace zf
