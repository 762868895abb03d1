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
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "zf/portfolio.h"

namespace zf {

namespace {

using Kind = PortfolioError::Kind;

constexpr double kPresolverCap = 10.0;

// Validation score of a solver running alone with every run capped.
double capped_alone_score(const RuntimeMatrix& m, size_t s, const PurseConfig& purse, const SeriesMap& series) {
  std::set<std::string> series_hit;
  double total = 0.0;
  for (size_t i = 0; i < m.num_instances(); ++i) {
    if (!m.has(s, i)) continue;
    const RunRecord& r = m.at(s, i);
    if (!is_solved(r.status) || r.runtime_seconds > kPresolverCap || r.runtime_seconds > purse.time_limit) continue;
    total += purse.solution_purse + purse.speed_purse;
    auto it = series.find(m.instances()[i]);
    series_hit.insert(it == series.end() ? m.instances()[i] : it->second);
  }
  return total + purse.series_purse * static_cast<double>(series_hit.size());
}

// Better performance first; ties to the smaller subset, then lexicographic.
bool better_subset(double perf, const std::vector<size_t>& subset, double best_perf, const std::vector<size_t>& best) {
  if (perf != best_perf) return perf > best_perf;
  if (subset.size() != best.size()) return subset.size() < best.size();
  return subset < best;
}

std::vector<size_t> indices_of(const std::vector<bool>& mask) {
  std::vector<size_t> out;
  for (size_t k = 0; k < mask.size(); ++k) {
    if (mask[k]) out.push_back(k);
  }
  return out;
}

}  // namespace

std::string to_string(Objective objective) { return objective == Objective::kMaxScore ? "max_score" : "min_runtime"; }

Objective objective_from_string(const std::string& name) {
  if (name == "runtime" || name == "min_runtime") return Objective::kMinRuntime;
  if (name == "score" || name == "max_score") return Objective::kMaxScore;
  throw PortfolioError(Kind::kInvalidConfig, "unknown objective '" + name + "'");
}

std::string to_string(HierarchyMode mode) {
  switch (mode) {
    case HierarchyMode::kSat2:
      return "sat2";
    case HierarchyMode::kGeneral6:
      return "general6";
    default:
      return "none";
  }
}

HierarchyMode hierarchy_mode_from_string(const std::string& name) {
  if (name == "none") return HierarchyMode::kNone;
  if (name == "sat2") return HierarchyMode::kSat2;
  if (name == "general6") return HierarchyMode::kGeneral6;
  throw PortfolioError(Kind::kInvalidConfig, "unknown hierarchy '" + name + "'");
}

std::vector<PresolverEntry> PresolverSchedule::active() const {
  std::vector<PresolverEntry> out;
  for (const auto& e : entries) {
    if (e.cutoff_seconds > 0.0) out.push_back(e);
  }
  return out;
}

PresolverCandidates select_presolver_candidates(const RuntimeMatrix& validation,
                                                const std::vector<SolverDescriptor>& solvers, const PurseConfig& purse,
                                                const SeriesMap& series, size_t per_kind) {
  std::vector<std::pair<double, std::string>> complete, local;
  for (const auto& d : solvers) {
    auto s = validation.find_solver(d.id);
    if (!s) continue;
    double score = capped_alone_score(validation, *s, purse, series);
    (d.kind == SolverKind::kLocalSearch ? local : complete).emplace_back(score, d.id);
  }
  auto top = [per_kind](std::vector<std::pair<double, std::string>>& ranked) {
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::vector<std::string> out;
    for (size_t k = 0; k < ranked.size() && k < per_kind; ++k) out.push_back(ranked[k].second);
    return out;
  };
  return PresolverCandidates{top(complete), top(local)};
}

std::vector<PresolverSchedule> enumerate_presolver_configs(const PresolverCandidates& candidates) {
  std::vector<PresolverEntry> complete_slot, local_slot;
  for (const auto& id : candidates.complete) {
    for (double c : kPresolverCutoffs) complete_slot.push_back({id, c});
  }
  for (const auto& id : candidates.local_search) {
    for (double c : kPresolverCutoffs) local_slot.push_back({id, c});
  }
  std::vector<PresolverSchedule> out;
  if (complete_slot.empty() || local_slot.empty()) {
    for (const auto& e : complete_slot.empty() ? local_slot : complete_slot) out.push_back(PresolverSchedule{{e}});
    if (out.empty()) out.emplace_back();
    return out;
  }
  for (const auto& c : complete_slot) {
    for (const auto& l : local_slot) {
      out.push_back(PresolverSchedule{{c, l}});
      out.push_back(PresolverSchedule{{l, c}});
    }
  }
  return out;
}

double performance_ratio(double found, double optimum, Objective objective) {
  if (objective == Objective::kMinRuntime) {
    // Values are negated average runtimes.
    return found == 0.0 ? 1.0 : optimum / found;
  }
  return optimum == 0.0 ? 1.0 : found / optimum;
}

SubsetResult subset_search_exhaustive(size_t num_candidates, const SubsetEvaluator& evaluate) {
  if (num_candidates > 12) {
    throw PortfolioError(Kind::kTooManySolvers, std::to_string(num_candidates) + " solvers exceed the exhaustive limit");
  }
  if (num_candidates == 0) throw PortfolioError(Kind::kInvalidConfig, "no candidate solvers");
  SubsetResult best;
  best.performance = -std::numeric_limits<double>::infinity();
  for (uint32_t mask = 1; mask < (1u << num_candidates); ++mask) {
    std::vector<size_t> subset;
    for (size_t k = 0; k < num_candidates; ++k) {
      if (mask & (1u << k)) subset.push_back(k);
    }
    double perf = evaluate(subset);
    ++best.evaluations;
    if (best.subset.empty() || better_subset(perf, subset, best.performance, best.subset)) {
      best.subset = subset;
      best.performance = perf;
    }
  }
  return best;
}

SubsetResult subset_search_local(size_t num_candidates, const SubsetEvaluator& evaluate, uint64_t seed,
                                 const LocalSearchOptions& options) {
  if (num_candidates == 0) throw PortfolioError(Kind::kInvalidConfig, "no candidate solvers");
  std::map<std::vector<size_t>, double> memo;
  SubsetResult best;
  auto perf_of = [&](const std::vector<size_t>& subset) {
    auto it = memo.find(subset);
    if (it != memo.end()) return it->second;
    double v = evaluate(subset);
    ++best.evaluations;
    memo.emplace(subset, v);
    if (best.subset.empty() || better_subset(v, subset, best.performance, best.subset)) {
      best.subset = subset;
      best.performance = v;
    }
    return v;
  };
  if (num_candidates == 1) {
    perf_of({0});
    return best;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<size_t> pick(0, num_candidates - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  for (int run = 0; run < options.runs; ++run) {
    std::vector<bool> mask(num_candidates);
    do {
      for (size_t k = 0; k < num_candidates; ++k) mask[k] = (rng() & 1u) != 0;
    } while (std::none_of(mask.begin(), mask.end(), [](bool b) { return b; }));
    double current = perf_of(indices_of(mask));
    int stale = 0;
    while (stale < options.max_stale_steps) {
      std::vector<bool> next = mask;
      do {
        next = mask;
        size_t k = pick(rng);
        next[k] = !next[k];
      } while (std::none_of(next.begin(), next.end(), [](bool b) { return b; }));
      double value = perf_of(indices_of(next));
      if (value > current) {
        mask = next;
        current = value;
        stale = 0;
        continue;
      }
      ++stale;
      if (coin(rng) < options.accept_worse) {
        mask = next;
        current = value;
      }
    }
  }
  return best;
}

std::string choose_backup(const RuntimeMatrix& validation, const PresolverSchedule& schedule,
                          const std::vector<bool>& feature_timed_out, Objective objective, const PurseConfig& purse,
                          const SeriesMap& series, const std::vector<std::string>& eligible) {
  validation.require_complete();
  if (eligible.empty()) throw PortfolioError(Kind::kInvalidConfig, "no eligible backup solver");
  if (feature_timed_out.size() != validation.num_instances()) {
    throw PortfolioError(Kind::kInvalidConfig, "feature timeout flags do not match the validation set");
  }
  const auto active = schedule.active();
  std::vector<size_t> hard;
  for (size_t i = 0; i < validation.num_instances(); ++i) {
    if (!feature_timed_out[i]) continue;
    bool presolved = false;
    for (const auto& e : active) {
      const RunRecord& r = validation.at(validation.solver_index(e.solver_id), i);
      presolved = presolved || (is_solved(r.status) && r.runtime_seconds <= e.cutoff_seconds);
    }
    if (!presolved) hard.push_back(i);
  }
  if (hard.empty()) {
    hard.resize(validation.num_instances());
    std::iota(hard.begin(), hard.end(), size_t{0});
  }

  std::vector<std::string> ids = eligible;
  std::sort(ids.begin(), ids.end());
  std::vector<double> value(ids.size(), 0.0);  // larger is better
  if (objective == Objective::kMinRuntime) {
    for (size_t k = 0; k < ids.size(); ++k) {
      const size_t s = validation.solver_index(ids[k]);
      double total = 0.0;
      for (size_t i : hard) total += validation.solved(s, i) ? validation.at(s, i).runtime_seconds : validation.cutoff();
      value[k] = -total;
    }
  } else {
    RuntimeMatrix sub = validation.select_instances(std::span<const size_t>(hard));
    auto scores = competition_score(sub, purse, series);
    for (size_t k = 0; k < ids.size(); ++k) value[k] = scores[sub.solver_index(ids[k])].total();
  }
  size_t best = 0;
  for (size_t k = 1; k < ids.size(); ++k) {
    if (value[k] > value[best]) best = k;
  }
  return ids[best];
}

}  // namespace zf
