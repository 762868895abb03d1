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

#include "probing.h"
#include "zf/features.h"

namespace zf {

FeatureVector extract_all(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed) {
  probing::WorkClock clock(budget.mode, budget.work_units_per_second);
  FeatureVector result;
  result.seed = seed;
  auto out_of_time = [&] { return clock.elapsed() >= budget.total_seconds; };
  auto finish_timed_out = [&] {
    result.values.reset();
    result.timed_out = true;
    result.feature_time_seconds = std::max(clock.elapsed(), budget.total_seconds);
    return result;
  };

  FeatureArray values = base_features(formula);
  probing::ClauseDb db = probing::ClauseDb::build(formula, /*drop_tautologies=*/false);
  clock.charge(4 * db.total_literals() + formula.num_vars);
  if (out_of_time()) return finish_timed_out();

  // Each probe gets its own slice of the budget, capped by the overall deadline.
  auto probe_deadline = [&] { return std::min(clock.elapsed() + budget.per_probe_seconds, budget.total_seconds); };

  probing::ClauseDb ls_db = probing::ClauseDb::build(formula, /*drop_tautologies=*/true);
  probing::Rng saps_rng(seed);
  SapsProbeFeatures saps = probing::run_saps(ls_db, budget, SapsParams{}, clock, probe_deadline(), saps_rng);
  if (out_of_time()) return finish_timed_out();

  probing::Rng gsat_rng(seed ^ 0x9E3779B97F4A7C15ULL);
  GsatProbeFeatures gsat = probing::run_gsat(ls_db, budget, clock, probe_deadline(), gsat_rng);
  if (out_of_time()) return finish_timed_out();

  probing::Rng dpll_rng(seed ^ 0xC2B2AE3D27D4EB4FULL);
  DpllProbeFeatures dpll = probing::run_dpll_probes(db, budget.dpll_probe_runs, clock, probe_deadline(), dpll_rng);
  if (out_of_time()) return finish_timed_out();

  for (size_t i = 0; i < dpll.unit_props.size(); ++i) values[feat::kUnitPropsBegin + i] = dpll.unit_props[i];
  values[feat::kDpllMeanDepth] = dpll.mean_depth_to_contradiction;
  values[feat::kDpllLogNodes] = dpll.log_nodes_estimate;
  values[feat::kSapsBestStepBegin] = saps.best_step_mean;
  values[feat::kSapsBestStepBegin + 1] = saps.best_step_median;
  values[feat::kSapsBestStepBegin + 2] = saps.best_step_q10;
  values[feat::kSapsBestStepBegin + 3] = saps.best_step_q90;
  values[feat::kSapsAvgImprovement] = saps.avg_improvement;
  values[feat::kSapsFirstLmRatio] = saps.first_lm_ratio;
  values[feat::kGsatFirstLmRatio] = gsat.first_lm_ratio;
  values[feat::kSapsLmCv] = saps.lm_unsat_cv;

  result.values = values;
  result.feature_time_seconds = clock.elapsed();
  return result;
}

}  // namespace zf
