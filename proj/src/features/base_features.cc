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
#include <vector>

#include "stats.h"
#include "zf/features.h"

namespace zf {

const std::array<std::string_view, kNumFeatures>& feature_names() {
  static constexpr std::array<std::string_view, kNumFeatures> kNames = {
      "f01_nclauses",
      "f02_nvars",
      "f03_clause_var_ratio",
      "f04_vcg_var_mean",
      "f05_vcg_var_coeff",
      "f06_vcg_var_min",
      "f07_vcg_var_max",
      "f08_vcg_var_entropy",
      "f09_vcg_clause_mean",
      "f10_vcg_clause_coeff",
      "f11_vcg_clause_min",
      "f12_vcg_clause_max",
      "f13_vcg_clause_entropy",
      "f14_vg_mean",
      "f15_vg_coeff",
      "f16_vg_min",
      "f17_vg_max",
      "f18_pos_ratio_clause_mean",
      "f19_pos_ratio_clause_coeff",
      "f20_pos_ratio_clause_entropy",
      "f21_pos_ratio_var_mean",
      "f22_pos_ratio_var_coeff",
      "f23_pos_ratio_var_min",
      "f24_pos_ratio_var_max",
      "f25_pos_ratio_var_entropy",
      "f26_binary_fraction",
      "f27_ternary_fraction",
      "f28_horn_fraction",
      "f29_horn_var_mean",
      "f30_horn_var_coeff",
      "f31_horn_var_min",
      "f32_horn_var_max",
      "f33_horn_var_entropy",
      "f34_unit_props_depth1",
      "f35_unit_props_depth4",
      "f36_unit_props_depth16",
      "f37_unit_props_depth64",
      "f38_unit_props_depth256",
      "f39_dpll_depth_to_conflict",
      "f40_dpll_log_nodes",
      "f41_saps_best_step_mean",
      "f42_saps_best_step_median",
      "f43_saps_best_step_q10",
      "f44_saps_best_step_q90",
      "f45_saps_avg_improvement",
      "f46_saps_first_lm_ratio",
      "f47_gsat_first_lm_ratio",
      "f48_saps_cv_unsat",
  };
  return kNames;
}

namespace {

void put_summary(FeatureArray& out, size_t begin, std::span<const double> values, bool with_entropy) {
  stats::Summary s = stats::summarize(values);
  out[begin] = s.mean;
  out[begin + 1] = s.coeff;
  out[begin + 2] = s.min;
  out[begin + 3] = s.max;
  if (with_entropy) out[begin + 4] = stats::discrete_entropy(values);
}

}  // namespace

// Graph degrees count distinct incidences (the graphs are simple); length,
// balance and Horn counts use the clause as written.
FeatureArray base_features(const CnfFormula& formula) {
  FeatureArray out{};
  const size_t num_vars = static_cast<size_t>(std::max(formula.num_vars, 0));
  const size_t num_clauses = formula.clauses.size();

  out[feat::kNumClauses] = static_cast<double>(num_clauses);
  out[feat::kNumVars] = static_cast<double>(num_vars);
  out[feat::kClauseVarRatio] = num_vars == 0 ? 0.0 : out[feat::kNumClauses] / out[feat::kNumVars];

  std::vector<std::vector<uint32_t>> var_clauses(num_vars + 1);
  std::vector<double> var_degree(num_vars + 1, 0.0);
  std::vector<double> horn_count(num_vars + 1, 0.0);
  std::vector<double> pos_occ(num_vars + 1, 0.0);
  std::vector<double> all_occ(num_vars + 1, 0.0);
  std::vector<uint32_t> stamp(num_vars + 1, UINT32_MAX);

  std::vector<double> clause_degree;
  std::vector<double> clause_pos_ratio;
  clause_degree.reserve(num_clauses);
  clause_pos_ratio.reserve(num_clauses);
  size_t binary = 0;
  size_t ternary = 0;
  size_t horn = 0;

  for (size_t ci = 0; ci < num_clauses; ++ci) {
    const Clause& clause = formula.clauses[ci];
    const auto cid = static_cast<uint32_t>(ci);
    size_t positives = 0;
    for (Literal lit : clause) {
      if (lit.positive()) ++positives;
      auto v = static_cast<size_t>(lit.var());
      all_occ[v] += 1.0;
      if (lit.positive()) pos_occ[v] += 1.0;
    }
    const bool is_horn = positives <= 1;
    size_t distinct = 0;
    for (Literal lit : clause) {
      auto v = static_cast<size_t>(lit.var());
      if (stamp[v] == cid) continue;
      stamp[v] = cid;
      ++distinct;
      var_clauses[v].push_back(cid);
      var_degree[v] += 1.0;
      if (is_horn) horn_count[v] += 1.0;
    }
    clause_degree.push_back(static_cast<double>(distinct));
    clause_pos_ratio.push_back(clause.empty() ? 0.0
                                              : static_cast<double>(positives) / static_cast<double>(clause.size()));
    if (clause.size() == 2) ++binary;
    if (clause.size() == 3) ++ternary;
    if (is_horn) ++horn;
  }

  // Variable graph degree via marker sweep over each variable's clauses.
  std::vector<double> vg_degree(num_vars + 1, 0.0);
  std::fill(stamp.begin(), stamp.end(), UINT32_MAX);
  for (size_t v = 1; v <= num_vars; ++v) {
    const auto mark = static_cast<uint32_t>(v);
    stamp[v] = mark;
    size_t neighbours = 0;
    for (uint32_t cid : var_clauses[v]) {
      for (Literal lit : formula.clauses[cid]) {
        auto u = static_cast<size_t>(lit.var());
        if (stamp[u] == mark) continue;
        stamp[u] = mark;
        ++neighbours;
      }
    }
    vg_degree[v] = static_cast<double>(neighbours);
  }

  std::vector<double> var_pos_ratio;
  for (size_t v = 1; v <= num_vars; ++v) {
    if (all_occ[v] > 0.0) var_pos_ratio.push_back(pos_occ[v] / all_occ[v]);
  }

  auto per_var = [&](const std::vector<double>& values) {
    return std::span<const double>(values).subspan(values.empty() ? 0 : 1);
  };

  put_summary(out, feat::kVcgVarBegin, per_var(var_degree), true);
  put_summary(out, feat::kVcgClauseBegin, clause_degree, true);
  put_summary(out, feat::kVgBegin, per_var(vg_degree), false);

  stats::Summary clause_ratio = stats::summarize(clause_pos_ratio);
  out[feat::kPosRatioClauseBegin] = clause_ratio.mean;
  out[feat::kPosRatioClauseBegin + 1] = clause_ratio.coeff;
  out[feat::kPosRatioClauseBegin + 2] = stats::binned_entropy(clause_pos_ratio);

  stats::Summary var_ratio = stats::summarize(var_pos_ratio);
  out[feat::kPosRatioVarBegin] = var_ratio.mean;
  out[feat::kPosRatioVarBegin + 1] = var_ratio.coeff;
  out[feat::kPosRatioVarBegin + 2] = var_ratio.min;
  out[feat::kPosRatioVarBegin + 3] = var_ratio.max;
  out[feat::kPosRatioVarBegin + 4] = stats::binned_entropy(var_pos_ratio);

  const double c = num_clauses == 0 ? 1.0 : static_cast<double>(num_clauses);
  out[feat::kBinaryFraction] = static_cast<double>(binary) / c;
  out[feat::kTernaryFraction] = static_cast<double>(ternary) / c;
  out[feat::kHornFraction] = static_cast<double>(horn) / c;
  put_summary(out, feat::kHornVarBegin, per_var(horn_count), true);
  return out;
}

}  // namespace zf
