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

#ifndef ZF_FEATURES_H_
#define ZF_FEATURES_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zf/cnf.h"

namespace zf {

inline constexpr size_t kNumFeatures = 48;

using FeatureArray = std::array<double, kNumFeatures>;

// Canonical feature names in column order, e.g. "f01_nclauses".
const std::array<std::string_view, kNumFeatures>& feature_names();

// 0-based column of each named feature group, matching feature_names().
namespace feat {
inline constexpr size_t kNumClauses = 0;
inline constexpr size_t kNumVars = 1;
inline constexpr size_t kClauseVarRatio = 2;
inline constexpr size_t kVcgVarBegin = 3;      // mean, coeff, min, max, entropy
inline constexpr size_t kVcgClauseBegin = 8;   // mean, coeff, min, max, entropy
inline constexpr size_t kVgBegin = 13;         // mean, coeff, min, max
inline constexpr size_t kPosRatioClauseBegin = 17;  // mean, coeff, entropy
inline constexpr size_t kPosRatioVarBegin = 20;     // mean, coeff, min, max, entropy
inline constexpr size_t kBinaryFraction = 25;
inline constexpr size_t kTernaryFraction = 26;
inline constexpr size_t kHornFraction = 27;
inline constexpr size_t kHornVarBegin = 28;  // mean, coeff, min, max, entropy
inline constexpr size_t kUnitPropsBegin = 33;  // depths 1, 4, 16, 64, 256
inline constexpr size_t kDpllMeanDepth = 38;
inline constexpr size_t kDpllLogNodes = 39;
inline constexpr size_t kSapsBestStepBegin = 40;  // mean, median, q10, q90
inline constexpr size_t kSapsAvgImprovement = 44;
inline constexpr size_t kSapsFirstLmRatio = 45;
inline constexpr size_t kGsatFirstLmRatio = 46;
inline constexpr size_t kSapsLmCv = 47;
}  // namespace feat

enum class TimingMode {
  kWallClock,  // thread CPU time
  kStepCount,  // deterministic work-unit proxy
};

struct ProbeBudget {
  double per_probe_seconds = 1.0;
  double total_seconds = 60.0;
  int64_t max_ls_steps = 300000;
  int ls_probe_runs = 20;
  int dpll_probe_runs = 10;
  TimingMode mode = TimingMode::kWallClock;
  // Conversion rate for kStepCount mode.
  double work_units_per_second = 2.0e7;

  bool operator==(const ProbeBudget&) const = default;
};

struct SapsParams {
  double alpha = 1.3;
  double rho = 0.8;
  double smooth_probability = 0.05;
  double walk_probability = 0.01;
};

struct FeatureVector {
  std::optional<FeatureArray> values;  // empty iff timed_out
  double feature_time_seconds = 0.0;
  bool timed_out = false;
  uint64_t seed = 0;

  bool operator==(const FeatureVector&) const = default;
};

// Ternary per-variable state, indexed by variable (slot 0 unused).
enum class Value : int8_t { kFalse = -1, kUnassigned = 0, kTrue = 1 };

struct Assignment {
  std::vector<Value> values;

  explicit Assignment(int32_t num_vars = 0) : values(static_cast<size_t>(num_vars) + 1, Value::kUnassigned) {}
  Value operator[](int32_t var) const { return values[static_cast<size_t>(var)]; }
  Value& operator[](int32_t var) { return values[static_cast<size_t>(var)]; }
  int32_t num_vars() const { return static_cast<int32_t>(values.size()) - 1; }
  bool operator==(const Assignment&) const = default;
};

struct PropagationResult {
  Assignment assignment;
  int64_t propagation_count = 0;
  bool conflict = false;
};

// Features 1-33. Indices outside that range are left at 0.
FeatureArray base_features(const CnfFormula& formula);

PropagationResult unit_propagate(const CnfFormula& formula, Assignment assignment);

struct DpllProbeFeatures {
  std::array<double, 5> unit_props{};  // at depths 1, 4, 16, 64, 256
  double mean_depth_to_contradiction = 0.0;
  double log_nodes_estimate = 0.0;
  int completed_probes = 0;
};

struct SapsProbeFeatures {
  double best_step_mean = 0.0;
  double best_step_median = 0.0;
  double best_step_q10 = 0.0;
  double best_step_q90 = 0.0;
  double avg_improvement = 0.0;
  double first_lm_ratio = 0.0;
  double lm_unsat_cv = 0.0;
  int completed_runs = 0;
};

struct GsatProbeFeatures {
  double first_lm_ratio = 0.0;
  int completed_runs = 0;
};

DpllProbeFeatures dpll_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed);
DpllProbeFeatures dpll_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed,
                             int num_probes);
SapsProbeFeatures saps_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed,
                             const SapsParams& params = {});
GsatProbeFeatures gsat_probe(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed);

FeatureVector extract_all(const CnfFormula& formula, const ProbeBudget& budget, uint64_t seed);

}  // namespace zf

#endif  // ZF_FEATURES_H_
