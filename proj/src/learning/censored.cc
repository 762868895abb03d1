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
#include <numeric>

#include "zf/learning.h"

namespace zf {

namespace {

using Kind = LearningError::Kind;

double max_change(const RidgeModel& a, const RidgeModel& b) {
  double change = std::abs(a.bias - b.bias);
  for (size_t i = 0; i < a.weights.size(); ++i) change = std::max(change, std::abs(a.weights[i] - b.weights[i]));
  return change;
}

}  // namespace

RidgeModel censored_fit(const LabeledDataset& data, BasisSpec basis, Target target, const CensoredFitOptions& options,
                        CensoredFitTrace* trace) {
  data.validate();
  std::vector<size_t> observed;
  std::vector<size_t> censored;
  for (size_t i = 0; i < data.rows(); ++i) (data.censored[i] ? censored : observed).push_back(i);
  if (observed.empty()) throw LearningError(Kind::kNoUncensoredData, "censored fit needs an uncensored row");

  RidgeModel model = fit_ridge_model(data.features, data.targets, basis, options.delta, target, observed);
  CensoredFitTrace local;
  local.min_imputed_margin = censored.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  if (censored.empty()) {
    if (trace) *trace = local;
    return model;
  }

  Vector y = data.targets;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    Vector pred = ridge_predict(model, data.features);
    for (size_t i : censored) {
      const auto r = static_cast<Eigen::Index>(i);
      double imputed = truncated_normal_mean(pred[r], model.sigma, data.cutoff_log);
      y[r] = std::max(imputed, data.cutoff_log);
      local.min_imputed_margin = std::min(local.min_imputed_margin, y[r] - data.cutoff_log);
    }
    RidgeModel next = fit_ridge_model(data.features, y, basis, options.delta, target, observed);
    const double change = max_change(model, next);
    model = std::move(next);
    local.iterations = iter + 1;
    if (change < options.tol) break;
  }
  if (trace) *trace = local;
  return model;
}

RidgeModel train_hardness_model(const LabeledDataset& data, const HardnessModelOptions& options) {
  data.validate();
  if (data.rows() == 0) throw LearningError(Kind::kInvalidArgument, "cannot train on zero rows");
  const auto m = static_cast<int>(data.features.cols());

  std::vector<int> raw_candidates(static_cast<size_t>(m));
  std::iota(raw_candidates.begin(), raw_candidates.end(), 0);
  ForwardSelectResult first = forward_select(data.features, data.targets, raw_candidates, options.raw_pass);
  std::vector<int> raw = first.selected;
  std::sort(raw.begin(), raw.end());

  BasisSpec basis;
  basis.num_raw = static_cast<size_t>(m);
  if (!raw.empty()) {
    // Second pass over the survivors and all their pairwise products.
    std::vector<std::pair<int, int>> pairs;
    for (size_t j = 0; j < raw.size(); ++j) {
      for (size_t k = j; k < raw.size(); ++k) pairs.emplace_back(raw[j], raw[k]);
    }
    Matrix expanded = raw_basis_columns(data.features, raw, pairs);
    std::vector<int> candidates(static_cast<size_t>(expanded.cols()));
    std::iota(candidates.begin(), candidates.end(), 0);
    ForwardSelectResult second = forward_select(expanded, data.targets, candidates, options.expanded_pass);
    std::vector<int> chosen = second.selected;
    std::sort(chosen.begin(), chosen.end());
    for (int c : chosen) {
      if (c < static_cast<int>(raw.size())) {
        basis.raw_indices.push_back(raw[static_cast<size_t>(c)]);
      } else {
        basis.product_pairs.push_back(pairs[static_cast<size_t>(c) - raw.size()]);
      }
    }
  }
  basis.means.assign(basis.dimension(), 0.0);
  basis.scales.assign(basis.dimension(), 1.0);
  return censored_fit(data, std::move(basis), options.target, options.censored);
}

}  // namespace zf
