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
#include <bit>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "zf/learning.h"

namespace zf {

namespace {

using Kind = LearningError::Kind;

uint64_t mix(uint64_t h, uint64_t v) {
  h ^= v + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  h ^= h >> 29;
  h *= 0xBF58476D1CE4E5B9ULL;
  return h;
}

uint64_t row_hash(const Matrix& columns, const Vector& y, Eigen::Index r) {
  uint64_t h = 0x243F6A8885A308D3ULL;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) h = mix(h, std::bit_cast<uint64_t>(columns(r, c)));
  return mix(h, std::bit_cast<uint64_t>(y[r]));
}

// Rows are ranked by content hash and dealt round-robin into folds.
std::vector<int> assign_folds(const Matrix& columns, const Vector& y, int folds) {
  const Eigen::Index n = columns.rows();
  std::vector<std::pair<uint64_t, Eigen::Index>> keyed(static_cast<size_t>(n));
  for (Eigen::Index r = 0; r < n; ++r) keyed[static_cast<size_t>(r)] = {row_hash(columns, y, r), r};
  std::sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    // Identical rows are interchangeable; compare contents for a stable order.
    for (Eigen::Index c = 0; c < columns.cols(); ++c) {
      if (columns(a.second, c) != columns(b.second, c)) return columns(a.second, c) < columns(b.second, c);
    }
    return y[a.second] < y[b.second];
  });
  std::vector<int> fold(static_cast<size_t>(n));
  for (size_t i = 0; i < keyed.size(); ++i) fold[static_cast<size_t>(keyed[i].second)] = static_cast<int>(i) % folds;
  return fold;
}

// Incremental Cholesky state of one training fold. Column 0 of Z is the
// intercept; the rest are standardized candidate columns.
struct FoldState {
  Matrix gram;                  // training Z^T Z
  Vector zty;                   // training Z^T y
  Matrix z_val;                 // held-out rows of Z
  Vector y_val;
  std::vector<double> l_diag;   // diagonal of the Cholesky factor, per selected term
  std::vector<double> u;        // L^{-1} Z_S^T y
  Matrix q_val;                 // held-out rows of Z_S L^{-T}, one column per term
  Vector pred;                  // current held-out predictions
  Matrix l_cache;               // row j: L^{-1} G[S, c] entry j for every column c
  Vector l_norm2;               // squared norm of the cached vectors per column

  struct Step {
    double diag = 0.0;
    double u = 0.0;
    Vector q;
  };

  // Returns false if column c is numerically dependent on the current terms.
  bool extend(Eigen::Index c, double delta, Step& step) const {
    const size_t d = u.size();
    const double gcc = gram(c, c) + delta;
    const double diag2 = gcc - l_norm2[c];
    if (!(diag2 > 1e-10 * gcc)) return false;
    step.diag = std::sqrt(diag2);
    double dot = 0.0;
    for (size_t j = 0; j < d; ++j) dot += l_cache(static_cast<Eigen::Index>(j), c) * u[j];
    step.u = (zty[c] - dot) / step.diag;
    step.q = z_val.col(c);
    for (size_t j = 0; j < d; ++j) step.q -= l_cache(static_cast<Eigen::Index>(j), c) * q_val.col(static_cast<Eigen::Index>(j));
    step.q /= step.diag;
    return true;
  }

  double sse_with(const Step& step) const { return (y_val - pred - step.u * step.q).squaredNorm(); }

  void commit(Eigen::Index c, const Step& step) {
    const auto j = static_cast<Eigen::Index>(u.size());
    const Eigen::Index p = gram.cols();
    // New row of the cached L^{-1} G[S, :].
    Vector row = gram.row(c).transpose();
    for (Eigen::Index k = 0; k < j; ++k) row -= l_cache(k, c) * l_cache.row(k).transpose();
    row /= step.diag;
    if (l_cache.rows() <= j) l_cache.conservativeResize(j + 1, p);
    l_cache.row(j) = row.transpose();
    l_norm2 += row.cwiseAbs2();
    l_diag.push_back(step.diag);
    u.push_back(step.u);
    q_val.conservativeResize(q_val.rows(), j + 1);
    q_val.col(j) = step.q;
    pred += step.u * step.q;
  }
};

}  // namespace

ForwardSelectResult forward_select(const Matrix& columns, const Vector& y, std::span<const int> candidates,
                                   const ForwardSelectOptions& options) {
  if (candidates.empty()) throw LearningError(Kind::kEmptyCandidates, "forward selection needs candidates");
  if (columns.rows() != y.size()) throw LearningError(Kind::kDimensionMismatch, "column rows != targets");
  if (options.folds < 2 || options.max_terms < 1 || !(options.delta > 0.0)) {
    throw LearningError(Kind::kInvalidArgument, "forward selection requires folds >= 2, max_terms >= 1, delta > 0");
  }
  std::vector<int> cand;
  std::unordered_set<int> seen;
  for (int c : candidates) {
    if (c < 0 || c >= columns.cols()) throw LearningError(Kind::kInvalidArgument, "candidate index out of range");
    if (seen.insert(c).second) cand.push_back(c);
  }

  ForwardSelectResult result;
  const Eigen::Index n = columns.rows();
  if (n < 2) return result;
  const int folds = static_cast<int>(std::min<Eigen::Index>(options.folds, n));

  // Z = [1, standardized candidates], computed once on all rows.
  const auto p = static_cast<Eigen::Index>(cand.size()) + 1;
  Matrix z(n, p);
  z.col(0).setOnes();
  for (Eigen::Index j = 1; j < p; ++j) {
    auto col = columns.col(cand[static_cast<size_t>(j - 1)]);
    double mean = col.mean();
    double scale = std::sqrt((col.array() - mean).square().mean());
    if (!(scale > 1e-12 * std::max(1.0, std::abs(mean)))) scale = std::numeric_limits<double>::infinity();
    z.col(j) = (col.array() - mean) / scale;
  }
  const Matrix full_gram = z.transpose() * z;
  const Vector full_zty = z.transpose() * y;

  std::vector<int> fold = assign_folds(columns, y, folds);
  std::vector<FoldState> states(static_cast<size_t>(folds));
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index r = 0; r < n; ++r) {
      if (fold[static_cast<size_t>(r)] == f) rows.push_back(r);
    }
    FoldState& s = states[static_cast<size_t>(f)];
    s.z_val.resize(static_cast<Eigen::Index>(rows.size()), p);
    s.y_val.resize(static_cast<Eigen::Index>(rows.size()));
    for (size_t i = 0; i < rows.size(); ++i) {
      s.z_val.row(static_cast<Eigen::Index>(i)) = z.row(rows[i]);
      s.y_val[static_cast<Eigen::Index>(i)] = y[rows[i]];
    }
    s.gram = full_gram - s.z_val.transpose() * s.z_val;
    s.zty = full_zty - s.z_val.transpose() * s.y_val;
    s.q_val.resize(s.z_val.rows(), 0);
    s.pred = Vector::Zero(s.z_val.rows());
    s.l_norm2 = Vector::Zero(p);
  }

  auto total_rmse = [&](double sse) { return std::sqrt(sse / static_cast<double>(n)); };

  // Intercept first; its penalty is the same delta as every other column.
  {
    double sse = 0.0;
    for (FoldState& s : states) {
      FoldState::Step step;
      if (!s.extend(0, options.delta, step)) {
        step.diag = std::sqrt(options.delta);
        step.u = 0.0;
        step.q = Vector::Zero(s.z_val.rows());
      }
      s.commit(0, step);
      sse += (s.y_val - s.pred).squaredNorm();
    }
    result.baseline_rmse = total_rmse(sse);
  }

  std::vector<bool> used(static_cast<size_t>(p), false);
  used[0] = true;
  double current = result.baseline_rmse;
  std::vector<FoldState::Step> steps(states.size()), best_steps(states.size());
  while (static_cast<int>(result.selected.size()) < options.max_terms) {
    Eigen::Index best = -1;
    double best_rmse = current;
    for (Eigen::Index c = 1; c < p; ++c) {
      if (used[static_cast<size_t>(c)]) continue;
      double sse = 0.0;
      bool ok = true;
      for (size_t f = 0; f < states.size() && ok; ++f) {
        ok = states[f].extend(c, options.delta, steps[f]);
        if (ok) sse += states[f].sse_with(steps[f]);
      }
      if (!ok) continue;
      double rmse = total_rmse(sse);
      if (rmse < best_rmse * (1.0 - 1e-9)) {
        best_rmse = rmse;
        best = c;
        std::swap(best_steps, steps);
      }
    }
    if (best < 0) break;
    for (size_t f = 0; f < states.size(); ++f) states[f].commit(best, best_steps[f]);
    used[static_cast<size_t>(best)] = true;
    result.selected.push_back(cand[static_cast<size_t>(best - 1)]);
    result.cv_rmse.push_back(best_rmse);
    current = best_rmse;
  }
  return result;
}

}  // namespace zf
