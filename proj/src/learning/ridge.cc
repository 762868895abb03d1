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

#include <cmath>

#include "zf/learning.h"

namespace zf {

namespace {

using Kind = LearningError::Kind;

void check_index(int index, size_t num_raw) {
  if (index < 0 || static_cast<size_t>(index) >= num_raw) {
    throw LearningError(Kind::kInvalidArgument, "basis index " + std::to_string(index) + " out of range");
  }
}

}  // namespace

std::string to_string(Target target) { return target == Target::kScore ? "score" : "log_runtime"; }

Target target_from_string(const std::string& name) {
  if (name == "score") return Target::kScore;
  if (name == "log_runtime") return Target::kLogRuntime;
  throw LearningError(Kind::kInvalidArgument, "unknown target '" + name + "'");
}

double log_runtime(double seconds) { return std::log(std::max(seconds, kMinRuntimeSeconds)); }

void BasisSpec::validate() const {
  for (int i : raw_indices) check_index(i, num_raw);
  for (auto [j, k] : product_pairs) {
    check_index(j, num_raw);
    check_index(k, num_raw);
    if (j > k) throw LearningError(Kind::kInvalidArgument, "product pair must satisfy j <= k");
  }
  if (means.size() != dimension() || scales.size() != dimension()) {
    throw LearningError(Kind::kDimensionMismatch, "basis normalization length does not match dimension");
  }
}

BasisSpec BasisSpec::identity(size_t num_raw, std::vector<int> raw, std::vector<std::pair<int, int>> pairs) {
  BasisSpec spec;
  spec.num_raw = num_raw;
  spec.raw_indices = std::move(raw);
  spec.product_pairs = std::move(pairs);
  spec.means.assign(spec.dimension(), 0.0);
  spec.scales.assign(spec.dimension(), 1.0);
  spec.validate();
  return spec;
}

void RidgeModel::validate() const {
  basis.validate();
  if (weights.size() != basis.dimension()) {
    throw LearningError(Kind::kDimensionMismatch, "weight count does not match basis dimension");
  }
  if (!(delta > 0.0) || !(sigma >= 0.0)) {
    throw LearningError(Kind::kInvalidArgument, "ridge model requires delta > 0 and sigma >= 0");
  }
}

void LabeledDataset::validate() const {
  const auto n = features.rows();
  if (targets.size() != n || static_cast<Eigen::Index>(censored.size()) != n) {
    throw LearningError(Kind::kDimensionMismatch, "dataset fields disagree on row count");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const size_t> rows) const {
  LabeledDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.targets.resize(static_cast<Eigen::Index>(rows.size()));
  out.censored.resize(rows.size());
  out.cutoff_log = cutoff_log;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(rows[i]);
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
    out.targets[static_cast<Eigen::Index>(i)] = targets[r];
    out.censored[i] = censored[rows[i]];
  }
  return out;
}

Matrix raw_basis_columns(const Matrix& raw, const std::vector<int>& raw_indices,
                         const std::vector<std::pair<int, int>>& pairs) {
  Matrix out(raw.rows(), static_cast<Eigen::Index>(raw_indices.size() + pairs.size()));
  Eigen::Index col = 0;
  for (int i : raw_indices) out.col(col++) = raw.col(i);
  for (auto [j, k] : pairs) out.col(col++) = raw.col(j).cwiseProduct(raw.col(k));
  return out;
}

Vector quadratic_expand(std::span<const double> x, const BasisSpec& basis) {
  if (x.size() != basis.num_raw) {
    throw LearningError(Kind::kDimensionMismatch, "expected " + std::to_string(basis.num_raw) +
                                                      " raw features, got " + std::to_string(x.size()));
  }
  Vector phi(static_cast<Eigen::Index>(basis.dimension()));
  size_t col = 0;
  for (int i : basis.raw_indices) {
    phi[static_cast<Eigen::Index>(col)] = (x[static_cast<size_t>(i)] - basis.means[col]) / basis.scales[col];
    ++col;
  }
  for (auto [j, k] : basis.product_pairs) {
    double product = x[static_cast<size_t>(j)] * x[static_cast<size_t>(k)];
    phi[static_cast<Eigen::Index>(col)] = (product - basis.means[col]) / basis.scales[col];
    ++col;
  }
  return phi;
}

Matrix quadratic_expand(const Matrix& raw, const BasisSpec& basis) {
  if (static_cast<size_t>(raw.cols()) != basis.num_raw) {
    throw LearningError(Kind::kDimensionMismatch, "raw feature matrix has wrong column count");
  }
  Matrix phi = raw_basis_columns(raw, basis.raw_indices, basis.product_pairs);
  for (Eigen::Index c = 0; c < phi.cols(); ++c) {
    const auto col = static_cast<size_t>(c);
    phi.col(c) = (phi.col(c).array() - basis.means[col]) / basis.scales[col];
  }
  return phi;
}

void fit_normalization(BasisSpec& basis, const Matrix& raw) {
  Matrix cols = raw_basis_columns(raw, basis.raw_indices, basis.product_pairs);
  const auto d = static_cast<size_t>(cols.cols());
  basis.means.assign(d, 0.0);
  basis.scales.assign(d, 1.0);
  if (cols.rows() == 0) return;
  for (Eigen::Index c = 0; c < cols.cols(); ++c) {
    double mean = cols.col(c).mean();
    double var = (cols.col(c).array() - mean).square().mean();
    double scale = std::sqrt(var);
    basis.means[static_cast<size_t>(c)] = mean;
    // Constant columns standardize to zero.
    basis.scales[static_cast<size_t>(c)] = (scale > 1e-12 * std::max(1.0, std::abs(mean))) ? scale : 1.0;
  }
}

Vector ridge_fit(const Matrix& phi, const Vector& y, double delta) {
  if (phi.rows() != y.size()) throw LearningError(Kind::kDimensionMismatch, "design rows != targets");
  if (!(delta > 0.0)) throw LearningError(Kind::kInvalidArgument, "ridge penalty must be positive");
  const Eigen::Index n = phi.rows();
  const Eigen::Index d = phi.cols();
  if (d == 0) return Vector(0);
  Matrix augmented = Matrix::Zero(n + d, d);
  augmented.topRows(n) = phi;
  augmented.bottomRows(d).diagonal().setConstant(std::sqrt(delta));
  Vector rhs = Vector::Zero(n + d);
  rhs.head(n) = y;
  return augmented.householderQr().solve(rhs);
}

RidgeModel fit_ridge_model(const Matrix& raw, const Vector& y, BasisSpec basis, double delta, Target target,
                           std::span<const size_t> sigma_rows) {
  if (raw.rows() != y.size()) throw LearningError(Kind::kDimensionMismatch, "feature rows != targets");
  if (raw.rows() == 0) throw LearningError(Kind::kInvalidArgument, "cannot fit on zero rows");
  basis.num_raw = static_cast<size_t>(raw.cols());
  fit_normalization(basis, raw);
  RidgeModel model;
  model.delta = delta;
  model.target = target;
  model.bias = y.mean();
  Matrix phi = quadratic_expand(raw, basis);
  Vector w = ridge_fit(phi, y.array() - model.bias, delta);
  model.weights.assign(w.data(), w.data() + w.size());
  model.basis = std::move(basis);

  Vector residual = (y - phi * w).array() - model.bias;
  std::vector<double> picked;
  if (sigma_rows.empty()) {
    picked.assign(residual.data(), residual.data() + residual.size());
  } else {
    for (size_t r : sigma_rows) picked.push_back(residual[static_cast<Eigen::Index>(r)]);
  }
  if (picked.size() >= 2) {
    double mean = 0.0;
    for (double r : picked) mean += r;
    mean /= static_cast<double>(picked.size());
    double ss = 0.0;
    for (double r : picked) ss += (r - mean) * (r - mean);
    model.sigma = std::sqrt(ss / static_cast<double>(picked.size() - 1));
  }
  return model;
}

double ridge_predict(const RidgeModel& model, std::span<const double> x) {
  Vector phi = quadratic_expand(x, model.basis);
  double y = model.bias;
  for (Eigen::Index i = 0; i < phi.size(); ++i) y += model.weights[static_cast<size_t>(i)] * phi[i];
  return y;
}

Vector ridge_predict(const RidgeModel& model, const Matrix& raw) {
  Matrix phi = quadratic_expand(raw, model.basis);
  Eigen::Map<const Vector> w(model.weights.data(), static_cast<Eigen::Index>(model.weights.size()));
  return (phi * w).array() + model.bias;
}

}  // namespace zf
