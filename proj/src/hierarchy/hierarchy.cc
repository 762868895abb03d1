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
#include <optional>

#include "zf/hierarchy.h"

namespace zf {

namespace {

using Kind = LearningError::Kind;

void standardization(const Matrix& x, std::vector<double>& means, std::vector<double>& scales) {
  const auto m = static_cast<size_t>(x.cols());
  means.assign(m, 0.0);
  scales.assign(m, 1.0);
  if (x.rows() == 0) return;
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    double mean = x.col(c).mean();
    double scale = std::sqrt((x.col(c).array() - mean).square().mean());
    means[static_cast<size_t>(c)] = mean;
    scales[static_cast<size_t>(c)] = scale > 1e-12 * std::max(1.0, std::abs(mean)) ? scale : 1.0;
  }
}

Vector standardize(std::span<const double> x, const std::vector<double>& means, const std::vector<double>& scales) {
  if (x.size() != means.size()) {
    throw LearningError(Kind::kDimensionMismatch, "expected " + std::to_string(means.size()) + " features, got " +
                                                      std::to_string(x.size()));
  }
  Vector z(static_cast<Eigen::Index>(x.size()));
  for (size_t i = 0; i < x.size(); ++i) z[static_cast<Eigen::Index>(i)] = (x[i] - means[i]) / scales[i];
  return z;
}

Matrix standardize(const Matrix& x, const std::vector<double>& means, const std::vector<double>& scales) {
  if (static_cast<size_t>(x.cols()) != means.size()) {
    throw LearningError(Kind::kDimensionMismatch, "feature matrix has wrong column count");
  }
  Matrix z(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) {
    z.col(c) = (x.col(c).array() - means[static_cast<size_t>(c)]) / scales[static_cast<size_t>(c)];
  }
  return z;
}

// In-place softmax of a score vector restricted to `mask`.
void masked_softmax(Vector& scores, const std::vector<bool>* mask) {
  double top = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    if (!mask || (*mask)[static_cast<size_t>(k)]) top = std::max(top, scores[k]);
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < scores.size(); ++k) {
    if (mask && !(*mask)[static_cast<size_t>(k)]) {
      scores[k] = 0.0;
      continue;
    }
    scores[k] = std::exp(scores[k] - top);
    sum += scores[k];
  }
  scores /= sum;
}

// Row-wise softmax of U W^T with every class active.
Matrix softmax_rows(const Matrix& u, const Matrix& weights) {
  Matrix p = u * weights.transpose();
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Vector row = p.row(i).transpose();
    masked_softmax(row, nullptr);
    p.row(i) = row.transpose();
  }
  return p;
}

// Backtracking descent on a smooth objective. `value_grad` returns the value
// and writes the gradient; only rows [0, free_rows) of the weights move.
template <typename F>
int descend(Matrix& w, Eigen::Index free_rows, int max_iter, double tol, bool relative_change_stop, F value_grad,
            double* final_value) {
  Matrix grad(w.rows(), w.cols());
  double value = value_grad(w, &grad);
  double step = 1.0;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    grad.bottomRows(w.rows() - free_rows).setZero();
    const double g2 = grad.squaredNorm();
    if (!relative_change_stop && grad.lpNorm<Eigen::Infinity>() < tol) break;
    if (g2 == 0.0) break;
    bool accepted = false;
    Matrix trial;
    double trial_value = value;
    while (step > 1e-14) {
      trial = w - step * grad;
      trial_value = value_grad(trial, nullptr);
      if (trial_value <= value - 1e-4 * step * g2) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    const double change = value - trial_value;
    w = std::move(trial);
    value = value_grad(w, &grad);
    step *= 2.0;
    if (relative_change_stop && change < tol * std::max(1.0, std::abs(value))) {
      ++iter;
      break;
    }
  }
  if (final_value) *final_value = value;
  return iter;
}

}  // namespace

Vector ClassifierModel::apply(std::span<const double> x) const {
  Vector z = standardize(x, means, scales);
  Vector scores = weights.col(0) + weights.rightCols(weights.cols() - 1) * z;
  masked_softmax(scores, &represented);
  return scores;
}

void ClassifierModel::validate() const {
  const auto k = static_cast<Eigen::Index>(classes.size());
  if (represented.size() != classes.size() || weights.rows() != k ||
      weights.cols() != static_cast<Eigen::Index>(means.size()) + 1 || scales.size() != means.size()) {
    throw LearningError(Kind::kDimensionMismatch, "classifier dimensions are inconsistent");
  }
  if (std::count(represented.begin(), represented.end(), true) < 1) {
    throw LearningError(Kind::kInvalidArgument, "classifier has no represented class");
  }
}

ClassifierModel train_classifier(const Matrix& features, const std::vector<int>& labels,
                                 const std::vector<std::string>& classes, const ClassifierOptions& options) {
  const Eigen::Index n = features.rows();
  const auto k = static_cast<Eigen::Index>(classes.size());
  if (static_cast<Eigen::Index>(labels.size()) != n) {
    throw LearningError(Kind::kDimensionMismatch, "labels and feature rows disagree");
  }
  std::vector<double> counts(classes.size(), 0.0);
  for (int label : labels) {
    if (label < 0 || label >= k) throw LearningError(Kind::kInvalidArgument, "class label out of range");
    counts[static_cast<size_t>(label)] += 1.0;
  }
  ClassifierModel model;
  model.classes = classes;
  model.penalty = options.penalty;
  model.represented.resize(classes.size());
  std::vector<Eigen::Index> active;
  for (Eigen::Index c = 0; c < k; ++c) {
    model.represented[static_cast<size_t>(c)] = counts[static_cast<size_t>(c)] > 0;
    if (counts[static_cast<size_t>(c)] > 0) active.push_back(c);
  }
  if (active.size() < 2) throw LearningError(Kind::kSingleClassData, "classifier needs at least two classes");

  standardization(features, model.means, model.scales);
  const Eigen::Index m = features.cols();
  Matrix u(n, m + 1);
  u.col(0).setOnes();
  u.rightCols(m) = standardize(features, model.means, model.scales);

  // Work in the compact space of represented classes, pinned class last.
  const auto a = static_cast<Eigen::Index>(active.size());
  Matrix onehot = Matrix::Zero(n, a);
  std::vector<Eigen::Index> compact(static_cast<size_t>(k), -1);
  for (Eigen::Index j = 0; j < a; ++j) compact[static_cast<size_t>(active[static_cast<size_t>(j)])] = j;
  for (Eigen::Index i = 0; i < n; ++i) onehot(i, compact[static_cast<size_t>(labels[static_cast<size_t>(i)])]) = 1.0;

  Matrix w = Matrix::Zero(a, m + 1);
  const double pinned = counts[static_cast<size_t>(active.back())];
  for (Eigen::Index j = 0; j + 1 < a; ++j) w(j, 0) = std::log(counts[static_cast<size_t>(active[static_cast<size_t>(j)])] / pinned);

  const double inv_n = 1.0 / static_cast<double>(n);
  const double lambda = options.penalty;
  // Negative penalized mean log-likelihood.
  auto objective = [&](const Matrix& wt, Matrix* grad) {
    Matrix scores = u * wt.transpose();
    double loss = 0.0;
    Matrix p(n, a);
    for (Eigen::Index i = 0; i < n; ++i) {
      double top = scores.row(i).maxCoeff();
      double sum = 0.0;
      for (Eigen::Index j = 0; j < a; ++j) sum += std::exp(scores(i, j) - top);
      const double log_norm = top + std::log(sum);
      for (Eigen::Index j = 0; j < a; ++j) p(i, j) = std::exp(scores(i, j) - log_norm);
      loss -= (scores.row(i).dot(onehot.row(i)) - log_norm);
    }
    loss *= inv_n;
    loss += 0.5 * lambda * wt.rightCols(m).squaredNorm();
    if (grad) {
      *grad = inv_n * (p - onehot).transpose() * u;
      grad->rightCols(m) += lambda * wt.rightCols(m);
    }
    return loss;
  };
  descend(w, a - 1, options.max_iter, options.grad_tol, false, objective, nullptr);

  model.weights = Matrix::Zero(k, m + 1);
  for (Eigen::Index j = 0; j < a; ++j) model.weights.row(active[static_cast<size_t>(j)]) = w.row(j);
  return model;
}

Matrix confusion_matrix(const ClassifierModel& classifier, const Matrix& features, const std::vector<int>& labels) {
  const auto k = static_cast<Eigen::Index>(classifier.num_classes());
  if (static_cast<Eigen::Index>(labels.size()) != features.rows()) {
    throw LearningError(Kind::kDimensionMismatch, "labels and feature rows disagree");
  }
  Matrix counts = Matrix::Zero(k, k);
  std::vector<double> row(static_cast<size_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) row[static_cast<size_t>(c)] = features(i, c);
    Vector p = classifier.apply(row);
    Eigen::Index predicted = 0;
    for (Eigen::Index c = 1; c < k; ++c) {
      if (p[c] > p[predicted]) predicted = c;
    }
    counts(predicted, labels[static_cast<size_t>(i)]) += 1.0;
  }
  for (Eigen::Index r = 0; r < k; ++r) {
    double total = counts.row(r).sum();
    if (total > 0) counts.row(r) /= total;
  }
  return counts;
}

Vector gate_input(const Matrix& weights, const Vector& u) {
  if (weights.cols() != u.size()) throw LearningError(Kind::kDimensionMismatch, "gate input has wrong length");
  Vector scores = weights * u;
  masked_softmax(scores, nullptr);
  return scores;
}

Vector gate(const GatingModel& gating, std::span<const double> x, const Vector& s) {
  if (static_cast<size_t>(s.size()) != gating.num_classes()) {
    throw LearningError(Kind::kDimensionMismatch, "class probability vector has wrong length");
  }
  Vector z = standardize(x, gating.means, gating.scales);
  Vector u(z.size() + s.size());
  u << z, s;
  return gate_input(gating.weights, u);
}

GatingModel fit_gating(const std::vector<RidgeModel>& experts, const ClassifierModel& classifier, const Matrix& features,
                       const Vector& targets, const GatingOptions& options, GatingFitTrace* trace) {
  const auto k = static_cast<Eigen::Index>(experts.size());
  if (k != static_cast<Eigen::Index>(classifier.num_classes()) || k < 2) {
    throw LearningError(Kind::kDimensionMismatch, "one expert per classifier class is required");
  }
  if (features.rows() != targets.size()) throw LearningError(Kind::kDimensionMismatch, "feature rows != targets");
  const Eigen::Index n = features.rows();
  const Eigen::Index m = features.cols();

  GatingModel gating;
  gating.means = classifier.means;
  gating.scales = classifier.scales;
  gating.weights = Matrix::Zero(k, m + k);

  Matrix u(n, m + k);
  Matrix s(n, k);
  Matrix experts_pred(n, k);
  u.leftCols(m) = standardize(features, gating.means, gating.scales);
  std::vector<double> row(static_cast<size_t>(m));
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index c = 0; c < m; ++c) row[static_cast<size_t>(c)] = features(i, c);
    s.row(i) = classifier.apply(row).transpose();
  }
  u.rightCols(k) = s;
  for (Eigen::Index e = 0; e < k; ++e) experts_pred.col(e) = ridge_predict(experts[static_cast<size_t>(e)], features);

  // Initial gate: cross-entropy fit of the softmax to the classifier output.
  const double inv_n = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
  auto cross_entropy = [&](const Matrix& w, Matrix* grad) {
    Matrix g = softmax_rows(u, w);
    double loss = -(s.array() * g.array().max(1e-300).log()).sum() * inv_n + 0.5e-4 * w.squaredNorm();
    if (grad) *grad = inv_n * (g - s).transpose() * u + 1e-4 * w;
    return loss;
  };
  if (n > 0) descend(gating.weights, k - 1, 200, 1e-6, false, cross_entropy, nullptr);

  auto squared_loss = [&](const Matrix& w, Matrix* grad) {
    Matrix g = softmax_rows(u, w);
    Vector mean = (g.array() * experts_pred.array()).rowwise().sum();
    Vector resid = targets - mean;
    if (grad) {
      // d/dscore_ik = -2 r_i g_ik (pred_ik - mean_i)
      Matrix dscore = (experts_pred.colwise() - mean).array() * g.array();
      dscore = dscore.array().colwise() * (-2.0 * resid.array());
      *grad = dscore.transpose() * u;
    }
    return resid.squaredNorm();
  };
  GatingFitTrace local;
  local.initial_loss = squared_loss(gating.weights, nullptr);
  local.final_loss = local.initial_loss;
  if (n > 0) {
    local.iterations =
        descend(gating.weights, k - 1, options.max_iter, options.tol, true, squared_loss, &local.final_loss);
  }
  if (trace) *trace = local;
  return gating;
}

void HierarchicalModel::validate() const {
  classifier.validate();
  const size_t k = classes.size();
  if (experts.size() != k || classifier.num_classes() != k || gating.num_classes() != k) {
    throw LearningError(Kind::kDimensionMismatch, "hierarchical model class counts disagree");
  }
  if (gating.weights.cols() != static_cast<Eigen::Index>(classifier.num_features() + k) ||
      gating.means.size() != classifier.num_features() || gating.scales.size() != gating.means.size()) {
    throw LearningError(Kind::kDimensionMismatch, "gating weights have wrong shape");
  }
  for (const RidgeModel& e : experts) {
    e.validate();
    if (e.target != experts.front().target) {
      throw LearningError(Kind::kInvalidArgument, "experts disagree on target type");
    }
    if (e.basis.num_raw != classifier.num_features()) {
      throw LearningError(Kind::kDimensionMismatch, "expert and classifier feature counts disagree");
    }
  }
}

HierPrediction predict_hier_detail(const HierarchicalModel& model, std::span<const double> x) {
  HierPrediction out;
  out.class_probs = model.classifier.apply(x);
  out.gate = gate(model.gating, x, out.class_probs);
  out.expert.resize(static_cast<Eigen::Index>(model.experts.size()));
  for (size_t e = 0; e < model.experts.size(); ++e) {
    out.expert[static_cast<Eigen::Index>(e)] = ridge_predict(model.experts[e], x);
  }
  out.mean = out.gate.dot(out.expert);
  // Clamp rounding so the result stays inside the experts' range.
  out.mean = std::clamp(out.mean, out.expert.minCoeff(), out.expert.maxCoeff());
  return out;
}

double predict_hier(const HierarchicalModel& model, std::span<const double> x) {
  return predict_hier_detail(model, x).mean;
}

double mixture_loss(const HierarchicalModel& model, const Matrix& features, const Vector& targets) {
  double loss = 0.0;
  std::vector<double> row(static_cast<size_t>(features.cols()));
  for (Eigen::Index i = 0; i < features.rows(); ++i) {
    for (Eigen::Index c = 0; c < features.cols(); ++c) row[static_cast<size_t>(c)] = features(i, c);
    const double r = targets[i] - predict_hier(model, row);
    loss += r * r;
  }
  return loss;
}

HierarchicalModel train_hierarchical(const LabeledDataset& data, const std::vector<int>& labels,
                                     const ClassifierModel& classifier, const HierarchicalOptions& options) {
  data.validate();
  if (labels.size() != data.rows()) throw LearningError(Kind::kDimensionMismatch, "labels and rows disagree");
  HierarchicalModel model;
  model.classes = classifier.classes;
  model.classifier = classifier;

  std::optional<RidgeModel> global;
  auto global_model = [&]() -> const RidgeModel& {
    if (!global) global = train_hardness_model(data, options.expert);
    return *global;
  };
  for (size_t c = 0; c < model.classes.size(); ++c) {
    std::vector<size_t> rows;
    for (size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == static_cast<int>(c)) rows.push_back(i);
    }
    bool fitted = false;
    if (rows.size() >= options.min_class_rows) {
      try {
        model.experts.push_back(train_hardness_model(data.subset(rows), options.expert));
        fitted = true;
      } catch (const LearningError& e) {
        if (e.kind() != Kind::kNoUncensoredData) throw;
      }
    }
    if (!fitted) model.experts.push_back(global_model());
  }
  model.gating = fit_gating(model.experts, classifier, data.features, data.targets, options.gating);
  return model;
}

HierarchicalModel train_hierarchical(const LabeledDataset& data, const std::vector<int>& labels,
                                     const std::vector<std::string>& classes, const HierarchicalOptions& options) {
  ClassifierModel classifier = train_classifier(data.features, labels, classes, options.classifier);
  return train_hierarchical(data, labels, classifier, options);
}

}  // namespace zf
