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

#ifndef ZF_HIERARCHY_H_
#define ZF_HIERARCHY_H_

#include <span>
#include <string>
#include <vector>

#include "zf/learning.h"

namespace zf {

// Multinomial logistic regression on standardized features. Row k of
// `weights` holds [bias, w_1..w_m] for class k; the last represented class
// is pinned to zero. Classes absent from training get probability 0.
struct ClassifierModel {
  std::vector<std::string> classes;
  std::vector<bool> represented;
  Matrix weights;  // K x (m + 1)
  std::vector<double> means;
  std::vector<double> scales;
  double penalty = 1e-2;

  size_t num_classes() const { return classes.size(); }
  size_t num_features() const { return means.size(); }
  Vector apply(std::span<const double> x) const;
  void validate() const;
  bool operator==(const ClassifierModel&) const = default;
};

struct ClassifierOptions {
  double penalty = 1e-2;
  int max_iter = 500;
  double grad_tol = 1e-6;
};

// labels[i] indexes into classes. Throws kSingleClassData if fewer than two
// classes occur.
ClassifierModel train_classifier(const Matrix& features, const std::vector<int>& labels,
                                 const std::vector<std::string>& classes, const ClassifierOptions& options = {});

// Rows: predicted class (argmax), columns: true class; each non-empty row
// sums to 1.
Matrix confusion_matrix(const ClassifierModel& classifier, const Matrix& features, const std::vector<int>& labels);

// Softmax gate over the input [standardized x; s]. Row k scores class k; the
// last row is pinned to zero, so for K = 2 this is the logistic of row 0.
struct GatingModel {
  Matrix weights;  // K x (m + K)
  std::vector<double> means;
  std::vector<double> scales;

  size_t num_classes() const { return static_cast<size_t>(weights.rows()); }
  bool operator==(const GatingModel&) const = default;
};

Vector gate(const GatingModel& gating, std::span<const double> x, const Vector& s);

// Same gate on a pre-built input u = [standardized x; s].
Vector gate_input(const Matrix& weights, const Vector& u);

struct HierarchicalModel {
  std::vector<std::string> classes;
  std::vector<RidgeModel> experts;  // one per class
  ClassifierModel classifier;
  GatingModel gating;

  Target target() const { return experts.empty() ? Target::kLogRuntime : experts.front().target; }
  void validate() const;
  bool operator==(const HierarchicalModel&) const = default;
};

struct GatingOptions {
  int max_iter = 200;
  double tol = 1e-6;
};

struct GatingFitTrace {
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
};

// Weights of a gate fitted to minimise sum_i (y_i - E[y | x_i, s_i])^2 with
// the experts frozen, starting from the gate that reproduces s.
GatingModel fit_gating(const std::vector<RidgeModel>& experts, const ClassifierModel& classifier, const Matrix& features,
                       const Vector& targets, const GatingOptions& options = {}, GatingFitTrace* trace = nullptr);

struct HierPrediction {
  Vector class_probs;  // s
  Vector gate;         // P(z = k | x, s)
  Vector expert;       // per-class expert predictions
  double mean = 0.0;
};

HierPrediction predict_hier_detail(const HierarchicalModel& model, std::span<const double> x);
double predict_hier(const HierarchicalModel& model, std::span<const double> x);

// Sum of squared errors of the mixture mean on a data set.
double mixture_loss(const HierarchicalModel& model, const Matrix& features, const Vector& targets);

struct HierarchicalOptions {
  HardnessModelOptions expert;
  ClassifierOptions classifier;
  GatingOptions gating;
  // Classes with fewer training rows fall back to an expert fit on all rows.
  size_t min_class_rows = 10;
};

// Trains the classifier, one expert per class, then the gate. labels[i]
// indexes into classes.
HierarchicalModel train_hierarchical(const LabeledDataset& data, const std::vector<int>& labels,
                                     const std::vector<std::string>& classes, const HierarchicalOptions& options = {});

// Variant reusing an already trained classifier.
HierarchicalModel train_hierarchical(const LabeledDataset& data, const std::vector<int>& labels,
                                     const ClassifierModel& classifier, const HierarchicalOptions& options = {});

}  // namespace zf

#endif  // ZF_HIERARCHY_H_
