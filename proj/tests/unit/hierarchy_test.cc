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
#include <numeric>
#include <random>

#include "doctest.h"
#include "zf/hierarchy.h"

namespace zf {
namespace {

using Kind = LearningError::Kind;

std::vector<double> row_of(const Matrix& x, Eigen::Index r) {
  std::vector<double> out(static_cast<size_t>(x.cols()));
  for (Eigen::Index c = 0; c < x.cols(); ++c) out[static_cast<size_t>(c)] = x(r, c);
  return out;
}

// Two well separated clusters on feature 0; feature 1 drives the runtime.
struct TwoClusters {
  Matrix x;
  std::vector<int> labels;
  Vector y;
  RidgeModel expert_a, expert_b;
};

RidgeModel linear_expert(double bias, double slope) {
  RidgeModel m;
  m.basis = BasisSpec::identity(3, {1}, {});
  m.weights = {slope};
  m.bias = bias;
  m.sigma = 0.1;
  return m;
}

TwoClusters two_clusters(uint64_t seed, int n = 400) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  TwoClusters t;
  t.x.resize(n, 3);
  t.y.resize(n);
  t.expert_a = linear_expert(2.0, 1.0);
  t.expert_b = linear_expert(-3.0, 0.5);
  for (int i = 0; i < n; ++i) {
    int label = i % 2;
    t.labels.push_back(label);
    t.x(i, 0) = (label == 0 ? 3.0 : -3.0) + 0.5 * g(rng);
    t.x(i, 1) = g(rng);
    t.x(i, 2) = g(rng);
    const RidgeModel& e = label == 0 ? t.expert_a : t.expert_b;
    t.y[i] = e.bias + e.weights[0] * t.x(i, 1) + 0.1 * g(rng);
  }
  return t;
}

TEST_CASE("classifier on separable data") {
  TwoClusters t = two_clusters(1);
  ClassifierModel c = train_classifier(t.x, t.labels, {"sat", "unsat"});
  c.validate();
  int correct = 0;
  for (Eigen::Index i = 0; i < t.x.rows(); ++i) {
    Vector p = c.apply(row_of(t.x, i));
    CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-12));
    if ((p[0] > p[1] ? 0 : 1) == t.labels[static_cast<size_t>(i)]) ++correct;
  }
  CHECK(correct >= 0.99 * static_cast<double>(t.x.rows()));
  Matrix cm = confusion_matrix(c, t.x, t.labels);
  CHECK(cm(0, 0) >= 0.95);
  CHECK(cm(1, 1) >= 0.95);
}

TEST_CASE("classifier without signal predicts priors") {
  Matrix x = Matrix::Ones(40, 4);
  std::vector<int> labels(40, 0);
  for (int i = 0; i < 10; ++i) labels[static_cast<size_t>(i)] = 1;
  ClassifierModel c = train_classifier(x, labels, {"a", "b"});
  Vector p = c.apply(std::vector<double>(4, 1.0));
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-6));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-6));

  TwoClusters t = two_clusters(2);
  ClassifierOptions heavy;
  heavy.penalty = 1e8;
  ClassifierModel shrunk = train_classifier(t.x, t.labels, {"a", "b"}, heavy);
  CHECK(shrunk.weights.rightCols(3).cwiseAbs().maxCoeff() < 1e-6);
  Vector q = shrunk.apply(row_of(t.x, 0));
  CHECK(q[0] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("classifier edge cases") {
  Matrix x = Matrix::Random(10, 2);
  try {
    train_classifier(x, std::vector<int>(10, 1), {"a", "b"});
    FAIL("expected SingleClassData");
  } catch (const LearningError& e) {
    CHECK(e.kind() == Kind::kSingleClassData);
  }
  std::vector<int> labels = {0, 2, 0, 2, 0, 2, 0, 2, 0, 2};
  ClassifierModel c = train_classifier(x, labels, {"a", "b", "c"});
  Vector p = c.apply(row_of(x, 0));
  CHECK(p[1] == 0.0);
  CHECK(p.sum() == doctest::Approx(1.0));
}

TEST_CASE("classifier outputs are invariant to training row order") {
  TwoClusters t = two_clusters(3, 200);
  t.x.col(0) += Vector::Random(200) * 4.0;  // overlap so the fit is not saturated
  ClassifierModel a = train_classifier(t.x, t.labels, {"a", "b"});
  std::vector<Eigen::Index> order(200);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(3);
  std::shuffle(order.begin(), order.end(), rng);
  Matrix xs(200, 3);
  std::vector<int> ls;
  for (size_t i = 0; i < order.size(); ++i) {
    xs.row(static_cast<Eigen::Index>(i)) = t.x.row(order[i]);
    ls.push_back(t.labels[static_cast<size_t>(order[i])]);
  }
  ClassifierModel b = train_classifier(xs, ls, {"a", "b"});
  for (Eigen::Index i = 0; i < 50; ++i) {
    CHECK(a.apply(row_of(t.x, i))[0] == doctest::Approx(b.apply(row_of(t.x, i))[0]).epsilon(1e-8));
  }
}

TEST_CASE("confusion matrix degenerate cases") {
  TwoClusters t = two_clusters(4);
  ClassifierModel c = train_classifier(t.x, t.labels, {"a", "b"});
  // Perfect classifier on its own well separated data.
  Matrix cm = confusion_matrix(c, t.x, t.labels);
  CHECK(cm(0, 0) == 1.0);
  CHECK(cm(1, 1) == 1.0);
  // A classifier whose bias dominates predicts one class for every row.
  ClassifierModel constant = c;
  constant.weights.setZero();
  constant.weights(0, 0) = 5.0;
  std::vector<int> labels = t.labels;
  for (size_t i = 0; i < 100; ++i) labels[i * 2 + 1] = 0;  // priors 3/4, 1/4
  Matrix k = confusion_matrix(constant, t.x, labels);
  CHECK(k(0, 0) == doctest::Approx(0.75));
  CHECK(k(0, 1) == doctest::Approx(0.25));
  CHECK(k.row(1).sum() == 0.0);
}

TEST_CASE("gate anchors and simplex") {
  GatingModel g;
  g.means = {0.0};
  g.scales = {1.0};
  g.weights = Matrix::Zero(2, 3);
  Vector s(2);
  s << 0.5, 0.5;
  std::vector<double> x = {0.0};
  CHECK(gate(g, x, s)[0] == 0.5);
  g.weights(0, 0) = 20.0;
  x[0] = 1.0;
  CHECK(gate(g, x, s)[0] > 1.0 - 1e-8);

  GatingModel three;
  three.means = {0.0};
  three.scales = {1.0};
  three.weights = Matrix::Zero(3, 4);
  Vector s3 = Vector::Constant(3, 1.0 / 3.0);
  Vector p = gate(three, x, s3);
  for (int k = 0; k < 3; ++k) CHECK(p[k] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_THROWS_AS(gate(three, x, s), LearningError);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 30.0);
  for (int trial = 0; trial < 2000; ++trial) {
    GatingModel r;
    r.means = {0.0, 0.0};
    r.scales = {1.0, 1.0};
    r.weights = Matrix::Zero(4, 6);
    for (Eigen::Index i = 0; i < 3; ++i) {
      for (Eigen::Index j = 0; j < 6; ++j) r.weights(i, j) = n(rng);
    }
    Vector sv = Vector::Random(4).cwiseAbs();
    sv /= sv.sum();
    Vector out = gate(r, std::vector<double>{n(rng), n(rng)}, sv);
    CHECK(std::abs(out.sum() - 1.0) <= 1e-9);
    CHECK(out.minCoeff() >= 0.0);
    CHECK(out.maxCoeff() <= 1.0);
  }
}

TEST_CASE("fit_gating with identical experts") {
  TwoClusters t = two_clusters(5);
  ClassifierModel c = train_classifier(t.x, t.labels, {"sat", "unsat"});
  std::vector<RidgeModel> experts = {t.expert_a, t.expert_a};
  GatingFitTrace trace;
  fit_gating(experts, c, t.x, t.y, {}, &trace);
  Vector single = ridge_predict(t.expert_a, t.x);
  CHECK(trace.final_loss == doctest::Approx((t.y - single).squaredNorm()).epsilon(1e-9));
  CHECK(trace.final_loss <= trace.initial_loss);
}

TEST_CASE("fit_gating approaches the oracle assignment on two clusters") {
  for (uint64_t seed = 10; seed < 15; ++seed) {
    TwoClusters t = two_clusters(seed);
    ClassifierModel c = train_classifier(t.x, t.labels, {"sat", "unsat"});
    std::vector<RidgeModel> experts = {t.expert_a, t.expert_b};
    GatingFitTrace trace;
    GatingModel g = fit_gating(experts, c, t.x, t.y, {}, &trace);
    double oracle = 0.0;
    for (Eigen::Index i = 0; i < t.x.rows(); ++i) {
      const RidgeModel& e = t.labels[static_cast<size_t>(i)] == 0 ? t.expert_a : t.expert_b;
      double r = t.y[i] - ridge_predict(e, row_of(t.x, i));
      oracle += r * r;
    }
    CHECK(trace.final_loss <= trace.initial_loss);
    CHECK(trace.final_loss <= 1.05 * oracle);
    HierarchicalModel h;
    h.classes = {"sat", "unsat"};
    h.experts = experts;
    h.classifier = c;
    h.gating = g;
    h.validate();
    CHECK(mixture_loss(h, t.x, t.y) == doctest::Approx(trace.final_loss).epsilon(1e-9));
  }
}

TEST_CASE("predict_hier is a convex combination") {
  TwoClusters t = two_clusters(6);
  HierarchicalModel h;
  h.classes = {"sat", "unsat"};
  h.experts = {t.expert_a, t.expert_b};
  h.classifier = train_classifier(t.x, t.labels, h.classes);
  h.gating.means = h.classifier.means;
  h.gating.scales = h.classifier.scales;
  h.gating.weights = Matrix::Zero(2, 5);

  h.gating.weights(0, 3) = 1000.0;  // follows s_sat hard
  std::vector<double> x = {3.0, 0.7, 0.0};
  HierPrediction d = predict_hier_detail(h, x);
  CHECK(d.gate[0] == 1.0);
  CHECK(d.mean == ridge_predict(t.expert_a, x));

  h.gating.weights.setZero();
  std::vector<double> mid = {0.0, 0.0, 0.0};
  h.experts = {linear_expert(2.0, 0.0), linear_expert(4.0, 0.0)};
  CHECK(predict_hier(h, mid) == doctest::Approx(3.0).epsilon(1e-15));

  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 5.0);
  for (int trial = 0; trial < 1000; ++trial) {
    for (Eigen::Index i = 0; i < h.gating.weights.rows() - 1; ++i) {
      for (Eigen::Index j = 0; j < h.gating.weights.cols(); ++j) h.gating.weights(i, j) = g(rng);
    }
    h.experts = {linear_expert(g(rng), g(rng)), linear_expert(g(rng), g(rng))};
    std::vector<double> xr = {g(rng), g(rng), g(rng)};
    HierPrediction p = predict_hier_detail(h, xr);
    CHECK(p.mean >= p.expert.minCoeff());
    CHECK(p.mean <= p.expert.maxCoeff());
  }
}

TEST_CASE("train_hierarchical end to end") {
  TwoClusters t = two_clusters(7);
  LabeledDataset data;
  data.features = t.x;
  data.targets = t.y;
  data.censored.assign(t.y.size(), false);
  HierarchicalModel h = train_hierarchical(data, t.labels, {"sat", "unsat"});
  h.validate();
  CHECK(mixture_loss(h, t.x, t.y) / static_cast<double>(t.y.size()) < 0.05);
}

}  // namespace
}  // namespace zf
