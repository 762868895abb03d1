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

#ifndef ZF_LEARNING_H_
#define ZF_LEARNING_H_

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace zf {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

class LearningError : public std::runtime_error {
 public:
  enum class Kind {
    kDimensionMismatch,
    kEmptyCandidates,
    kNoUncensoredData,
    kSingleClassData,
    kInvalidArgument,
  };

  LearningError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

inline constexpr double kDefaultRidgePenalty = 1e-3;
// Recorded runtimes are clamped to this before taking logs.
inline constexpr double kMinRuntimeSeconds = 0.005;

// Basis functions: selected raw features, then products x_j * x_k (j <= k),
// each standardized with the stored mean and scale. Indices are 0-based.
struct BasisSpec {
  size_t num_raw = 0;  // m, length of the raw input vector
  std::vector<int> raw_indices;
  std::vector<std::pair<int, int>> product_pairs;
  std::vector<double> means;
  std::vector<double> scales;

  size_t dimension() const { return raw_indices.size() + product_pairs.size(); }

  // Throws kDimensionMismatch / kInvalidArgument on inconsistent specs.
  void validate() const;

  // Unit normalization (means 0, scales 1) for the current terms.
  static BasisSpec identity(size_t num_raw, std::vector<int> raw, std::vector<std::pair<int, int>> pairs);

  bool operator==(const BasisSpec&) const = default;
};

enum class Target { kLogRuntime, kScore };

std::string to_string(Target target);
Target target_from_string(const std::string& name);

struct RidgeModel {
  BasisSpec basis;
  std::vector<double> weights;  // one per basis term
  double bias = 0.0;            // unpenalized intercept
  double delta = kDefaultRidgePenalty;
  double sigma = 0.0;
  Target target = Target::kLogRuntime;

  void validate() const;
  bool operator==(const RidgeModel&) const = default;
};

struct LabeledDataset {
  Matrix features;  // n x m raw feature rows
  Vector targets;
  std::vector<bool> censored;  // true: target is a lower bound (== cutoff_log)
  double cutoff_log = 0.0;

  size_t rows() const { return static_cast<size_t>(features.rows()); }
  void validate() const;
  LabeledDataset subset(std::span<const size_t> rows) const;
};

// Unstandardized basis columns for every row of raw.
Matrix raw_basis_columns(const Matrix& raw, const std::vector<int>& raw_indices,
                         const std::vector<std::pair<int, int>>& pairs);

Vector quadratic_expand(std::span<const double> x, const BasisSpec& basis);
Matrix quadratic_expand(const Matrix& raw, const BasisSpec& basis);

// Fills basis.means / basis.scales from the training rows.
void fit_normalization(BasisSpec& basis, const Matrix& raw);

// w = (delta I + Phi^T Phi)^{-1} Phi^T y via QR of the augmented system.
Vector ridge_fit(const Matrix& phi, const Vector& y, double delta);

// Fits weights, bias and residual sigma for a fixed basis. sigma_rows, when
// non-empty, restricts the residual estimate to those rows.
RidgeModel fit_ridge_model(const Matrix& raw, const Vector& y, BasisSpec basis, double delta, Target target,
                           std::span<const size_t> sigma_rows = {});

double ridge_predict(const RidgeModel& model, std::span<const double> x);
Vector ridge_predict(const RidgeModel& model, const Matrix& raw);

struct ForwardSelectOptions {
  int folds = 10;
  int max_terms = 30;
  double delta = kDefaultRidgePenalty;
};

struct ForwardSelectResult {
  std::vector<int> selected;        // candidate column indices in selection order
  std::vector<double> cv_rmse;      // CV RMSE after each addition
  double baseline_rmse = 0.0;       // intercept-only CV RMSE
};

// Greedy forward selection over the columns of `columns` named by
// `candidates`, scored by k-fold cross-validated RMSE of a ridge fit. Fold
// membership depends on row content only, so row order does not matter.
ForwardSelectResult forward_select(const Matrix& columns, const Vector& y, std::span<const int> candidates,
                                   const ForwardSelectOptions& options);

// E[Y | Y >= lower] for Y ~ Normal(mu, sigma).
double truncated_normal_mean(double mu, double sigma, double lower);

struct CensoredFitOptions {
  double delta = kDefaultRidgePenalty;
  double tol = 1e-6;
  int max_iter = 50;
};

struct CensoredFitTrace {
  int iterations = 0;
  double min_imputed_margin = 0.0;  // min over iterations of imputed - cutoff_log
};

// Schmee & Hahn iteration for a fixed basis.
RidgeModel censored_fit(const LabeledDataset& data, BasisSpec basis, Target target,
                        const CensoredFitOptions& options = {}, CensoredFitTrace* trace = nullptr);

struct HardnessModelOptions {
  ForwardSelectOptions raw_pass{10, 30, kDefaultRidgePenalty};
  ForwardSelectOptions expanded_pass{10, 40, kDefaultRidgePenalty};
  CensoredFitOptions censored;
  Target target = Target::kLogRuntime;
};

// Full pipeline: forward selection on raw features, quadratic expansion of
// the survivors, a second selection pass, then a (censored) ridge fit.
RidgeModel train_hardness_model(const LabeledDataset& data, const HardnessModelOptions& options);

double log_runtime(double seconds);

}  // namespace zf

#endif  // ZF_LEARNING_H_
