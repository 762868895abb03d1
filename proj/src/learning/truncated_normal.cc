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
#include <limits>
#include <numbers>

#include "zf/learning.h"

namespace zf {

namespace {

// Inverse Mills ratio phi(a) / (1 - Phi(a)).
double inverse_mills(double a) {
  if (a < 8.0) {
    const double pdf = std::exp(-0.5 * a * a) / std::sqrt(2.0 * std::numbers::pi);
    const double tail = 0.5 * std::erfc(a / std::numbers::sqrt2);
    return pdf / tail;
  }
  // Continued fraction (1 - Phi(a)) / phi(a) = 1/(a + 1/(a + 2/(a + ...))).
  double t = a;
  for (int k = 60; k >= 1; --k) t = a + k / t;
  return t;
}

}  // namespace

double truncated_normal_mean(double mu, double sigma, double lower) {
  if (!(sigma > 0.0)) {
    if (sigma == 0.0) return std::max(mu, lower);
    throw LearningError(LearningError::Kind::kInvalidArgument, "truncated normal needs sigma > 0");
  }
  if (lower == -std::numeric_limits<double>::infinity()) return mu;
  const double a = (lower - mu) / sigma;
  return std::max(lower, mu + sigma * inverse_mills(a));
}

}  // namespace zf
