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

#include "stats.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace zf::stats {

double sample_stddev(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(values.size());
  // Guard against rounding pushing the mean outside [min, max].
  s.mean = std::clamp(s.mean, s.min, s.max);
  s.coeff = s.mean == 0.0 ? 0.0 : sample_stddev(values) / s.mean;
  return s;
}

namespace {

template <typename Counts>
double entropy_of_counts(const Counts& counts, double total) {
  if (total <= 0.0) return 0.0;
  double h = 0.0;
  for (const auto& [key, count] : counts) {
    if (count == 0) continue;
    double p = static_cast<double>(count) / total;
    h -= p * std::log(p);
  }
  return std::max(0.0, h);
}

}  // namespace

double discrete_entropy(std::span<const double> values) {
  std::map<double, size_t> counts;
  for (double v : values) ++counts[v];
  return entropy_of_counts(counts, static_cast<double>(values.size()));
}

double binned_entropy(std::span<const double> values, int bins) {
  std::map<int, size_t> counts;
  for (double v : values) {
    int bin = static_cast<int>(std::floor(v * bins));
    ++counts[std::clamp(bin, 0, bins - 1)];
  }
  return entropy_of_counts(counts, static_cast<double>(values.size()));
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  double pos = q * static_cast<double>(values.size() - 1);
  size_t lo = static_cast<size_t>(std::floor(pos));
  size_t hi = std::min(lo + 1, values.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace zf::stats
