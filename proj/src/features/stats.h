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

#ifndef ZF_SRC_FEATURES_STATS_H_
#define ZF_SRC_FEATURES_STATS_H_

#include <span>
#include <vector>

namespace zf::stats {

struct Summary {
  double mean = 0.0;
  double coeff = 0.0;  // sample stddev / mean, 0 when mean == 0
  double min = 0.0;
  double max = 0.0;
};

// All-zero summary for an empty sample.
Summary summarize(std::span<const double> values);

double sample_stddev(std::span<const double> values);

// Shannon entropy (nats) over the distinct values of an integer-valued sample.
double discrete_entropy(std::span<const double> values);

// Shannon entropy (nats) of values in [0,1] histogrammed into equal-width bins.
double binned_entropy(std::span<const double> values, int bins = 100);

// Linear-interpolation quantile (q in [0,1]); sorts a copy.
double quantile(std::vector<double> values, double q);

}  // namespace zf::stats

#endif  // ZF_SRC_FEATURES_STATS_H_
