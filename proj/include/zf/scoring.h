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

#ifndef ZF_SCORING_H_
#define ZF_SCORING_H_

#include <iosfwd>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zf/runtime_matrix.h"

namespace zf {

class ScoringError : public std::runtime_error {
 public:
  enum class Kind { kMissingReferenceRuns, kInvalidConfig };

  ScoringError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct PurseConfig {
  double solution_purse = 1000.0;  // per instance
  double speed_purse = 1000.0;     // per instance
  double series_purse = 300.0;     // per series
  double time_limit = 1200.0;

  void validate() const;
  bool operator==(const PurseConfig&) const = default;
};

// instance id -> series id.
using SeriesMap = std::map<std::string, std::string>;

// Series id of every instance, in instance order; unlisted instances form
// singleton series named after themselves.
std::vector<std::string> series_of(const SeriesMap& series, const std::vector<std::string>& instances);

struct ScoreBreakdown {
  double solution = 0.0;
  double speed = 0.0;
  double series = 0.0;

  double total() const { return solution + speed + series; }
  bool operator==(const ScoreBreakdown&) const = default;
};

// time_limit / (1 + time_used).
double speed_factor(double time_limit, double time_used);

// A run earns purse shares if it is sat/unsat within the time limit.
bool scores(const RunRecord& record, const PurseConfig& purse);

// Solution and speed shares (series left at 0) of every record for one
// instance.
std::vector<ScoreBreakdown> instance_scores(std::span<const RunRecord> records, const PurseConfig& purse);

// Exact series totals per solver. solved[s][i] says whether solver s scored
// on instance i; series[i] names the series of instance i.
std::vector<double> series_scores(const std::vector<std::vector<bool>>& solved, const std::vector<std::string>& series,
                                  const PurseConfig& purse);

// Per (solver, instance) share SeriesP / (N n) of the independent
// approximation, 0 where the solver did not score or the share is undefined.
std::vector<std::vector<double>> independent_series_share(const std::vector<std::vector<bool>>& solved,
                                                          const std::vector<std::string>& series,
                                                          const PurseConfig& purse);

// Per-instance score labels of `candidate`, with every other solver in the
// matrix acting as a reference competitor.
std::vector<double> score_labels(const RuntimeMatrix& matrix, const std::string& candidate, const PurseConfig& purse,
                                 const SeriesMap& series);

// Exact competition totals per solver, in matrix solver order.
std::vector<ScoreBreakdown> competition_score(const RuntimeMatrix& matrix, const PurseConfig& purse,
                                              const SeriesMap& series);

// Purse/series configuration document:
// {"solution_purse":..,"speed_purse":..,"series_purse":..,"time_limit":..,
//  "series":{"<series id>":["<instance id>",...]}}
struct ScoringSetup {
  PurseConfig purse;
  SeriesMap series;
};

ScoringSetup read_scoring_setup(std::istream& in);
ScoringSetup read_scoring_setup_file(const std::string& path);
void write_scoring_setup(const ScoringSetup& setup, std::ostream& out);

// CSV report: solver_id,solution,speed,series,total
void write_score_report(const std::vector<std::string>& solvers, const std::vector<ScoreBreakdown>& scores,
                        std::ostream& out);

}  // namespace zf

#endif  // ZF_SCORING_H_
