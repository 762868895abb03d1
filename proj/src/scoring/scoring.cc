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

#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "zf/scoring.h"

namespace zf {

namespace {

using Kind = ScoringError::Kind;

// Instance indices grouped by series, in first-appearance order.
std::vector<std::vector<size_t>> group_series(const std::vector<std::string>& series) {
  std::unordered_map<std::string, size_t> pos;
  std::vector<std::vector<size_t>> groups;
  for (size_t i = 0; i < series.size(); ++i) {
    auto [it, fresh] = pos.emplace(series[i], groups.size());
    if (fresh) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

void check_shape(const std::vector<std::vector<bool>>& solved, const std::vector<std::string>& series) {
  for (const auto& row : solved) {
    if (row.size() != series.size()) throw ScoringError(Kind::kInvalidConfig, "solved matrix and series disagree");
  }
}

std::vector<std::vector<bool>> scored_matrix(const RuntimeMatrix& matrix, const PurseConfig& purse) {
  std::vector<std::vector<bool>> out(matrix.num_solvers(), std::vector<bool>(matrix.num_instances(), false));
  for (size_t s = 0; s < matrix.num_solvers(); ++s) {
    for (size_t i = 0; i < matrix.num_instances(); ++i) out[s][i] = scores(matrix.at(s, i), purse);
  }
  return out;
}

std::vector<RunRecord> column(const RuntimeMatrix& matrix, size_t instance) {
  std::vector<RunRecord> out;
  for (size_t s = 0; s < matrix.num_solvers(); ++s) out.push_back(matrix.at(s, instance));
  return out;
}

}  // namespace

void PurseConfig::validate() const {
  if (!(solution_purse >= 0.0) || !(speed_purse >= 0.0) || !(series_purse >= 0.0) || !(time_limit > 0.0)) {
    throw ScoringError(Kind::kInvalidConfig, "purses must be nonnegative and the time limit positive");
  }
}

std::vector<std::string> series_of(const SeriesMap& series, const std::vector<std::string>& instances) {
  std::vector<std::string> out;
  out.reserve(instances.size());
  for (const auto& id : instances) {
    auto it = series.find(id);
    out.push_back(it == series.end() ? id : it->second);
  }
  return out;
}

double speed_factor(double time_limit, double time_used) { return time_limit / (1.0 + time_used); }

bool scores(const RunRecord& record, const PurseConfig& purse) {
  return is_solved(record.status) && record.runtime_seconds <= purse.time_limit;
}

std::vector<ScoreBreakdown> instance_scores(std::span<const RunRecord> records, const PurseConfig& purse) {
  std::vector<ScoreBreakdown> out(records.size());
  size_t winners = 0;
  double sf_sum = 0.0;
  for (const RunRecord& r : records) {
    if (!scores(r, purse)) continue;
    ++winners;
    sf_sum += speed_factor(purse.time_limit, r.runtime_seconds);
  }
  if (winners == 0) return out;
  for (size_t k = 0; k < records.size(); ++k) {
    if (!scores(records[k], purse)) continue;
    out[k].solution = purse.solution_purse / static_cast<double>(winners);
    out[k].speed = purse.speed_purse * speed_factor(purse.time_limit, records[k].runtime_seconds) / sf_sum;
  }
  return out;
}

std::vector<double> series_scores(const std::vector<std::vector<bool>>& solved, const std::vector<std::string>& series,
                                  const PurseConfig& purse) {
  check_shape(solved, series);
  std::vector<double> totals(solved.size(), 0.0);
  for (const auto& group : group_series(series)) {
    std::vector<size_t> winners;
    for (size_t s = 0; s < solved.size(); ++s) {
      for (size_t i : group) {
        if (solved[s][i]) {
          winners.push_back(s);
          break;
        }
      }
    }
    for (size_t s : winners) totals[s] += purse.series_purse / static_cast<double>(winners.size());
  }
  return totals;
}

std::vector<std::vector<double>> independent_series_share(const std::vector<std::vector<bool>>& solved,
                                                          const std::vector<std::string>& series,
                                                          const PurseConfig& purse) {
  check_shape(solved, series);
  std::vector<std::vector<double>> share(solved.size(), std::vector<double>(series.size(), 0.0));
  for (const auto& group : group_series(series)) {
    size_t solvable = 0;  // N
    for (size_t i : group) {
      for (const auto& row : solved) {
        if (row[i]) {
          ++solvable;
          break;
        }
      }
    }
    size_t scorers = 0;  // n
    for (const auto& row : solved) {
      for (size_t i : group) {
        if (row[i]) {
          ++scorers;
          break;
        }
      }
    }
    if (solvable == 0 || scorers == 0) continue;
    const double unit = purse.series_purse / (static_cast<double>(solvable) * static_cast<double>(scorers));
    for (size_t s = 0; s < solved.size(); ++s) {
      for (size_t i : group) {
        if (solved[s][i]) share[s][i] = unit;
      }
    }
  }
  return share;
}

std::vector<double> score_labels(const RuntimeMatrix& matrix, const std::string& candidate, const PurseConfig& purse,
                                 const SeriesMap& series) {
  purse.validate();
  auto c = matrix.find_solver(candidate);
  if (!c) throw ScoringError(Kind::kMissingReferenceRuns, "candidate '" + candidate + "' not in runtime matrix");
  if (!matrix.complete()) throw ScoringError(Kind::kMissingReferenceRuns, "runtime matrix has missing runs");
  auto solved = scored_matrix(matrix, purse);
  auto share = independent_series_share(solved, series_of(series, matrix.instances()), purse);
  std::vector<double> labels(matrix.num_instances(), 0.0);
  for (size_t i = 0; i < matrix.num_instances(); ++i) {
    std::vector<RunRecord> records = column(matrix, i);
    ScoreBreakdown b = instance_scores(records, purse)[*c];
    labels[i] = b.solution + b.speed + share[*c][i];
  }
  return labels;
}

std::vector<ScoreBreakdown> competition_score(const RuntimeMatrix& matrix, const PurseConfig& purse,
                                              const SeriesMap& series) {
  purse.validate();
  matrix.require_complete();
  std::vector<ScoreBreakdown> totals(matrix.num_solvers());
  for (size_t i = 0; i < matrix.num_instances(); ++i) {
    std::vector<RunRecord> records = column(matrix, i);
    std::vector<ScoreBreakdown> shares = instance_scores(records, purse);
    for (size_t s = 0; s < totals.size(); ++s) {
      totals[s].solution += shares[s].solution;
      totals[s].speed += shares[s].speed;
    }
  }
  std::vector<double> series_totals = series_scores(scored_matrix(matrix, purse), series_of(series, matrix.instances()), purse);
  for (size_t s = 0; s < totals.size(); ++s) totals[s].series = series_totals[s];
  return totals;
}

ScoringSetup read_scoring_setup(std::istream& in) {
  ScoringSetup setup;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
    setup.purse.solution_purse = doc.value("solution_purse", setup.purse.solution_purse);
    setup.purse.speed_purse = doc.value("speed_purse", setup.purse.speed_purse);
    setup.purse.series_purse = doc.value("series_purse", setup.purse.series_purse);
    setup.purse.time_limit = doc.value("time_limit", setup.purse.time_limit);
    if (doc.contains("series")) {
      for (const auto& [series_id, members] : doc.at("series").items()) {
        for (const auto& inst : members) {
          auto [it, fresh] = setup.series.emplace(inst.get<std::string>(), series_id);
          if (!fresh && it->second != series_id) {
            throw ScoringError(Kind::kInvalidConfig, "instance " + it->first + " listed in two series");
          }
        }
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ScoringError(Kind::kInvalidConfig, std::string("bad scoring setup: ") + e.what());
  }
  setup.purse.validate();
  return setup;
}

ScoringSetup read_scoring_setup_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScoringError(Kind::kInvalidConfig, "cannot open " + path);
  return read_scoring_setup(in);
}

void write_scoring_setup(const ScoringSetup& setup, std::ostream& out) {
  nlohmann::json doc;
  doc["solution_purse"] = setup.purse.solution_purse;
  doc["speed_purse"] = setup.purse.speed_purse;
  doc["series_purse"] = setup.purse.series_purse;
  doc["time_limit"] = setup.purse.time_limit;
  nlohmann::json series = nlohmann::json::object();
  for (const auto& [inst, sid] : setup.series) series[sid].push_back(inst);
  doc["series"] = series;
  out << doc.dump(2) << '\n';
}

void write_score_report(const std::vector<std::string>& solvers, const std::vector<ScoreBreakdown>& scores,
                        std::ostream& out) {
  out << "solver_id,solution,speed,series,total\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (size_t s = 0; s < solvers.size() && s < scores.size(); ++s) {
    out << solvers[s] << ',' << scores[s].solution << ',' << scores[s].speed << ',' << scores[s].series << ','
        << scores[s].total() << '\n';
  }
}

}  // namespace zf
