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
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <iomanip>
#include <limits>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <thread>

#include "zf/harness.h"

namespace zf {

namespace {

EvaluationRow summarize(const std::string& id, const std::vector<double>& runtimes, const std::vector<bool>& solved,
                        double cutoff) {
  EvaluationRow row;
  row.solver_id = id;
  const size_t n = runtimes.size();
  std::vector<double> times;
  double total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (solved[i]) {
      total += runtimes[i];
      times.push_back(runtimes[i]);
    } else {
      total += cutoff;
    }
  }
  row.solved = static_cast<int>(times.size());
  if (n == 0) return row;
  row.average_runtime = total / static_cast<double>(n);
  row.percent_solved = 100.0 * static_cast<double>(times.size()) / static_cast<double>(n);
  std::sort(times.begin(), times.end());
  for (size_t k = 0; k < times.size(); ++k) {
    if (k + 1 < times.size() && times[k + 1] == times[k]) continue;
    row.cdf.push_back({times[k], static_cast<double>(k + 1) / static_cast<double>(n)});
  }
  if (row.cdf.empty() || row.cdf.back().time < cutoff) {
    row.cdf.push_back({cutoff, static_cast<double>(times.size()) / static_cast<double>(n)});
  }
  return row;
}

}  // namespace

DataSplit split_data(const std::vector<std::string>& ids, const std::array<double, 3>& ratios, uint64_t seed) {
  double sum = 0.0;
  for (double r : ratios) {
    if (!(r >= 0.0)) throw HarnessError(HarnessError::Kind::kInvalidArgument, "split ratios must be nonnegative");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw HarnessError(HarnessError::Kind::kInvalidArgument, "split ratios must sum to 1");

  const size_t n = ids.size();
  std::array<size_t, 3> sizes{};
  std::array<double, 3> remainder{};
  size_t assigned = 0;
  for (size_t k = 0; k < 3; ++k) {
    const double share = ratios[k] * static_cast<double>(n);
    sizes[k] = static_cast<size_t>(std::floor(share));
    remainder[k] = share - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::array<size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return remainder[a] > remainder[b]; });
  for (size_t k = 0; assigned < n; ++k, ++assigned) ++sizes[order[k % 3]];

  std::vector<std::string> shuffled = ids;
  std::mt19937_64 rng(seed);
  for (size_t i = shuffled.size(); i > 1; --i) {
    std::uniform_int_distribution<size_t> pick(0, i - 1);
    std::swap(shuffled[i - 1], shuffled[pick(rng)]);
  }
  DataSplit split;
  auto first = shuffled.begin();
  split.train.assign(first, first + static_cast<std::ptrdiff_t>(sizes[0]));
  first += static_cast<std::ptrdiff_t>(sizes[0]);
  split.validation.assign(first, first + static_cast<std::ptrdiff_t>(sizes[1]));
  first += static_cast<std::ptrdiff_t>(sizes[1]);
  split.test.assign(first, shuffled.end());
  return split;
}

DropResult drop_unsolvable(const RuntimeMatrix& matrix) {
  matrix.require_complete();
  DropResult result;
  for (size_t i = 0; i < matrix.num_instances(); ++i) {
    bool any = false;
    for (size_t s = 0; s < matrix.num_solvers() && !any; ++s) any = matrix.solved(s, i);
    (any ? result.kept : result.dropped).push_back(matrix.instances()[i]);
  }
  if (matrix.num_instances() > 0) {
    result.retained_fraction = static_cast<double>(result.kept.size()) / static_cast<double>(matrix.num_instances());
  }
  return result;
}

const EvaluationRow& EvaluationReport::row(const std::string& solver_id) const {
  for (const auto& r : rows) {
    if (r.solver_id == solver_id) return r;
  }
  if (solver_id == oracle.solver_id) return oracle;
  throw DataError(DataError::Kind::kUnknownId, "no evaluation row for " + solver_id);
}

EvaluationReport evaluate(const RuntimeMatrix& matrix, const PurseConfig& purse, const SeriesMap& series,
                          const std::vector<std::string>& subset) {
  matrix.require_complete();
  const size_t n = matrix.num_instances();
  const double cutoff = matrix.cutoff();
  EvaluationReport report;
  report.num_instances = n;

  std::vector<ScoreBreakdown> totals = competition_score(matrix, purse, series);
  for (size_t s = 0; s < matrix.num_solvers(); ++s) {
    std::vector<double> runtimes(n);
    std::vector<bool> solved(n);
    for (size_t i = 0; i < n; ++i) {
      runtimes[i] = matrix.at(s, i).runtime_seconds;
      solved[i] = matrix.solved(s, i);
    }
    report.rows.push_back(summarize(matrix.solvers()[s], runtimes, solved, cutoff));
    report.rows.back().score = totals[s].total();
  }

  std::vector<size_t> members;
  if (subset.empty()) {
    members.resize(matrix.num_solvers());
    std::iota(members.begin(), members.end(), size_t{0});
  } else {
    for (const auto& id : subset) members.push_back(matrix.solver_index(id));
  }
  // Oracle: fastest solving member per instance, at zero overhead.
  RuntimeMatrix with_oracle = matrix;
  const size_t oracle_col = with_oracle.add_solver("oracle");
  std::vector<double> runtimes(n, cutoff);
  std::vector<bool> solved(n, false);
  for (size_t i = 0; i < n; ++i) {
    std::optional<size_t> best;
    for (size_t s : members) {
      if (!matrix.solved(s, i)) continue;
      if (!best || matrix.at(s, i).runtime_seconds < matrix.at(*best, i).runtime_seconds) best = s;
    }
    RunRecord r = best ? matrix.at(*best, i)
                       : make_record("oracle", matrix.instances()[i], cutoff, RunStatus::kTimeout, cutoff);
    r.solver_id = "oracle";
    if (best) {
      runtimes[i] = r.runtime_seconds;
      solved[i] = true;
    }
    with_oracle.set(oracle_col, i, r);
  }
  report.oracle = summarize("oracle", runtimes, solved, cutoff);
  report.oracle.score = competition_score(with_oracle, purse, series)[oracle_col].total();
  return report;
}

void write_evaluation_csv(const EvaluationReport& report, std::ostream& out) {
  out << "solver_id,average_runtime,percent_solved,solved,score\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  auto line = [&](const EvaluationRow& r) {
    out << r.solver_id << ',' << r.average_runtime << ',' << r.percent_solved << ',' << r.solved << ',' << r.score
        << '\n';
  };
  for (const auto& r : report.rows) line(r);
  line(report.oracle);
}

void write_cdf_csv(const EvaluationReport& report, std::ostream& out) {
  out << "solver_id,time,fraction_solved\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  auto emit = [&](const EvaluationRow& r) {
    for (const auto& p : r.cdf) out << r.solver_id << ',' << p.time << ',' << p.fraction_solved << '\n';
  };
  for (const auto& r : report.rows) emit(r);
  emit(report.oracle);
}

int worker_count() {
  if (const char* env = std::getenv("ZF_WORKERS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min<long>(v, 1024));
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
  const size_t threads = std::min(n, static_cast<size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace zf
