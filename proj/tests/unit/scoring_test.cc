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
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "zf/scoring.h"

namespace zf {
namespace {

RunRecord rec(const std::string& s, const std::string& i, double t, RunStatus st, double cutoff = 1200) {
  return make_record(s, i, t, st, cutoff);
}

// Random complete matrix with solved/timeout/crash cells.
RuntimeMatrix random_matrix(std::mt19937_64& rng, size_t solvers, size_t instances) {
  std::vector<std::string> s_ids, i_ids;
  for (size_t s = 0; s < solvers; ++s) s_ids.push_back("s" + std::to_string(s));
  for (size_t i = 0; i < instances; ++i) i_ids.push_back("i" + std::to_string(i));
  RuntimeMatrix m(s_ids, i_ids, 1200);
  std::uniform_real_distribution<double> t(0.0, 1200.0);
  for (size_t i = 0; i < instances; ++i) {
    RunStatus answer = rng() % 2 ? RunStatus::kSat : RunStatus::kUnsat;
    for (size_t s = 0; s < solvers; ++s) {
      int roll = static_cast<int>(rng() % 10);
      RunStatus st = roll < 5 ? answer : (roll < 9 ? RunStatus::kTimeout : RunStatus::kCrash);
      m.set(s, i, rec(s_ids[s], i_ids[i], roll == 0 ? 0.0 : t(rng), st));
    }
  }
  return m;
}

SeriesMap random_series(std::mt19937_64& rng, const RuntimeMatrix& m) {
  SeriesMap series;
  for (const auto& id : m.instances()) {
    if (rng() % 4) series[id] = "series" + std::to_string(rng() % 4);
  }
  return series;
}

// Spreadsheet-style totals computed directly from the definitions.
std::vector<ScoreBreakdown> brute_force_scores(const RuntimeMatrix& m, const PurseConfig& p, const SeriesMap& series) {
  const size_t ns = m.num_solvers(), ni = m.num_instances();
  auto ok = [&](size_t s, size_t i) {
    const RunRecord& r = m.at(s, i);
    return (r.status == RunStatus::kSat || r.status == RunStatus::kUnsat) && r.runtime_seconds <= p.time_limit;
  };
  std::vector<ScoreBreakdown> out(ns);
  for (size_t i = 0; i < ni; ++i) {
    double count = 0, sf_total = 0;
    for (size_t s = 0; s < ns; ++s) {
      if (ok(s, i)) {
        count += 1;
        sf_total += p.time_limit / (1 + m.at(s, i).runtime_seconds);
      }
    }
    for (size_t s = 0; s < ns; ++s) {
      if (!ok(s, i)) continue;
      out[s].solution += p.solution_purse / count;
      out[s].speed += p.speed_purse * (p.time_limit / (1 + m.at(s, i).runtime_seconds)) / sf_total;
    }
  }
  std::set<std::string> names;
  auto sid = [&](size_t i) {
    auto it = series.find(m.instances()[i]);
    return it == series.end() ? m.instances()[i] : it->second;
  };
  for (size_t i = 0; i < ni; ++i) names.insert(sid(i));
  for (const auto& name : names) {
    std::vector<size_t> winners;
    for (size_t s = 0; s < ns; ++s) {
      bool any = false;
      for (size_t i = 0; i < ni; ++i) any = any || (sid(i) == name && ok(s, i));
      if (any) winners.push_back(s);
    }
    for (size_t s : winners) out[s].series += p.series_purse / static_cast<double>(winners.size());
  }
  return out;
}

TEST_CASE("speed factor spot values") {
  CHECK(speed_factor(1200, 0) == 1200.0);
  CHECK(speed_factor(1200, 1199) == 1.0);
  CHECK(speed_factor(1200, 599) == 2.0);
}

TEST_CASE("instance score examples") {
  PurseConfig p;
  std::vector<RunRecord> two = {rec("a", "x", 0, RunStatus::kSat), rec("b", "x", 1199, RunStatus::kSat)};
  auto s = instance_scores(two, p);
  CHECK(s[0].solution == 500.0);
  CHECK(s[1].solution == 500.0);
  CHECK(s[0].speed == doctest::Approx(1000.0 * 1200 / 1201));
  CHECK(s[1].speed == doctest::Approx(1000.0 / 1201));
  std::vector<RunRecord> none = {rec("a", "x", 5, RunStatus::kCrash), rec("b", "x", 1200, RunStatus::kTimeout)};
  for (const auto& b : instance_scores(none, p)) CHECK(b.total() == 0.0);
}

TEST_CASE("series score examples") {
  PurseConfig p;
  std::vector<std::string> series = {"A", "A"};
  std::vector<std::vector<bool>> solved = {{true, false}, {false, true}, {false, false}};
  auto t = series_scores(solved, series, p);
  CHECK(t == std::vector<double>{150, 150, 0});
  auto nobody = series_scores({{false, false}}, series, p);
  CHECK(nobody[0] == 0.0);
}

TEST_CASE("independent series share examples") {
  PurseConfig p;
  std::vector<std::string> series = {"A", "A", "A"};
  std::vector<std::vector<bool>> solved = {{true, true, true}, {true, false, false}};
  auto share = independent_series_share(solved, series, p);
  CHECK(share[0][0] == 50.0);
  double full = share[0][0] + share[0][1] + share[0][2];
  CHECK(full == doctest::Approx(p.series_purse / 2));
  CHECK(share[1][0] < p.series_purse / 2);
}

TEST_CASE("score labels") {
  PurseConfig p;
  RuntimeMatrix m({"ref", "cand"}, {"x", "y"}, 1200);
  m.set(rec("ref", "x", 1200, RunStatus::kTimeout));
  m.set(rec("cand", "x", 3, RunStatus::kSat));
  m.set(rec("ref", "y", 10, RunStatus::kUnsat));
  m.set(rec("cand", "y", 1200, RunStatus::kTimeout));
  auto labels = score_labels(m, "cand", p, {});
  CHECK(labels[0] == doctest::Approx(p.solution_purse + p.speed_purse + p.series_purse));
  CHECK(labels[1] == 0.0);
  auto ref = score_labels(m, "ref", p, {});
  CHECK(ref[0] == 0.0);
  CHECK_THROWS_AS(score_labels(m, "ghost", p, {}), ScoringError);
  RuntimeMatrix partial({"ref", "cand"}, {"x"}, 1200);
  partial.set(rec("cand", "x", 3, RunStatus::kSat));
  CHECK_THROWS_AS(score_labels(partial, "cand", p, {}), ScoringError);
}

TEST_CASE("competition score examples") {
  PurseConfig p;
  RuntimeMatrix solo({"only"}, {"a", "b", "c"}, 1200);
  for (const auto& i : solo.instances()) solo.set(rec("only", i, 7, RunStatus::kSat));
  auto t = competition_score(solo, p, {{"a", "S"}, {"b", "S"}});
  CHECK(t[0].total() == doctest::Approx(3 * (p.solution_purse + p.speed_purse) + 2 * p.series_purse));

  RuntimeMatrix twins({"a", "b"}, {"x", "y"}, 1200);
  for (const auto& s : twins.solvers()) {
    twins.set(rec(s, "x", 4, RunStatus::kSat));
    twins.set(rec(s, "y", 1200, RunStatus::kTimeout));
  }
  auto tw = competition_score(twins, p, {});
  CHECK(tw[0] == tw[1]);
}

TEST_CASE("competition score matches the brute-force oracle") {
  std::mt19937_64 rng(77);
  PurseConfig p;
  for (int trial = 0; trial < 50; ++trial) {
    RuntimeMatrix m = random_matrix(rng, 3, 6);
    SeriesMap series = random_series(rng, m);
    auto got = competition_score(m, p, series);
    auto want = brute_force_scores(m, p, series);
    for (size_t s = 0; s < got.size(); ++s) {
      CHECK(got[s].solution == doctest::Approx(want[s].solution).epsilon(1e-12));
      CHECK(got[s].speed == doctest::Approx(want[s].speed).epsilon(1e-12));
      CHECK(got[s].series == doctest::Approx(want[s].series).epsilon(1e-12));
    }
  }
}

TEST_CASE("conservation, bound, monotonicity and permutation properties") {
  std::mt19937_64 rng(78);
  PurseConfig p;
  for (int trial = 0; trial < 40; ++trial) {
    RuntimeMatrix m = random_matrix(rng, 2 + rng() % 4, 4 + rng() % 10);
    SeriesMap series = random_series(rng, m);
    auto totals = competition_score(m, p, series);
    double sum = 0;
    for (const auto& t : totals) sum += t.total();
    size_t solved_instances = 0;
    std::set<std::string> scoring_series;
    auto sids = series_of(series, m.instances());
    for (size_t i = 0; i < m.num_instances(); ++i) {
      bool any = false;
      for (size_t s = 0; s < m.num_solvers(); ++s) any = any || m.solved(s, i);
      if (any) {
        ++solved_instances;
        scoring_series.insert(sids[i]);
      }
    }
    CHECK(sum == doctest::Approx(static_cast<double>(solved_instances) * (p.solution_purse + p.speed_purse) +
                                 static_cast<double>(scoring_series.size()) * p.series_purse));

    // A solver that never scores changes nobody else's totals.
    RuntimeMatrix bigger = m;
    size_t idle = bigger.add_solver("idle");
    for (size_t i = 0; i < bigger.num_instances(); ++i) {
      bigger.set(idle, i, rec("idle", bigger.instances()[i], 1200, RunStatus::kTimeout));
    }
    auto with_idle = competition_score(bigger, p, series);
    CHECK(with_idle.back().total() == 0.0);
    for (size_t s = 0; s < totals.size(); ++s) CHECK(with_idle[s].total() == doctest::Approx(totals[s].total()));

    std::vector<size_t> order(m.num_instances());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    auto shuffled = competition_score(m.select_instances(std::span<const size_t>(order)), p, series);
    for (size_t s = 0; s < totals.size(); ++s) CHECK(shuffled[s].total() == doctest::Approx(totals[s].total()));
  }
}

TEST_CASE("scoring setup round trip and CSV report") {
  ScoringSetup setup;
  setup.purse.series_purse = 120;
  setup.series = {{"a", "S1"}, {"b", "S1"}, {"c", "S2"}};
  std::stringstream buffer;
  write_scoring_setup(setup, buffer);
  ScoringSetup back = read_scoring_setup(buffer);
  CHECK(back.purse == setup.purse);
  CHECK(back.series == setup.series);

  std::istringstream bad(R"({"time_limit": -1})");
  CHECK_THROWS_AS(read_scoring_setup(bad), ScoringError);

  std::ostringstream csv;
  write_score_report({"x"}, {ScoreBreakdown{1, 2, 3}}, csv);
  CHECK(csv.str() == "solver_id,solution,speed,series,total\nx,1,2,3,6\n");
}

TEST_CASE("runtime matrix invariants") {
  RuntimeMatrix m({"a", "b"}, {"x"}, 100);
  m.set(rec("a", "x", 3, RunStatus::kSat, 100));
  CHECK_THROWS_AS(m.set(rec("b", "x", 3, RunStatus::kUnsat, 100)), DataError);
  RunRecord late = rec("b", "x", 250, RunStatus::kSat, 100);
  CHECK(late.status == RunStatus::kTimeout);
  CHECK(late.runtime_seconds == 100);
  CHECK(late.censored);
  RunRecord bad = late;
  bad.runtime_seconds = 50;
  CHECK_THROWS_AS(m.set(bad), DataError);
  CHECK(m.satisfiable(0) == std::optional<bool>(true));
  CHECK_FALSE(m.complete());
}

}  // namespace
}  // namespace zf
