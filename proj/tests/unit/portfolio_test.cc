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
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "zf/persistence.h"
#include "zf/portfolio.h"

namespace zf {
namespace {

RunRecord rec(const std::string& s, const std::string& i, double t, RunStatus st, double cutoff = 1200) {
  return make_record(s, i, t, st, cutoff);
}

// Ridge model predicting a constant.
SolverModel constant_model(double value, Target target = Target::kLogRuntime) {
  RidgeModel m;
  m.basis = BasisSpec::identity(kNumFeatures, {}, {});
  m.bias = value;
  m.target = target;
  return SolverModel{m};
}

// Ridge model predicting `slope * x[feature]`.
SolverModel linear_model(int feature, double slope, Target target = Target::kLogRuntime) {
  RidgeModel m;
  m.basis = BasisSpec::identity(kNumFeatures, {feature}, {});
  m.weights = {slope};
  m.target = target;
  return SolverModel{m};
}

FeatureVector features_with(double x0, double time = 1.0) {
  FeatureArray x{};
  x[0] = x0;
  FeatureVector fv;
  fv.values = x;
  fv.feature_time_seconds = time;
  return fv;
}

// Three complete solvers a, b, c and a local-search solver l on one instance.
struct OneInstance {
  RuntimeMatrix matrix{{"a", "b", "c", "l"}, {"i"}, 1200};
  FeatureTable features;
  PortfolioConfig config;

  OneInstance() {
    matrix.set(rec("a", "i", 100, RunStatus::kSat));
    matrix.set(rec("b", "i", 50, RunStatus::kSat));
    matrix.set(rec("c", "i", 1200, RunStatus::kTimeout));
    matrix.set(rec("l", "i", 3, RunStatus::kSat));
    features.instance_ids = {"i"};
    features.rows = {features_with(0.0, 2.0)};
    config.solvers = {{"a", SolverKind::kComplete, ""},
                      {"b", SolverKind::kComplete, ""},
                      {"c", SolverKind::kComplete, ""},
                      {"l", SolverKind::kLocalSearch, ""}};
    config.backup_solver = "a";
    config.subset = {{"a", constant_model(3.0)}, {"b", constant_model(1.0)}, {"c", constant_model(2.0)}};
  }
};

PortfolioData synthetic_data(int instances, uint64_t seed, SyntheticBenchmark* out = nullptr, RuntimeMatrix* test = nullptr) {
  SyntheticBenchmarkOptions opt;
  opt.instances = instances;
  opt.seed = seed;
  SyntheticBenchmark b = make_synthetic_benchmark(opt);
  DropResult kept = drop_unsolvable(b.runtimes);
  DataSplit split = split_data(kept.kept, {0.4, 0.3, 0.3}, seed);
  PortfolioData d;
  d.solvers = b.solvers;
  d.train = b.runtimes.select_instances(split.train);
  d.validation = b.runtimes.select_instances(split.validation);
  d.features = b.features;
  for (const auto& info : b.instances) d.categories[info.id] = info.category;
  if (test) *test = b.runtimes.select_instances(split.test);
  if (out) *out = std::move(b);
  return d;
}

std::vector<double> average_runtimes(const RuntimeMatrix& m) {
  std::vector<double> out;
  for (size_t s = 0; s < m.num_solvers(); ++s) {
    double total = 0;
    for (size_t i = 0; i < m.num_instances(); ++i) total += m.solved(s, i) ? m.at(s, i).runtime_seconds : m.cutoff();
    out.push_back(total / static_cast<double>(m.num_instances()));
  }
  return out;
}

}  // namespace

TEST_CASE("enumerate_presolver_configs counts and constraints") {
  PresolverCandidates three{{"c1", "c2", "c3"}, {"l1", "l2", "l3"}};
  auto schedules = enumerate_presolver_configs(three);
  CHECK(schedules.size() == 288);
  for (const auto& s : schedules) {
    CHECK(s.entries.size() <= 2);
    int complete = 0, local = 0;
    for (const auto& e : s.entries) {
      CHECK(std::count(std::begin(kPresolverCutoffs), std::end(kPresolverCutoffs), e.cutoff_seconds) == 1);
      (e.solver_id[0] == 'c' ? complete : local)++;
    }
    CHECK(complete <= 1);
    CHECK(local <= 1);
    for (const auto& e : s.active()) CHECK(e.cutoff_seconds > 0);
  }
  CHECK(enumerate_presolver_configs({{"c"}, {"l"}}).size() == 32);
  CHECK(enumerate_presolver_configs({{"c"}, {}}).size() == 4);
  CHECK(enumerate_presolver_configs({{}, {}}).size() == 1);
}

TEST_CASE("select_presolver_candidates ranks by capped solo score") {
  std::vector<std::string> ids = {"c1", "c2", "c3", "c4", "c5", "l1"};
  std::vector<std::string> inst;
  for (int i = 0; i < 8; ++i) inst.push_back("i" + std::to_string(i));
  RuntimeMatrix m(ids, inst, 1200);
  // c2 and c4 never finish within 10 s; the others solve different counts.
  std::map<std::string, int> quick = {{"c1", 3}, {"c3", 5}, {"c5", 1}, {"l1", 2}};
  for (const auto& s : ids) {
    for (int i = 0; i < 8; ++i) {
      bool fast = i < (quick.count(s) ? quick[s] : 0);
      m.set(rec(s, inst[i], fast ? 1.0 + i : 500.0, RunStatus::kSat));
    }
  }
  std::vector<SolverDescriptor> solvers;
  for (const auto& s : ids) solvers.push_back({s, s[0] == 'l' ? SolverKind::kLocalSearch : SolverKind::kComplete, ""});
  PresolverCandidates c = select_presolver_candidates(m, solvers, PurseConfig{}, {});
  CHECK(c.complete == std::vector<std::string>{"c3", "c1", "c5"});
  CHECK(c.local_search == std::vector<std::string>{"l1"});

  // Ties resolve to the smaller id.
  RuntimeMatrix tie({"b", "a", "c"}, {"i"}, 1200);
  for (const auto& s : {"b", "a", "c"}) tie.set(rec(s, "i", 1.0, RunStatus::kSat));
  std::vector<SolverDescriptor> tied = {{"b", SolverKind::kComplete, ""}, {"a", SolverKind::kComplete, ""},
                                        {"c", SolverKind::kComplete, ""}};
  CHECK(select_presolver_candidates(tie, tied, PurseConfig{}, {}, 2).complete == std::vector<std::string>{"a", "b"});
}

TEST_CASE("select_presolver_candidates agrees with a brute-force ranking") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> ids, inst;
    for (int s = 0; s < 5; ++s) ids.push_back("s" + std::to_string(s));
    for (int i = 0; i < 12; ++i) inst.push_back("i" + std::to_string(i));
    RuntimeMatrix m(ids, inst, 1200);
    std::uniform_real_distribution<double> t(0.0, 30.0);
    for (const auto& s : ids) {
      for (const auto& i : inst) m.set(rec(s, i, t(rng), RunStatus::kSat));
    }
    std::vector<SolverDescriptor> solvers;
    for (const auto& s : ids) solvers.push_back({s, SolverKind::kComplete, ""});
    std::vector<std::pair<int, std::string>> counted;
    for (size_t s = 0; s < ids.size(); ++s) {
      int n = 0;
      for (size_t i = 0; i < inst.size(); ++i) n += m.at(s, i).runtime_seconds <= 10.0;
      counted.emplace_back(-n, ids[s]);
    }
    std::sort(counted.begin(), counted.end());
    std::vector<std::string> expected = {counted[0].second, counted[1].second, counted[2].second};
    CHECK(select_presolver_candidates(m, solvers, PurseConfig{}, {}).complete == expected);
  }
}

TEST_CASE("choose_backup") {
  RuntimeMatrix m({"a", "b", "p"}, {"i0", "i1", "i2", "i3"}, 100);
  // a is the overall winner, b dominates on i2 and i3.
  double a_t[] = {1, 1, 90, 100};
  double b_t[] = {100, 100, 5, 5};
  for (int i = 0; i < 4; ++i) {
    std::string id = "i" + std::to_string(i);
    m.set(rec("a", id, a_t[i], a_t[i] < 100 ? RunStatus::kSat : RunStatus::kTimeout, 100));
    m.set(rec("b", id, b_t[i], b_t[i] < 100 ? RunStatus::kSat : RunStatus::kTimeout, 100));
    m.set(rec("p", id, i == 3 ? 1 : 100, i == 3 ? RunStatus::kSat : RunStatus::kTimeout, 100));
  }
  PresolverSchedule none;
  std::vector<std::string> eligible = {"b", "a"};
  CHECK(choose_backup(m, none, {false, false, false, false}, Objective::kMinRuntime, PurseConfig{}, {}, eligible) == "a");
  CHECK(choose_backup(m, none, {false, false, true, true}, Objective::kMinRuntime, PurseConfig{}, {}, eligible) == "b");
  CHECK(choose_backup(m, none, {false, false, true, true}, Objective::kMaxScore, PurseConfig{}, {}, eligible) == "b");
  // Instances solved by a pre-solver do not count.
  PresolverSchedule with_p{{{"p", 2.0}}};
  CHECK(choose_backup(m, with_p, {true, false, false, true}, Objective::kMinRuntime, PurseConfig{}, {}, eligible) == "a");
  CHECK(choose_backup(m, none, {true, true, true, true}, Objective::kMinRuntime, PurseConfig{}, {}, {"b"}) == "b");
}

TEST_CASE("subset_search_exhaustive tie rules and optimality") {
  // Only solver 0 matters: every superset ties, the singleton wins.
  auto only_first = [](const std::vector<size_t>& s) { return s.front() == 0 ? 1.0 : 0.0; };
  SubsetResult r = subset_search_exhaustive(4, only_first);
  CHECK(r.subset == std::vector<size_t>{0});
  CHECK(r.evaluations == 15);

  // Two complementary solvers with perfect models: both retained.
  auto pair = [](const std::vector<size_t>& s) {
    bool a = std::count(s.begin(), s.end(), 1), b = std::count(s.begin(), s.end(), 2);
    return (a ? 50.0 : 0.0) + (b ? 50.0 : 0.0) - 0.1 * static_cast<double>(s.size());
  };
  CHECK(subset_search_exhaustive(4, pair).subset == std::vector<size_t>{1, 2});

  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    std::map<std::vector<size_t>, double> table;
    auto random_value = [&](const std::vector<size_t>& s) {
      auto it = table.find(s);
      if (it == table.end()) it = table.emplace(s, static_cast<double>(rng() % 20)).first;
      return it->second;
    };
    SubsetResult best = subset_search_exhaustive(5, random_value);
    for (const auto& [s, v] : table) {
      CHECK(best.performance >= v);
      if (v == best.performance) {
        CHECK(best.subset.size() <= s.size());
        if (best.subset.size() == s.size()) CHECK(best.subset <= s);
      }
    }
  }
  CHECK_THROWS_AS(subset_search_exhaustive(13, only_first), PortfolioError);
}

TEST_CASE("subset_search_local bookkeeping") {
  std::vector<std::vector<size_t>> visited;
  std::map<std::vector<size_t>, double> values;
  std::mt19937_64 rng(3);
  auto eval = [&](const std::vector<size_t>& s) {
    visited.push_back(s);
    auto it = values.find(s);
    if (it == values.end()) it = values.emplace(s, static_cast<double>(rng() % 1000)).first;
    return it->second;
  };
  SubsetResult r = subset_search_local(7, eval, 11);
  for (const auto& s : visited) {
    CHECK_FALSE(s.empty());
    CHECK(r.performance >= values[s]);
  }
  visited.clear();
  SubsetResult one = subset_search_local(1, eval, 11);
  CHECK(one.subset == std::vector<size_t>{0});
  CHECK(visited.size() == 1);
}

TEST_CASE("solve: pre-solver success skips features") {
  OneInstance f;
  f.config.presolvers = PresolverSchedule{{{"l", 5.0}, {"a", 0.0}}};
  SimulatedRunner runner(f.matrix, f.features, "i");
  SolveOutcome out = solve(f.config, runner);
  CHECK(out.status == SolveStatus::kSat);
  CHECK(out.chosen_solver == "presolver:l");
  CHECK(out.total_time_seconds == 3.0);
  REQUIRE(out.trace.size() == 1);
  CHECK(out.trace[0].phase == "presolve");
}

TEST_CASE("solve: prediction order, time accounting and determinism") {
  OneInstance f;
  f.config.presolvers = PresolverSchedule{{{"l", 2.0}}};
  SimulatedRunner runner(f.matrix, f.features, "i");
  SolveOutcome out = solve(f.config, runner);
  CHECK(out.status == SolveStatus::kSat);
  CHECK(out.chosen_solver == "b");
  CHECK(out.total_time_seconds == 2.0 + 2.0 + 50.0);
  std::vector<std::string> phases;
  for (const auto& e : out.trace) phases.push_back(e.phase);
  CHECK(phases == std::vector<std::string>{"presolve", "features", "predict", "run"});
  SolveOutcome again = solve(f.config, runner);
  CHECK(again.total_time_seconds == out.total_time_seconds);
  CHECK(again.chosen_solver == out.chosen_solver);

  // max_score picks the largest prediction.
  f.config.objective = Objective::kMaxScore;
  for (auto& m : f.config.subset) std::get<RidgeModel>(m.model.model).target = Target::kScore;
  CHECK(solve(f.config, runner).chosen_solver == "a");
}

TEST_CASE("solve: feature timeout routes to the backup solver") {
  OneInstance f;
  SimulatedRunner inner(f.matrix, f.features, "i");
  FaultInjectingRunner runner(inner, {}, true);
  SolveOutcome out = solve(f.config, runner);
  CHECK(out.chosen_solver == "backup:a");
  CHECK(out.status == SolveStatus::kSat);
  CHECK(out.total_time_seconds == doctest::Approx(f.config.feature_budget.total_seconds + 100.0));
  CHECK(out.trace.back().phase == "backup");
}

TEST_CASE("solve: crash falls back to the next best prediction") {
  OneInstance f;
  SimulatedRunner inner(f.matrix, f.features, "i");
  FaultInjectingRunner runner(inner, {"b"}, false, 4.0);
  SolveOutcome out = solve(f.config, runner);
  CHECK(out.status == SolveStatus::kTimeout);  // c is next and times out
  REQUIRE(out.trace.size() == 4);
  CHECK(out.trace[2].solver_id == "b");
  CHECK(out.trace[2].detail == "crash");
  CHECK(out.trace[3].solver_id == "c");
  CHECK(out.total_time_seconds == 1200.0);

  FaultInjectingRunner both(inner, {"b", "c"}, false, 4.0);
  out = solve(f.config, both);
  CHECK(out.status == SolveStatus::kSat);
  CHECK(out.chosen_solver == "a");
  CHECK(out.total_time_seconds == 2.0 + 4.0 + 4.0 + 100.0);

  FaultInjectingRunner all(inner, {"a", "b", "c"}, false, 4.0);
  out = solve(f.config, all);
  CHECK(out.status == SolveStatus::kCrashExhausted);
  CHECK(outcome_record(out, "p", "i", 1200).status == RunStatus::kCrash);
}

TEST_CASE("solve never exceeds the cutoff") {
  OneInstance f;
  f.config.cutoff_seconds = 60;
  f.config.presolvers = PresolverSchedule{{{"c", 10.0}, {"l", 2.0}}};
  SimulatedRunner runner(f.matrix, f.features, "i");
  SolveOutcome out = solve(f.config, runner);
  CHECK(out.status == SolveStatus::kTimeout);
  CHECK(out.total_time_seconds <= 60.0);
  double used = 0;
  for (const auto& e : out.trace) used += e.used_seconds;
  CHECK(used <= 60.0 + 1e-12);
}

TEST_CASE("PortfolioConfig validation") {
  OneInstance f;
  CHECK_NOTHROW(f.config.validate());
  PortfolioConfig bad = f.config;
  bad.subset.clear();
  CHECK_THROWS_AS(bad.validate(), PortfolioError);
  bad = f.config;
  bad.backup_solver = "zz";
  CHECK_THROWS_AS(bad.validate(), PortfolioError);
  bad = f.config;
  bad.presolvers = PresolverSchedule{{{"a", 2.0}, {"b", 2.0}}};
  CHECK_THROWS_AS(bad.validate(), PortfolioError);
  bad = f.config;
  bad.presolvers = PresolverSchedule{{{"a", 3.0}}};
  CHECK_THROWS_AS(bad.validate(), PortfolioError);
  bad = f.config;
  bad.subset.push_back(bad.subset.front());
  CHECK_THROWS_AS(bad.validate(), PortfolioError);
}

TEST_CASE("build_portfolio on the synthetic benchmark") {
  SyntheticBenchmark bench;
  RuntimeMatrix test;
  PortfolioData data = synthetic_data(300, 21, &bench, &test);
  for (Objective objective : {Objective::kMinRuntime, Objective::kMaxScore}) {
    PortfolioBuildOptions opt;
    opt.objective = objective;
    opt.presolver_candidates_per_kind = 2;
    BuildReport report;
    PortfolioConfig config = build_portfolio(data, opt, &report);
    CHECK(report.schedules.size() == 128);
    CHECK(config.presolvers == report.schedules[report.chosen].schedule);

    // The construction-time estimate equals a replay through solve().
    auto outcomes = simulate_portfolio(config, data.validation, data.features);
    RuntimeMatrix with = with_portfolio_column(data.validation, outcomes, "portfolio");
    EvaluationReport ev = evaluate(with, opt.purse, opt.series, data.validation.solvers());
    const double perf = report.schedules[report.chosen].performance;
    if (objective == Objective::kMinRuntime) {
      CHECK(-perf == doctest::Approx(ev.row("portfolio").average_runtime).epsilon(1e-12));
      for (const auto& s : config.subset) CHECK(config.solver(s.solver_id).kind == SolverKind::kComplete);
      for (double avg : average_runtimes(data.validation)) CHECK(ev.row("portfolio").average_runtime <= avg);
      CHECK(ev.row("portfolio").average_runtime >= ev.oracle.average_runtime);
    } else {
      CHECK(perf == doctest::Approx(ev.row("portfolio").score).epsilon(1e-9));
      for (const auto& r : ev.rows) {
        if (r.solver_id != "portfolio") CHECK(ev.row("portfolio").score > r.score);
      }
    }
    for (const auto& s : report.schedules) {
      if (!s.rejected) CHECK(s.performance <= perf);
    }
  }
}

TEST_CASE("build_portfolio: local-search members under max_score, degenerate schedules") {
  // l solves every satisfiable instance quickly; a handles the rest.
  std::vector<std::string> ids;
  for (int i = 0; i < 60; ++i) ids.push_back("i" + std::to_string(i));
  RuntimeMatrix m({"a", "l"}, ids, 1200);
  FeatureTable ft;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> noise(0.0, 0.1);
  for (int i = 0; i < 60; ++i) {
    bool sat = i % 2 == 0;
    m.set(rec("a", ids[i], 200 + i, sat ? RunStatus::kSat : RunStatus::kUnsat));
    m.set(rec("l", ids[i], sat ? 20 + i : 1200, sat ? RunStatus::kSat : RunStatus::kTimeout));
    FeatureArray x{};
    for (auto& v : x) v = noise(rng);
    x[0] = sat ? 1.0 : -1.0;
    FeatureVector fv;
    fv.values = x;
    fv.feature_time_seconds = 0.5;
    ft.instance_ids.push_back(ids[i]);
    ft.rows.push_back(fv);
  }
  std::vector<std::string> train(ids.begin(), ids.begin() + 30), val(ids.begin() + 30, ids.end());
  PortfolioData data{{{"a", SolverKind::kComplete, ""}, {"l", SolverKind::kLocalSearch, ""}},
                     m.select_instances(train), m.select_instances(val), ft, {}};
  PortfolioBuildOptions opt;
  opt.objective = Objective::kMaxScore;
  PortfolioConfig config = build_portfolio(data, opt);
  std::set<std::string> members;
  for (const auto& s : config.subset) members.insert(s.solver_id);
  CHECK(members.count("l") == 1);

  PortfolioBuildOptions runtime_opt;
  PortfolioConfig runtime = build_portfolio(data, runtime_opt);
  for (const auto& s : runtime.subset) CHECK(s.solver_id == "a");

  // A pre-solver that solves every training instance leaves nothing to learn.
  RuntimeMatrix easy({"a", "l"}, ids, 1200);
  for (int i = 0; i < 60; ++i) {
    easy.set(rec("a", ids[i], 1.0, RunStatus::kSat));
    easy.set(rec("l", ids[i], 1.0, RunStatus::kSat));
  }
  PortfolioData trivial{data.solvers, easy.select_instances(train), easy.select_instances(val), ft, {}};
  BuildReport report;
  PortfolioConfig c = build_portfolio(trivial, opt, &report);
  int rejected = 0;
  for (const auto& s : report.schedules) {
    if (s.rejected) {
      ++rejected;
      CHECK_FALSE(s.schedule.active().empty());
    }
  }
  CHECK(rejected > 0);
  CHECK(c.presolvers.active().empty());
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("single-member portfolio without pre-solvers adds only feature time") {
  SyntheticBenchmark bench;
  RuntimeMatrix test;
  PortfolioData data = synthetic_data(150, 2, &bench, &test);
  PortfolioConfig config;
  config.solvers = data.solvers;
  config.backup_solver = "generalist";
  config.subset = {{"generalist", constant_model(1.0)}};
  auto outcomes = simulate_portfolio(config, test, data.features);
  const size_t g = test.solver_index("generalist");
  for (size_t i = 0; i < test.num_instances(); ++i) {
    const RunRecord& r = test.at(g, i);
    const FeatureVector& fv = data.features.at(test.instances()[i]);
    const double expected = std::min(r.runtime_seconds + fv.feature_time_seconds, 1200.0);
    if (is_solved(r.status) && expected < 1200.0) {
      CHECK(outcomes[i].total_time_seconds == doctest::Approx(expected));
    } else {
      CHECK_FALSE((outcomes[i].status == SolveStatus::kSat || outcomes[i].status == SolveStatus::kUnsat));
    }
  }
}

TEST_CASE("hierarchical portfolio builds and round-trips") {
  PortfolioData data = synthetic_data(240, 9);
  PortfolioBuildOptions opt;
  opt.hierarchy = HierarchyMode::kGeneral6;
  opt.presolver_candidates_per_kind = 1;
  PortfolioConfig config = build_portfolio(data, opt);
  CHECK(config.hierarchy == HierarchyMode::kGeneral6);
  REQUIRE(std::holds_alternative<HierarchicalModel>(config.subset.front().model.model));
  CHECK(std::get<HierarchicalModel>(config.subset.front().model.model).classes.size() == 6);

  std::stringstream io;
  write_portfolio(config, io);
  PortfolioConfig back = read_portfolio(io);
  CHECK(back == config);
  for (size_t i = 0; i < data.features.size(); ++i) {
    const auto& fv = data.features.rows[i];
    if (!fv.values) continue;
    for (size_t k = 0; k < config.subset.size(); ++k) {
      CHECK(back.subset[k].model.predict(*fv.values) == config.subset[k].model.predict(*fv.values));
    }
  }
}

TEST_CASE("persistence rejects malformed documents") {
  OneInstance f;
  std::stringstream io;
  write_portfolio(f.config, io);
  std::string text = io.str();
  CHECK(text.find("zfolio-portfolio/1") != std::string::npos);

  auto kind_of = [](const std::string& doc) {
    std::istringstream in(doc);
    try {
      read_portfolio(in);
    } catch (const PortfolioError& e) {
      return e.kind();
    }
    return PortfolioError::Kind::kInvalidConfig;
  };
  CHECK(kind_of("{") == PortfolioError::Kind::kFormat);
  CHECK(kind_of("{\"format\":\"other\"}") == PortfolioError::Kind::kFormat);
  std::string missing = text;
  missing.replace(missing.find("\"backup_solver\""), 15, "\"backup\"");
  CHECK(kind_of(missing) == PortfolioError::Kind::kFormat);
  std::string bad_backup = text;
  bad_backup.replace(bad_backup.find("\"backup_solver\": \"a\""), 20, "\"backup_solver\": \"q\"");
  CHECK(kind_of(bad_backup) == PortfolioError::Kind::kFormat);

  std::stringstream ridge_io;
  RidgeModel r = std::get<RidgeModel>(linear_model(3, 0.25).model);
  write_ridge_model(r, ridge_io);
  CHECK(read_ridge_model(ridge_io) == r);
  std::istringstream wrong_tag(text);
  CHECK_THROWS_AS(read_ridge_model(wrong_tag), PortfolioError);
}

}  // namespace zf
