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

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "zf/harness.h"

namespace zf {
namespace {

namespace fs = std::filesystem;

// Scratch directory holding a dummy instance and solver scripts.
struct Scratch {
  fs::path dir;
  fs::path instance;

  Scratch() {
    dir = fs::temp_directory_path() / ("zf_harness_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    instance = dir / "it's.cnf";
    std::ofstream(instance) << "p cnf 1 1\n1 0\n";
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  std::string script(const std::string& name, const std::string& body) const {
    fs::path p = dir / name;
    std::ofstream(p) << "#!/bin/sh\n" << body << "\n";
    fs::permissions(p, fs::perms::owner_all);
    return p.string();
  }
};

SolverDescriptor solver(const std::string& command) { return SolverDescriptor{"s", SolverKind::kComplete, command}; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

RunRecord rec(const std::string& s, const std::string& i, double t, RunStatus st, double cutoff = 100) {
  return make_record(s, i, t, st, cutoff);
}

}  // namespace

TEST_CASE("run_external: exit codes and answer lines") {
  Scratch scratch;
  std::string sat = scratch.script("sat.sh", "exit 10");
  RunRecord r = run_external(solver(sat), scratch.instance.string(), "i", 1200);
  CHECK(r.status == RunStatus::kSat);
  CHECK_FALSE(r.censored);
  CHECK(r.runtime_seconds < 1.0);
  CHECK(r.instance_id == "i");

  std::string unsat = scratch.script("unsat.sh", "exit 20");
  CHECK(run_external(solver(unsat), scratch.instance.string(), "i", 1200).status == RunStatus::kUnsat);

  std::string line = scratch.script("line.sh", "echo 'c hello'\necho 's UNSATISFIABLE'\nexit 0");
  CHECK(run_external(solver(line), scratch.instance.string(), "i", 1200).status == RunStatus::kUnsat);

  std::string silent = scratch.script("silent.sh", "exit 0");
  CHECK(run_external(solver(silent), scratch.instance.string(), "i", 1200).status == RunStatus::kCrash);
}

TEST_CASE("run_external: instance placeholder is substituted and quoted") {
  Scratch scratch;
  std::string check = scratch.script("check.sh", "[ -f \"$1\" ] && exit 10\nexit 1");
  CHECK(run_external(solver(check + " {instance}"), scratch.instance.string(), "i", 10).status == RunStatus::kSat);
  CHECK(run_external(solver(check), scratch.instance.string(), "i", 10).status == RunStatus::kSat);
}

TEST_CASE("run_external: CPU overrun is a censored timeout at the cutoff") {
  Scratch scratch;
  std::string spin = scratch.script("spin.sh", "while :; do :; done");
  RunRecord r = run_external(solver(spin), scratch.instance.string(), "i", 1.0);
  CHECK(r.status == RunStatus::kTimeout);
  CHECK(r.censored);
  CHECK(r.runtime_seconds == 1.0);
}

TEST_CASE("run_external: hung process hits the wall-clock backstop") {
  Scratch scratch;
  std::string hang = scratch.script("hang.sh", "sleep 30");
  RunRecord r = run_external(solver(hang), scratch.instance.string(), "i", 0.5);
  CHECK(r.status == RunStatus::kTimeout);
  CHECK(r.runtime_seconds == 0.5);
}

TEST_CASE("run_external: signal death is a crash with measured time") {
  Scratch scratch;
  std::string die = scratch.script("die.sh", "kill -SEGV $$");
  RunRecord r = run_external(solver(die), scratch.instance.string(), "i", 1200);
  CHECK(r.status == RunStatus::kCrash);
  CHECK_FALSE(r.censored);
  CHECK(r.runtime_seconds <= 1200);
}

TEST_CASE("run_external: spawn failures") {
  Scratch scratch;
  auto kind_of = [&](const SolverDescriptor& d, const std::string& path) {
    try {
      run_external(d, path, "i", 10);
    } catch (const HarnessError& e) {
      return e.kind();
    }
    return HarnessError::Kind::kConfig;
  };
  CHECK(kind_of(solver((scratch.dir / "missing-binary").string()), scratch.instance.string()) ==
        HarnessError::Kind::kSpawnFailure);
  CHECK(kind_of(solver("true"), (scratch.dir / "nope.cnf").string()) == HarnessError::Kind::kSpawnFailure);
  CHECK_THROWS_AS(run_external(solver("true"), scratch.instance.string(), "i", 0), HarnessError);
}

TEST_CASE("read_solvers_config") {
  std::istringstream in("# comment\n\nminisat complete /opt/minisat {instance}\nsaps local_search ./saps -i {instance}\n");
  auto solvers = read_solvers_config(in);
  REQUIRE(solvers.size() == 2);
  CHECK(solvers[0] == SolverDescriptor{"minisat", SolverKind::kComplete, "/opt/minisat {instance}"});
  CHECK(solvers[1].kind == SolverKind::kLocalSearch);
  CHECK(solvers[1].command == "./saps -i {instance}");

  std::istringstream dup("a complete x\na complete y\n");
  CHECK_THROWS_AS(read_solvers_config(dup), HarnessError);
  std::istringstream bad_kind("a quantum x\n");
  CHECK_THROWS_AS(read_solvers_config(bad_kind), HarnessError);
  std::istringstream short_line("a complete\n");
  CHECK_THROWS_AS(read_solvers_config(short_line), HarnessError);
}

TEST_CASE("run_synthetic: solved fraction follows the log-normal CDF") {
  SyntheticSolverModel m{"m", SolverKind::kComplete, {std::log(100.0), std::log(5.0)}, {1.0, 2.0}, 0.0, 0.0};
  const double cutoff = 300;
  for (int cluster : {0, 1}) {
    InstanceLatent latent{cluster, true, 0.0};
    const int trials = 20000;
    int solved = 0;
    for (int t = 0; t < trials; ++t) {
      RunRecord r = run_synthetic(m, latent, "i", cutoff, static_cast<uint64_t>(t) * 7919 + 1);
      CHECK(r.runtime_seconds <= cutoff);
      if (is_solved(r.status)) ++solved;
    }
    const double expected = normal_cdf((std::log(cutoff) - m.mu[cluster]) / m.sigma[cluster]);
    CHECK(std::abs(static_cast<double>(solved) / trials - expected) <= 0.03);
  }
}

TEST_CASE("run_synthetic: local search never solves unsat, seeds are deterministic") {
  SyntheticSolverModel ls{"ls", SolverKind::kLocalSearch, {std::log(0.1)}, {0.5}, 0.0, 0.0};
  for (uint64_t seed = 0; seed < 200; ++seed) {
    RunRecord r = run_synthetic(ls, InstanceLatent{0, false, 0.0}, "i", 1200, seed);
    CHECK(r.status == RunStatus::kTimeout);
    CHECK(r.runtime_seconds == 1200);
  }
  SyntheticSolverModel m{"m", SolverKind::kComplete, {std::log(50.0)}, {1.0}, 0.5, 0.2};
  InstanceLatent latent{0, false, 0.3};
  for (uint64_t seed = 0; seed < 50; ++seed) CHECK(run_synthetic(m, latent, "i", 1200, seed) == run_synthetic(m, latent, "i", 1200, seed));
  CHECK_THROWS_AS(run_synthetic(m, InstanceLatent{3, true, 0.0}, "i", 1200, 1), HarnessError);
}

TEST_CASE("synthetic benchmark shape") {
  SyntheticBenchmarkOptions opt;
  opt.instances = 600;
  opt.seed = 11;
  SyntheticBenchmark b = make_synthetic_benchmark(opt);
  CHECK(b.solvers.size() == 6);
  CHECK(b.runtimes.num_solvers() == 6);
  CHECK(b.runtimes.num_instances() == 600);
  CHECK(b.runtimes.complete());
  CHECK(b.features.size() == 600);
  int complete = 0, unsat = 0, timeouts = 0;
  for (const auto& s : b.solvers) complete += s.kind == SolverKind::kComplete;
  CHECK(complete == 4);
  for (size_t i = 0; i < 600; ++i) {
    unsat += !b.latents[i].satisfiable;
    timeouts += b.features.rows[i].timed_out;
    CHECK(b.features.rows[i].values.has_value() == !b.features.rows[i].timed_out);
    auto sat = b.runtimes.satisfiable(i);
    if (sat) CHECK(*sat == b.latents[i].satisfiable);
  }
  CHECK(std::abs(unsat / 600.0 - 0.3) < 0.06);
  CHECK(timeouts > 0);
  CHECK(timeouts < 40);

  // Each dominant solver wins most of its own cluster.
  for (int c = 0; c < 3; ++c) {
    size_t dom = b.runtimes.solver_index("dom" + std::to_string(c));
    int wins = 0, members = 0;
    for (size_t i = 0; i < 600; ++i) {
      if (b.latents[i].cluster != c) continue;
      ++members;
      double mine = b.runtimes.at(dom, i).runtime_seconds;
      bool best = true;
      for (size_t s = 0; s < 6; ++s) best = best && (s == dom || b.runtimes.at(s, i).runtime_seconds >= mine || c == 0);
      wins += best;
    }
    if (c != 0) CHECK(wins > members / 2);
  }

  SyntheticBenchmark again = make_synthetic_benchmark(opt);
  CHECK(again.runtimes.records() == b.runtimes.records());
  CHECK(again.features.rows == b.features.rows);
}

TEST_CASE("split_data sizes, partition and determinism") {
  std::vector<std::string> ten;
  for (int i = 0; i < 10; ++i) ten.push_back("x" + std::to_string(i));
  DataSplit s = split_data(ten, {0.4, 0.3, 0.3}, 5);
  CHECK(s.train.size() == 4);
  CHECK(s.validation.size() == 3);
  CHECK(s.test.size() == 3);
  std::set<std::string> all(s.train.begin(), s.train.end());
  all.insert(s.validation.begin(), s.validation.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);

  DataSplit one = split_data({"only"}, {0.4, 0.3, 0.3}, 5);
  CHECK(one.train.size() == 1);
  CHECK(one.validation.empty());
  CHECK(one.test.empty());

  DataSplit again = split_data(ten, {0.4, 0.3, 0.3}, 5);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  for (size_t n : {0, 2, 3, 7, 599, 600, 1001}) {
    std::vector<std::string> ids(n);
    for (size_t i = 0; i < n; ++i) ids[i] = std::to_string(i);
    DataSplit p = split_data(ids, {0.4, 0.3, 0.3}, 9);
    CHECK(p.train.size() + p.validation.size() + p.test.size() == n);
    CHECK(std::abs(static_cast<double>(p.train.size()) - 0.4 * n) < 1.0);
    CHECK(std::abs(static_cast<double>(p.test.size()) - 0.3 * n) < 1.0);
  }
  CHECK_THROWS_AS(split_data(ten, {0.5, 0.3, 0.3}, 1), HarnessError);
}

TEST_CASE("drop_unsolvable") {
  RuntimeMatrix m({"a", "b"}, {"i0", "i1", "i2"}, 100);
  m.set(0, 0, rec("a", "i0", 5, RunStatus::kSat));
  m.set(1, 0, rec("b", "i0", 100, RunStatus::kTimeout));
  m.set(0, 1, rec("a", "i1", 100, RunStatus::kTimeout));
  m.set(1, 1, rec("b", "i1", 3, RunStatus::kCrash));
  m.set(0, 2, rec("a", "i2", 100, RunStatus::kTimeout));
  m.set(1, 2, rec("b", "i2", 8, RunStatus::kUnsat));
  DropResult d = drop_unsolvable(m);
  CHECK(d.kept == std::vector<std::string>{"i0", "i2"});
  CHECK(d.dropped == std::vector<std::string>{"i1"});
  CHECK(d.retained_fraction == doctest::Approx(2.0 / 3.0));

  // Fixture with a known 71.8% solvable share.
  std::vector<std::string> ids;
  for (int i = 0; i < 1000; ++i) ids.push_back("i" + std::to_string(i));
  RuntimeMatrix big({"a", "b"}, ids, 100);
  for (int i = 0; i < 1000; ++i) {
    bool solvable = (i * 7919) % 1000 < 718;
    big.set(0, i, rec("a", ids[i], solvable && i % 2 ? 1.0 : 100, solvable && i % 2 ? RunStatus::kSat : RunStatus::kTimeout));
    big.set(1, i, rec("b", ids[i], solvable && i % 2 == 0 ? 2.0 : 100,
                      solvable && i % 2 == 0 ? RunStatus::kSat : RunStatus::kCrash));
  }
  CHECK(drop_unsolvable(big).retained_fraction == doctest::Approx(0.718));
}

TEST_CASE("evaluate: single solver solving everything in 1 s") {
  RuntimeMatrix m({"a"}, {"i0", "i1"}, 100);
  m.set(0, 0, rec("a", "i0", 1, RunStatus::kSat));
  m.set(0, 1, rec("a", "i1", 1, RunStatus::kUnsat));
  EvaluationReport r = evaluate(m, PurseConfig{1000, 1000, 300, 100}, {});
  const EvaluationRow& a = r.row("a");
  CHECK(a.average_runtime == 1.0);
  CHECK(a.percent_solved == 100.0);
  CHECK(a.solved == 2);
  REQUIRE(a.cdf.size() == 2);
  CHECK(a.cdf[0].time == 1.0);
  CHECK(a.cdf[0].fraction_solved == 1.0);
  CHECK(a.cdf[1].time == 100.0);
  CHECK(r.oracle.average_runtime == 1.0);
}

TEST_CASE("evaluate matches brute-force recomputation on synthetic solvers") {
  SyntheticBenchmarkOptions opt;
  opt.instances = 150;
  opt.seed = 3;
  opt.cutoff_seconds = 600;
  SyntheticBenchmark b = make_synthetic_benchmark(opt);
  RuntimeMatrix m = b.runtimes.select_solvers(std::vector<std::string>{"dom0", "dom1", "generalist"});
  PurseConfig purse{1000, 1000, 300, 600};
  SeriesMap series;
  for (size_t i = 0; i < m.num_instances(); i += 3) series[m.instances()[i]] = "s" + std::to_string(i % 4);
  EvaluationReport r = evaluate(m, purse, series);
  auto totals = competition_score(m, purse, series);
  const size_t n = m.num_instances();

  double best_avg = 1e300, best_pct = 0;
  for (size_t s = 0; s < m.num_solvers(); ++s) {
    const EvaluationRow& row = r.row(m.solvers()[s]);
    double sum = 0;
    int solved = 0;
    std::vector<double> times;
    for (size_t i = 0; i < n; ++i) {
      const RunRecord& rec = m.at(s, i);
      bool ok = rec.status == RunStatus::kSat || rec.status == RunStatus::kUnsat;
      sum += ok ? rec.runtime_seconds : 600;
      if (ok) {
        ++solved;
        times.push_back(rec.runtime_seconds);
      }
    }
    CHECK(row.average_runtime == doctest::Approx(sum / n).epsilon(1e-12));
    CHECK(row.solved == solved);
    CHECK(row.percent_solved == doctest::Approx(100.0 * solved / n));
    CHECK(row.score == doctest::Approx(totals[s].total()));
    for (const CdfPoint& p : row.cdf) {
      auto below = std::count_if(times.begin(), times.end(), [&](double t) { return t <= p.time; });
      CHECK(p.fraction_solved == doctest::Approx(static_cast<double>(below) / n));
    }
    for (size_t k = 1; k < row.cdf.size(); ++k) {
      CHECK(row.cdf[k].time > row.cdf[k - 1].time);
      CHECK(row.cdf[k].fraction_solved >= row.cdf[k - 1].fraction_solved);
    }
    CHECK(row.cdf.back().time == 600);
    CHECK(row.cdf.back().fraction_solved == doctest::Approx(row.percent_solved / 100));
    best_avg = std::min(best_avg, row.average_runtime);
    best_pct = std::max(best_pct, row.percent_solved);
  }
  CHECK(r.oracle.average_runtime <= best_avg);
  CHECK(r.oracle.percent_solved >= best_pct);

  double oracle_sum = 0;
  for (size_t i = 0; i < n; ++i) {
    double best = 600;
    for (size_t s = 0; s < m.num_solvers(); ++s) {
      if (m.solved(s, i)) best = std::min(best, m.at(s, i).runtime_seconds);
    }
    oracle_sum += best;
  }
  CHECK(r.oracle.average_runtime == doctest::Approx(oracle_sum / n).epsilon(1e-12));

  EvaluationReport only = evaluate(m, purse, series, {"dom1"});
  CHECK(only.oracle.average_runtime == doctest::Approx(r.row("dom1").average_runtime));
}

TEST_CASE("CSV round trips") {
  SyntheticBenchmarkOptions opt;
  opt.instances = 60;
  opt.feature_timeout_fraction = 0.2;
  SyntheticBenchmark b = make_synthetic_benchmark(opt);

  std::stringstream features;
  write_feature_csv(b.features, features);
  FeatureTable ft = read_feature_csv(features);
  CHECK(ft.instance_ids == b.features.instance_ids);
  REQUIRE(ft.size() == b.features.size());
  for (size_t i = 0; i < ft.size(); ++i) {
    CHECK(ft.rows[i].values == b.features.rows[i].values);
    CHECK(ft.rows[i].timed_out == b.features.rows[i].timed_out);
    CHECK(ft.rows[i].feature_time_seconds == b.features.rows[i].feature_time_seconds);
  }
  CHECK(ft.select({"inst5", "inst1"}).instance_ids == std::vector<std::string>{"inst5", "inst1"});
  CHECK_THROWS_AS(ft.at("nope"), DataError);

  std::stringstream runtimes;
  write_runtime_csv(b.runtimes, runtimes);
  CHECK(runtimes.str().rfind("instance_id,solver_id,runtime,status\n", 0) == 0);
  RuntimeMatrix rm = read_runtime_csv(runtimes, opt.cutoff_seconds);
  CHECK(rm.records().size() == b.runtimes.records().size());
  for (const RunRecord& r : b.runtimes.records()) {
    CHECK(rm.at(rm.solver_index(r.solver_id), rm.instance_index(r.instance_id)) == r);
  }

  std::stringstream instances;
  write_instances_csv(b.instances, instances);
  CHECK(read_instances_csv(instances) == b.instances);

  DataSplit split = split_data(b.features.instance_ids, {0.4, 0.3, 0.3}, 2);
  std::stringstream split_io;
  write_split_csv(split, split_io);
  DataSplit back = read_split_csv(split_io);
  CHECK(back.train == split.train);
  CHECK(back.validation == split.validation);
  CHECK(back.test == split.test);

  std::istringstream bad("instance_id,solver_id,runtime,status\ni,s,abc,sat\n");
  CHECK_THROWS_AS(read_runtime_csv(bad, 100), DataError);
  std::istringstream bad_header("id,solver,runtime,status\n");
  CHECK_THROWS_AS(read_runtime_csv(bad_header, 100), DataError);
  std::istringstream conflict("instance_id,solver_id,runtime,status\ni,a,1,sat\ni,b,2,unsat\n");
  CHECK_THROWS_AS(read_runtime_csv(conflict, 100), DataError);
}

TEST_CASE("parallel_for covers every index once and propagates errors") {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), 4, [&](size_t i) { hits[i]++; });
  CHECK(std::all_of(hits.begin(), hits.end(), [](const std::atomic<int>& h) { return h.load() == 1; }));
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](size_t i) {
                                 if (i == 42) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  CHECK(worker_count() >= 1);
}

}  // namespace zf
