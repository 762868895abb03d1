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

// zfolio: command-line driver for feature extraction, data collection,
// portfolio training, solving and evaluation.

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "zf/cnf.h"
#include "zf/features.h"
#include "zf/harness.h"
#include "zf/persistence.h"
#include "zf/portfolio.h"
#include "zf/scoring.h"

namespace fs = std::filesystem;
using namespace zf;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return in;
}

// Writes through `fn` to `path`, or to stdout when path is empty or "-".
template <typename F>
void write_to(const std::string& path, F&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  fn(out);
}

std::vector<fs::path> cnf_files(const std::string& dir) {
  std::vector<fs::path> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > 4 && (name.ends_with(".cnf") || name.ends_with(".dimacs"))) out.push_back(entry.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string instance_id(const fs::path& p) { return p.filename().string(); }

FeatureTable load_features(const std::string& path) {
  auto in = open_in(path);
  return read_feature_csv(in);
}

RuntimeMatrix load_runtimes(const std::string& path, double cutoff) {
  auto in = open_in(path);
  return read_runtime_csv(in, cutoff);
}

std::vector<SolverDescriptor> load_solvers(const std::string& path) { return read_solvers_config_file(path); }

ScoringSetup load_setup(const std::string& path, double cutoff) {
  if (path.empty()) {
    ScoringSetup setup;
    setup.purse.time_limit = cutoff;
    return setup;
  }
  return read_scoring_setup_file(path);
}

std::array<double, 3> parse_ratios(const std::string& text) {
  std::array<double, 3> r{};
  std::istringstream in(text);
  std::string cell;
  for (size_t k = 0; k < 3; ++k) {
    if (!std::getline(in, cell, ',')) throw std::runtime_error("--ratios needs three comma-separated values");
    r[k] = std::stod(cell);
  }
  return r;
}

const std::vector<std::string>& split_part(const DataSplit& split, const std::string& part) {
  if (part == "train") return split.train;
  if (part == "validation") return split.validation;
  if (part == "test") return split.test;
  throw std::runtime_error("unknown split part '" + part + "'");
}

void print_outcome(const SolveOutcome& out, std::ostream& os) {
  os << std::setprecision(6);
  for (const auto& e : out.trace) {
    os << "c " << e.phase;
    if (!e.solver_id.empty()) os << ' ' << e.solver_id;
    os << " start=" << e.start_seconds << " budget=" << e.budget_seconds << " used=" << e.used_seconds;
    if (!e.detail.empty()) os << ' ' << e.detail;
    os << '\n';
  }
  os << "c chosen " << (out.chosen_solver.empty() ? "-" : out.chosen_solver) << " time " << out.total_time_seconds
     << '\n';
  switch (out.status) {
    case SolveStatus::kSat:
      os << "s SATISFIABLE\n";
      break;
    case SolveStatus::kUnsat:
      os << "s UNSATISFIABLE\n";
      break;
    default:
      os << "s UNKNOWN\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Per-instance SAT solver portfolios"};
  app.require_subcommand(1);
  uint64_t seed = 1;

  // features
  auto* features = app.add_subcommand("features", "Extract instance features from a directory of CNF files");
  std::string feat_dir, feat_out;
  double feat_budget = 60.0;
  bool feat_steps = false;
  features->add_option("cnf-dir", feat_dir, "Directory of .cnf files")->required()->check(CLI::ExistingDirectory);
  features->add_option("-o,--output", feat_out, "Feature CSV (stdout if omitted)");
  features->add_option("--budget", feat_budget, "Total probing budget per instance in seconds");
  features->add_flag("--step-count", feat_steps, "Deterministic work-unit timing instead of CPU time");
  features->add_option("--seed", seed, "Probe seed");

  // collect
  auto* collect = app.add_subcommand("collect", "Run every solver on every instance");
  std::string coll_cfg, coll_dir, coll_out;
  double coll_cutoff = 1200.0;
  collect->add_option("solvers-cfg", coll_cfg, "Solver configuration")->required()->check(CLI::ExistingFile);
  collect->add_option("cnf-dir", coll_dir, "Directory of .cnf files")->required()->check(CLI::ExistingDirectory);
  collect->add_option("--cutoff", coll_cutoff, "CPU-time cutoff in seconds");
  collect->add_option("-o,--output", coll_out, "Runtime CSV (stdout if omitted)");
  collect->add_option("--seed", seed, "Unused; accepted for uniformity");

  // split
  auto* split = app.add_subcommand("split", "Split instances into train/validation/test");
  std::string split_ratios = "0.4,0.3,0.3", split_runtimes, split_features, split_out;
  double split_cutoff = 1200.0;
  bool split_keep = false;
  split->add_option("--ratios", split_ratios, "Train,validation,test shares");
  split->add_option("--runtimes", split_runtimes, "Runtime CSV supplying instance ids")->check(CLI::ExistingFile);
  split->add_option("--features", split_features, "Feature CSV supplying instance ids")->check(CLI::ExistingFile);
  split->add_option("--cutoff", split_cutoff, "Cutoff of the runtime CSV");
  split->add_flag("--keep-unsolvable", split_keep, "Keep instances no solver solved");
  split->add_option("--seed", seed, "Shuffle seed");
  split->add_option("-o,--output", split_out, "Split CSV (stdout if omitted)");

  // train
  auto* train = app.add_subcommand("train", "Build a portfolio");
  std::string tr_objective = "runtime", tr_hierarchy = "none", tr_out, tr_runtimes, tr_features, tr_split, tr_solvers,
              tr_instances, tr_purse;
  double tr_cutoff = 1200.0;
  train->add_option("--objective", tr_objective, "runtime or score")->check(CLI::IsMember({"runtime", "score"}));
  train->add_option("--hierarchy", tr_hierarchy, "none, sat2 or general6")
      ->check(CLI::IsMember({"none", "sat2", "general6"}));
  train->add_option("-o,--output", tr_out, "Portfolio JSON")->required();
  train->add_option("--runtimes", tr_runtimes, "Runtime CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--features", tr_features, "Feature CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--split", tr_split, "Split CSV")->required()->check(CLI::ExistingFile);
  train->add_option("--solvers", tr_solvers, "Solver configuration")->required()->check(CLI::ExistingFile);
  train->add_option("--instances", tr_instances, "Instance CSV with categories")->check(CLI::ExistingFile);
  train->add_option("--purse", tr_purse, "Purse/series JSON")->check(CLI::ExistingFile);
  train->add_option("--cutoff", tr_cutoff, "Cutoff in seconds");
  train->add_option("--seed", seed, "Search seed");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve one instance with a trained portfolio");
  std::string sv_portfolio, sv_instance, sv_runtimes, sv_features;
  solve_cmd->add_option("portfolio", sv_portfolio, "Portfolio JSON")->required()->check(CLI::ExistingFile);
  solve_cmd->add_option("instance", sv_instance, "CNF file, or an instance id with --runtimes")->required();
  solve_cmd->add_option("--runtimes", sv_runtimes, "Replay recorded runs instead of executing solvers")
      ->check(CLI::ExistingFile);
  solve_cmd->add_option("--features", sv_features, "Recorded features for replay")->check(CLI::ExistingFile);
  solve_cmd->add_option("--seed", seed, "Probe seed");

  // evaluate
  auto* eval = app.add_subcommand("evaluate", "Report per-solver and portfolio performance");
  std::string ev_purse, ev_runtimes, ev_split, ev_part = "test", ev_portfolio, ev_features, ev_out, ev_cdf;
  double ev_cutoff = 1200.0;
  eval->add_option("--purse", ev_purse, "Purse/series JSON")->check(CLI::ExistingFile);
  eval->add_option("--runtimes", ev_runtimes, "Runtime CSV")->required()->check(CLI::ExistingFile);
  eval->add_option("--split", ev_split, "Split CSV")->check(CLI::ExistingFile);
  eval->add_option("--part", ev_part, "Split part to evaluate")->check(CLI::IsMember({"train", "validation", "test"}));
  eval->add_option("--portfolio", ev_portfolio, "Portfolio JSON to replay")->check(CLI::ExistingFile);
  eval->add_option("--features", ev_features, "Feature CSV for the replay")->check(CLI::ExistingFile);
  eval->add_option("--cutoff", ev_cutoff, "Cutoff in seconds");
  eval->add_option("-o,--output", ev_out, "Report CSV (stdout if omitted)");
  eval->add_option("--cdf", ev_cdf, "Solved-fraction CDF CSV");
  eval->add_option("--seed", seed, "Unused; accepted for uniformity");

  // synth-bench
  auto* synth = app.add_subcommand("synth-bench", "Generate a synthetic benchmark");
  SyntheticBenchmarkOptions sb;
  std::string sb_out = ".";
  synth->add_option("--clusters", sb.clusters, "Latent clusters");
  synth->add_option("--instances", sb.instances, "Instance count");
  synth->add_option("--cutoff", sb.cutoff_seconds, "Cutoff in seconds");
  synth->add_option("--seed", sb.seed, "Generator seed");
  synth->add_option("-o,--output-dir", sb_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    const int workers = worker_count();
    if (*features) {
      ProbeBudget budget;
      budget.total_seconds = feat_budget;
      if (feat_steps) budget.mode = TimingMode::kStepCount;
      auto files = cnf_files(feat_dir);
      FeatureTable table;
      table.instance_ids.resize(files.size());
      table.rows.resize(files.size());
      std::mutex err_mutex;
      parallel_for(files.size(), workers, [&](size_t k) {
        table.instance_ids[k] = instance_id(files[k]);
        try {
          table.rows[k] = extract_all(read_dimacs_file(files[k].string()), budget, seed);
        } catch (const DimacsError& e) {
          std::lock_guard<std::mutex> lock(err_mutex);
          std::cerr << "warning: " << files[k] << ": " << e.what() << "; recorded as timed out\n";
          table.rows[k].timed_out = true;
          table.rows[k].feature_time_seconds = 0.0;
        }
      });
      write_to(feat_out, [&](std::ostream& os) { write_feature_csv(table, os); });
    } else if (*collect) {
      auto solvers = load_solvers(coll_cfg);
      auto files = cnf_files(coll_dir);
      std::vector<std::string> solver_ids, ids;
      for (const auto& s : solvers) solver_ids.push_back(s.id);
      for (const auto& f : files) ids.push_back(instance_id(f));
      RuntimeMatrix matrix(solver_ids, ids, coll_cutoff);
      std::vector<RunRecord> records(solvers.size() * files.size());
      parallel_for(records.size(), workers, [&](size_t k) {
        const size_t s = k / files.size(), i = k % files.size();
        records[k] = run_external(solvers[s], files[i].string(), ids[i], coll_cutoff);
      });
      for (size_t k = 0; k < records.size(); ++k) matrix.set(k / files.size(), k % files.size(), records[k]);
      write_to(coll_out, [&](std::ostream& os) { write_runtime_csv(matrix, os); });
    } else if (*split) {
      std::vector<std::string> ids;
      if (!split_runtimes.empty()) {
        RuntimeMatrix m = load_runtimes(split_runtimes, split_cutoff);
        if (split_keep) {
          ids = m.instances();
        } else {
          DropResult d = drop_unsolvable(m);
          std::cerr << "retained " << d.kept.size() << " of " << m.num_instances() << " instances\n";
          ids = d.kept;
        }
      } else if (!split_features.empty()) {
        ids = load_features(split_features).instance_ids;
      } else {
        throw std::runtime_error("split needs --runtimes or --features");
      }
      DataSplit parts = split_data(ids, parse_ratios(split_ratios), seed);
      write_to(split_out, [&](std::ostream& os) { write_split_csv(parts, os); });
    } else if (*train) {
      RuntimeMatrix all = load_runtimes(tr_runtimes, tr_cutoff);
      auto split_in = open_in(tr_split);
      DataSplit parts = read_split_csv(split_in);
      PortfolioData data;
      data.solvers = load_solvers(tr_solvers);
      data.train = all.select_instances(parts.train);
      data.validation = all.select_instances(parts.validation);
      data.features = load_features(tr_features);
      if (!tr_instances.empty()) {
        auto in = open_in(tr_instances);
        for (const auto& info : read_instances_csv(in)) data.categories[info.id] = info.category;
      }
      ScoringSetup setup = load_setup(tr_purse, tr_cutoff);
      PortfolioBuildOptions opt;
      opt.objective = objective_from_string(tr_objective);
      opt.hierarchy = hierarchy_mode_from_string(tr_hierarchy);
      opt.purse = setup.purse;
      opt.series = setup.series;
      opt.seed = seed;
      opt.workers = workers;
      BuildReport report;
      PortfolioConfig config = build_portfolio(data, opt, &report);
      for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
      write_portfolio_file(config, tr_out);
      const ScheduleResult& chosen = report.schedules[report.chosen];
      std::cerr << "schedules " << report.schedules.size() << ", training sets " << report.distinct_training_sets
                << "; chosen subset";
      for (const auto& id : chosen.subset) std::cerr << ' ' << id;
      std::cerr << ", backup " << chosen.backup << ", validation performance " << chosen.performance << '\n';
    } else if (*solve_cmd) {
      PortfolioConfig config = read_portfolio_file(sv_portfolio);
      SolveOutcome out;
      if (!sv_runtimes.empty()) {
        if (sv_features.empty()) throw std::runtime_error("replay needs --features");
        RuntimeMatrix m = load_runtimes(sv_runtimes, config.cutoff_seconds);
        FeatureTable ft = load_features(sv_features);
        SimulatedRunner runner(m, ft, sv_instance);
        out = solve(config, runner);
      } else {
        CnfFormula formula = read_dimacs_file(sv_instance);
        ExternalRunner runner(sv_instance, fs::path(sv_instance).filename().string(), std::move(formula), seed);
        out = solve(config, runner);
      }
      print_outcome(out, std::cout);
      return out.status == SolveStatus::kSat ? 10 : out.status == SolveStatus::kUnsat ? 20 : 0;
    } else if (*eval) {
      RuntimeMatrix m = load_runtimes(ev_runtimes, ev_cutoff);
      if (!ev_split.empty()) {
        auto in = open_in(ev_split);
        m = m.select_instances(split_part(read_split_csv(in), ev_part));
      }
      ScoringSetup setup = load_setup(ev_purse, ev_cutoff);
      std::vector<std::string> subset = m.solvers();
      if (!ev_portfolio.empty()) {
        if (ev_features.empty()) throw std::runtime_error("portfolio replay needs --features");
        PortfolioConfig config = read_portfolio_file(ev_portfolio);
        FeatureTable ft = load_features(ev_features);
        m = with_portfolio_column(m, simulate_portfolio(config, m, ft), "portfolio");
      }
      EvaluationReport report = evaluate(m, setup.purse, setup.series, subset);
      write_to(ev_out, [&](std::ostream& os) { write_evaluation_csv(report, os); });
      if (!ev_cdf.empty()) write_to(ev_cdf, [&](std::ostream& os) { write_cdf_csv(report, os); });
    } else if (*synth) {
      SyntheticBenchmark bench = make_synthetic_benchmark(sb);
      fs::create_directories(sb_out);
      const fs::path dir(sb_out);
      write_to((dir / "features.csv").string(), [&](std::ostream& os) { write_feature_csv(bench.features, os); });
      write_to((dir / "runtimes.csv").string(), [&](std::ostream& os) { write_runtime_csv(bench.runtimes, os); });
      write_to((dir / "instances.csv").string(), [&](std::ostream& os) { write_instances_csv(bench.instances, os); });
      write_to((dir / "solvers.cfg").string(), [&](std::ostream& os) {
        os << "# synthetic solvers: runtimes are replayed, commands are placeholders\n";
        for (const auto& s : bench.solvers) os << s.id << ' ' << to_string(s.kind) << " synthetic-" << s.id << '\n';
      });
      std::cerr << "wrote " << bench.runtimes.num_instances() << " instances x " << bench.runtimes.num_solvers()
                << " solvers to " << sb_out << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
