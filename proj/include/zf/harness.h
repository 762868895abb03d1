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

#ifndef ZF_HARNESS_H_
#define ZF_HARNESS_H_

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "zf/features.h"
#include "zf/learning.h"
#include "zf/runtime_matrix.h"
#include "zf/scoring.h"

namespace zf {

class HarnessError : public std::runtime_error {
 public:
  enum class Kind { kSpawnFailure, kConfig, kInvalidArgument };

  HarnessError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class SolverKind { kComplete, kLocalSearch };

std::string to_string(SolverKind kind);
SolverKind solver_kind_from_string(const std::string& name);

struct SolverDescriptor {
  std::string id;
  SolverKind kind = SolverKind::kComplete;
  // Shell command with an "{instance}" placeholder; empty for simulated solvers.
  std::string command;

  bool operator==(const SolverDescriptor&) const = default;
};

// One solver per line: "<id> <complete|local_search> <command ...>". Blank
// lines and lines starting with '#' are ignored.
std::vector<SolverDescriptor> read_solvers_config(std::istream& in);
std::vector<SolverDescriptor> read_solvers_config_file(const std::string& path);

// Runs the solver on one instance under a CPU-time cutoff (wall-clock
// backstop at twice the cutoff). Exit code 10/20 or an "s SATISFIABLE" /
// "s UNSATISFIABLE" line decide the answer; signals and answerless exits are
// crashes. Throws kSpawnFailure if the command cannot be started.
RunRecord run_external(const SolverDescriptor& solver, const std::string& instance_path, const std::string& instance_id,
                       double cutoff_seconds);

// Latent description of a synthetic instance.
struct InstanceLatent {
  int cluster = 0;
  bool satisfiable = true;
  double hardness = 0.0;  // shifts every solver's log runtime
};

struct SyntheticSolverModel {
  std::string id;
  SolverKind kind = SolverKind::kComplete;
  std::vector<double> mu;     // per-cluster mean of log runtime (natural log, seconds)
  std::vector<double> sigma;  // per-cluster std of log runtime
  double unsat_shift = 0.0;   // added to log runtime on unsatisfiable instances
  double crash_probability = 0.0;
};

RunRecord run_synthetic(const SyntheticSolverModel& model, const InstanceLatent& instance, const std::string& instance_id,
                        double cutoff_seconds, uint64_t seed);

// Per-instance features as stored on disk.
struct FeatureTable {
  std::vector<std::string> instance_ids;
  std::vector<FeatureVector> rows;

  size_t size() const { return instance_ids.size(); }
  std::optional<size_t> find(const std::string& id) const;
  const FeatureVector& at(const std::string& id) const;
  FeatureTable select(const std::vector<std::string>& ids) const;
};

void write_feature_csv(const FeatureTable& table, std::ostream& out);
FeatureTable read_feature_csv(std::istream& in);

void write_runtime_csv(const RuntimeMatrix& matrix, std::ostream& out);
RuntimeMatrix read_runtime_csv(std::istream& in, double cutoff_seconds);

struct InstanceInfo {
  std::string id;
  std::string category;
  std::optional<bool> satisfiable;

  bool operator==(const InstanceInfo&) const = default;
};

// CSV: instance_id,category,satisfiable (sat|unsat|unknown)
void write_instances_csv(const std::vector<InstanceInfo>& instances, std::ostream& out);
std::vector<InstanceInfo> read_instances_csv(std::istream& in);

struct SyntheticBenchmarkOptions {
  int clusters = 3;
  int instances = 600;
  double unsat_fraction = 0.3;
  double feature_timeout_fraction = 0.03;
  double cutoff_seconds = 1200.0;
  uint64_t seed = 1;
};

struct SyntheticBenchmark {
  std::vector<SolverDescriptor> solvers;
  std::vector<SyntheticSolverModel> models;
  std::vector<InstanceInfo> instances;
  std::vector<InstanceLatent> latents;
  FeatureTable features;
  RuntimeMatrix runtimes;
};

// Latent clusters with a dominant solver each, planted feature shifts for
// cluster, satisfiability and hardness, and six solvers (four complete, two
// local search).
SyntheticBenchmark make_synthetic_benchmark(const SyntheticBenchmarkOptions& options);

struct DataSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

// Seeded uniform partition with largest-remainder rounding of the shares.
DataSplit split_data(const std::vector<std::string>& ids, const std::array<double, 3>& ratios, uint64_t seed);

void write_split_csv(const DataSplit& split, std::ostream& out);
DataSplit read_split_csv(std::istream& in);

struct DropResult {
  std::vector<std::string> kept;
  std::vector<std::string> dropped;
  double retained_fraction = 1.0;
};

// Removes instances that no solver in the matrix solved.
DropResult drop_unsolvable(const RuntimeMatrix& matrix);

struct CdfPoint {
  double time = 0.0;
  double fraction_solved = 0.0;
};

struct EvaluationRow {
  std::string solver_id;
  double average_runtime = 0.0;  // unsolved runs count at the cutoff
  double percent_solved = 0.0;
  int solved = 0;
  double score = 0.0;
  std::vector<CdfPoint> cdf;
};

struct EvaluationReport {
  std::vector<EvaluationRow> rows;
  EvaluationRow oracle;
  size_t num_instances = 0;

  const EvaluationRow& row(const std::string& solver_id) const;
};

// Per-solver metrics on a complete matrix; scores are computed over all
// solvers of the matrix, the oracle over `subset` (all solvers if empty).
EvaluationReport evaluate(const RuntimeMatrix& matrix, const PurseConfig& purse, const SeriesMap& series,
                          const std::vector<std::string>& subset = {});

// CSV: solver_id,average_runtime,percent_solved,solved,score (oracle last).
void write_evaluation_csv(const EvaluationReport& report, std::ostream& out);
// CSV: solver_id,time,fraction_solved
void write_cdf_csv(const EvaluationReport& report, std::ostream& out);

// Worker count from ZF_WORKERS, defaulting to the hardware concurrency.
int worker_count();

// Calls fn(i) for i in [0, n) on up to `workers` threads.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

}  // namespace zf

#endif  // ZF_HARNESS_H_
