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

#ifndef ZF_RUNTIME_MATRIX_H_
#define ZF_RUNTIME_MATRIX_H_

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace zf {

class DataError : public std::runtime_error {
 public:
  enum class Kind {
    kInconsistentStatus,  // sat and unsat claimed for one instance
    kInvalidRecord,
    kIncompleteMatrix,
    kUnknownId,
    kDuplicateId,
    kParse,
    kIo,
  };

  DataError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

enum class RunStatus { kSat, kUnsat, kTimeout, kCrash };

std::string to_string(RunStatus status);
RunStatus run_status_from_string(const std::string& name);

inline bool is_solved(RunStatus status) { return status == RunStatus::kSat || status == RunStatus::kUnsat; }

struct RunRecord {
  std::string solver_id;
  std::string instance_id;
  double runtime_seconds = 0.0;
  RunStatus status = RunStatus::kTimeout;
  bool censored = true;

  bool operator==(const RunRecord&) const = default;
};

// Builds a record obeying the cutoff rules: timeouts sit at the cutoff and
// are censored, solved runs above the cutoff become timeouts, and crashes
// are clamped to the cutoff.
RunRecord make_record(std::string solver_id, std::string instance_id, double runtime, RunStatus status, double cutoff);

// Solvers x instances table of run records sharing one cutoff.
class RuntimeMatrix {
 public:
  RuntimeMatrix() = default;
  RuntimeMatrix(std::vector<std::string> solvers, std::vector<std::string> instances, double cutoff_seconds);

  // Collects records into a matrix; solver and instance order follow first
  // appearance. Throws on duplicates or status conflicts.
  static RuntimeMatrix from_records(std::span<const RunRecord> records, double cutoff_seconds);

  const std::vector<std::string>& solvers() const { return solvers_; }
  const std::vector<std::string>& instances() const { return instances_; }
  size_t num_solvers() const { return solvers_.size(); }
  size_t num_instances() const { return instances_.size(); }
  double cutoff() const { return cutoff_; }

  size_t solver_index(const std::string& id) const;
  size_t instance_index(const std::string& id) const;
  std::optional<size_t> find_solver(const std::string& id) const;
  std::optional<size_t> find_instance(const std::string& id) const;

  // Validates the record against the cutoff and the sat/unsat consensus.
  void set(size_t solver, size_t instance, RunRecord record);
  void set(RunRecord record);
  bool has(size_t solver, size_t instance) const { return present_[index(solver, instance)]; }
  const RunRecord& at(size_t solver, size_t instance) const;
  bool solved(size_t solver, size_t instance) const { return has(solver, instance) && is_solved(at(solver, instance).status); }

  bool complete() const;
  void require_complete() const;

  // Consensus satisfiability of an instance, if any solver decided it.
  std::optional<bool> satisfiable(size_t instance) const;

  RuntimeMatrix select_instances(std::span<const size_t> instances) const;
  RuntimeMatrix select_solvers(std::span<const size_t> solvers) const;
  RuntimeMatrix select_instances(const std::vector<std::string>& ids) const;
  RuntimeMatrix select_solvers(const std::vector<std::string>& ids) const;

  // Appends a solver column (all cells initially absent).
  size_t add_solver(const std::string& id);

  std::vector<RunRecord> records() const;

 private:
  size_t index(size_t solver, size_t instance) const { return solver * instances_.size() + instance; }

  std::vector<std::string> solvers_;
  std::vector<std::string> instances_;
  std::unordered_map<std::string, size_t> solver_pos_;
  std::unordered_map<std::string, size_t> instance_pos_;
  double cutoff_ = 1200.0;
  std::vector<RunRecord> cells_;
  std::vector<bool> present_;
  std::vector<int8_t> consensus_;  // per instance: 0 unknown, 1 sat, -1 unsat
};

}  // namespace zf

#endif  // ZF_RUNTIME_MATRIX_H_
