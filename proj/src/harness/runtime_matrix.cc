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

#include "zf/runtime_matrix.h"

namespace zf {

namespace {

using Kind = DataError::Kind;

}  // namespace

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kSat:
      return "sat";
    case RunStatus::kUnsat:
      return "unsat";
    case RunStatus::kTimeout:
      return "timeout";
    case RunStatus::kCrash:
      return "crash";
  }
  return "crash";
}

RunStatus run_status_from_string(const std::string& name) {
  if (name == "sat") return RunStatus::kSat;
  if (name == "unsat") return RunStatus::kUnsat;
  if (name == "timeout") return RunStatus::kTimeout;
  if (name == "crash") return RunStatus::kCrash;
  throw DataError(Kind::kParse, "unknown run status '" + name + "'");
}

RunRecord make_record(std::string solver_id, std::string instance_id, double runtime, RunStatus status, double cutoff) {
  RunRecord r;
  r.solver_id = std::move(solver_id);
  r.instance_id = std::move(instance_id);
  r.status = status;
  r.runtime_seconds = std::max(0.0, runtime);
  if (is_solved(status) && r.runtime_seconds > cutoff) r.status = RunStatus::kTimeout;
  if (r.status == RunStatus::kTimeout) r.runtime_seconds = cutoff;
  r.runtime_seconds = std::min(r.runtime_seconds, cutoff);
  r.censored = r.status == RunStatus::kTimeout;
  return r;
}

RuntimeMatrix::RuntimeMatrix(std::vector<std::string> solvers, std::vector<std::string> instances,
                             double cutoff_seconds)
    : solvers_(std::move(solvers)), instances_(std::move(instances)), cutoff_(cutoff_seconds) {
  if (!(cutoff_ > 0.0)) throw DataError(Kind::kInvalidRecord, "cutoff must be positive");
  for (size_t i = 0; i < solvers_.size(); ++i) {
    if (!solver_pos_.emplace(solvers_[i], i).second) throw DataError(Kind::kDuplicateId, "duplicate solver " + solvers_[i]);
  }
  for (size_t i = 0; i < instances_.size(); ++i) {
    if (!instance_pos_.emplace(instances_[i], i).second) {
      throw DataError(Kind::kDuplicateId, "duplicate instance " + instances_[i]);
    }
  }
  cells_.resize(solvers_.size() * instances_.size());
  present_.assign(cells_.size(), false);
  consensus_.assign(instances_.size(), 0);
}

RuntimeMatrix RuntimeMatrix::from_records(std::span<const RunRecord> records, double cutoff_seconds) {
  std::vector<std::string> solvers, instances;
  std::unordered_map<std::string, size_t> seen_s, seen_i;
  for (const RunRecord& r : records) {
    if (seen_s.emplace(r.solver_id, solvers.size()).second) solvers.push_back(r.solver_id);
    if (seen_i.emplace(r.instance_id, instances.size()).second) instances.push_back(r.instance_id);
  }
  RuntimeMatrix m(std::move(solvers), std::move(instances), cutoff_seconds);
  for (const RunRecord& r : records) {
    const size_t s = m.solver_index(r.solver_id), i = m.instance_index(r.instance_id);
    if (m.has(s, i)) throw DataError(Kind::kDuplicateId, "duplicate record for " + r.solver_id + "/" + r.instance_id);
    m.set(s, i, r);
  }
  return m;
}

std::optional<size_t> RuntimeMatrix::find_solver(const std::string& id) const {
  auto it = solver_pos_.find(id);
  if (it == solver_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> RuntimeMatrix::find_instance(const std::string& id) const {
  auto it = instance_pos_.find(id);
  if (it == instance_pos_.end()) return std::nullopt;
  return it->second;
}

size_t RuntimeMatrix::solver_index(const std::string& id) const {
  auto s = find_solver(id);
  if (!s) throw DataError(Kind::kUnknownId, "unknown solver '" + id + "'");
  return *s;
}

size_t RuntimeMatrix::instance_index(const std::string& id) const {
  auto i = find_instance(id);
  if (!i) throw DataError(Kind::kUnknownId, "unknown instance '" + id + "'");
  return *i;
}

void RuntimeMatrix::set(size_t solver, size_t instance, RunRecord record) {
  if (solver >= solvers_.size() || instance >= instances_.size()) {
    throw DataError(Kind::kUnknownId, "matrix cell out of range");
  }
  record.solver_id = solvers_[solver];
  record.instance_id = instances_[instance];
  const double tol = 1e-9 * std::max(1.0, cutoff_);
  if (!(record.runtime_seconds >= 0.0) || record.runtime_seconds > cutoff_ + tol) {
    throw DataError(Kind::kInvalidRecord, "runtime outside [0, cutoff] for " + record.solver_id + "/" + record.instance_id);
  }
  if (record.status == RunStatus::kTimeout) {
    if (std::abs(record.runtime_seconds - cutoff_) > tol || !record.censored) {
      throw DataError(Kind::kInvalidRecord, "timeout must sit at the cutoff and be censored");
    }
  } else if (record.censored) {
    throw DataError(Kind::kInvalidRecord, "only timeouts are censored");
  }
  if (is_solved(record.status)) {
    int8_t claim = record.status == RunStatus::kSat ? 1 : -1;
    int8_t& c = consensus_[instance];
    if (c != 0 && c != claim) {
      throw DataError(Kind::kInconsistentStatus, "instance " + record.instance_id + " reported both sat and unsat");
    }
    c = claim;
  }
  const size_t k = index(solver, instance);
  cells_[k] = std::move(record);
  present_[k] = true;
}

void RuntimeMatrix::set(RunRecord record) {
  const size_t s = solver_index(record.solver_id), i = instance_index(record.instance_id);
  set(s, i, std::move(record));
}

const RunRecord& RuntimeMatrix::at(size_t solver, size_t instance) const {
  const size_t k = index(solver, instance);
  if (!present_[k]) {
    throw DataError(Kind::kIncompleteMatrix, "no record for " + solvers_[solver] + "/" + instances_[instance]);
  }
  return cells_[k];
}

bool RuntimeMatrix::complete() const { return std::all_of(present_.begin(), present_.end(), [](bool p) { return p; }); }

void RuntimeMatrix::require_complete() const {
  for (size_t s = 0; s < solvers_.size(); ++s) {
    for (size_t i = 0; i < instances_.size(); ++i) at(s, i);
  }
}

std::optional<bool> RuntimeMatrix::satisfiable(size_t instance) const {
  if (consensus_[instance] == 0) return std::nullopt;
  return consensus_[instance] > 0;
}

RuntimeMatrix RuntimeMatrix::select_instances(std::span<const size_t> instances) const {
  std::vector<std::string> ids;
  for (size_t i : instances) ids.push_back(instances_.at(i));
  RuntimeMatrix out(solvers_, ids, cutoff_);
  for (size_t s = 0; s < solvers_.size(); ++s) {
    for (size_t j = 0; j < instances.size(); ++j) {
      if (has(s, instances[j])) out.set(s, j, at(s, instances[j]));
    }
  }
  return out;
}

RuntimeMatrix RuntimeMatrix::select_solvers(std::span<const size_t> solvers) const {
  std::vector<std::string> ids;
  for (size_t s : solvers) ids.push_back(solvers_.at(s));
  RuntimeMatrix out(ids, instances_, cutoff_);
  for (size_t j = 0; j < solvers.size(); ++j) {
    for (size_t i = 0; i < instances_.size(); ++i) {
      if (has(solvers[j], i)) out.set(j, i, at(solvers[j], i));
    }
  }
  return out;
}

RuntimeMatrix RuntimeMatrix::select_instances(const std::vector<std::string>& ids) const {
  std::vector<size_t> idx;
  for (const auto& id : ids) idx.push_back(instance_index(id));
  return select_instances(std::span<const size_t>(idx));
}

RuntimeMatrix RuntimeMatrix::select_solvers(const std::vector<std::string>& ids) const {
  std::vector<size_t> idx;
  for (const auto& id : ids) idx.push_back(solver_index(id));
  return select_solvers(std::span<const size_t>(idx));
}

size_t RuntimeMatrix::add_solver(const std::string& id) {
  if (!solver_pos_.emplace(id, solvers_.size()).second) throw DataError(Kind::kDuplicateId, "duplicate solver " + id);
  solvers_.push_back(id);
  cells_.resize(solvers_.size() * instances_.size());
  present_.resize(cells_.size(), false);
  return solvers_.size() - 1;
}

std::vector<RunRecord> RuntimeMatrix::records() const {
  std::vector<RunRecord> out;
  for (size_t i = 0; i < instances_.size(); ++i) {
    for (size_t s = 0; s < solvers_.size(); ++s) {
      if (has(s, i)) out.push_back(at(s, i));
    }
  }
  return out;
}

}  // namespace zf
