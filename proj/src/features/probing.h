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

#ifndef ZF_SRC_FEATURES_PROBING_H_
#define ZF_SRC_FEATURES_PROBING_H_

#include <cstdint>
#include <random>
#include <vector>

#include "zf/features.h"

namespace zf::probing {

using Rng = std::mt19937_64;

// Elapsed-time source for probe budgets: thread CPU time, or a deterministic
// count of charged work units converted at a fixed rate.
class WorkClock {
 public:
  WorkClock(TimingMode mode, double units_per_second);

  void charge(int64_t units) { units_ += units; }
  double elapsed() const;

 private:
  TimingMode mode_;
  double units_per_second_;
  int64_t units_ = 0;
  double start_cpu_ = 0.0;
};

inline uint32_t lit_code(Literal lit) {
  return 2u * static_cast<uint32_t>(lit.var()) + (lit.positive() ? 0u : 1u);
}

// Formula with duplicate literals removed per clause and occurrence lists
// indexed by lit_code().
struct ClauseDb {
  int32_t num_vars = 0;
  std::vector<std::vector<Literal>> clauses;
  std::vector<std::vector<uint32_t>> occurrences;

  static ClauseDb build(const CnfFormula& formula, bool drop_tautologies);
  int64_t total_literals() const;
};

// Trail-free propagation engine for single-path probing.
class Propagator {
 public:
  explicit Propagator(const ClauseDb& db);

  void reset();
  // Assigns lit without counting it as a propagation; false on immediate conflict.
  bool assign(Literal lit);
  // Runs unit propagation to fixpoint; returns forced assignments made.
  int64_t propagate();

  bool conflict() const { return conflict_; }
  bool all_satisfied() const { return satisfied_ == db_.clauses.size(); }
  Value value(int32_t var) const { return values_[static_cast<size_t>(var)]; }
  const std::vector<int32_t>& unassigned() const { return unassigned_; }
  int64_t work() const { return work_; }

 private:
  void set(Literal lit);
  bool lit_true(Literal lit) const;
  bool lit_false(Literal lit) const;

  const ClauseDb& db_;
  std::vector<Value> values_;
  std::vector<int32_t> num_true_;
  std::vector<int32_t> num_false_;
  std::vector<uint32_t> pending_;
  std::vector<int32_t> unassigned_;
  std::vector<size_t> unassigned_pos_;
  size_t satisfied_ = 0;
  bool conflict_ = false;
  int64_t work_ = 0;
};

DpllProbeFeatures run_dpll_probes(const ClauseDb& db, int num_probes, WorkClock& clock, double deadline,
                                  Rng& rng);
SapsProbeFeatures run_saps(const ClauseDb& db, const ProbeBudget& budget, const SapsParams& params,
                           WorkClock& clock, double deadline, Rng& rng);
GsatProbeFeatures run_gsat(const ClauseDb& db, const ProbeBudget& budget, WorkClock& clock, double deadline,
                           Rng& rng);

}  // namespace zf::probing

#endif  // ZF_SRC_FEATURES_PROBING_H_
