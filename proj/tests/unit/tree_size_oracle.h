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

#ifndef ZF_TESTS_UNIT_TREE_SIZE_ORACLE_H_
#define ZF_TESTS_UNIT_TREE_SIZE_ORACLE_H_

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "zf/cnf.h"

namespace zf::testing {

// Expected size of the DPLL tree whose branching variable is drawn uniformly
// at every node, by exhaustive recursion over partial assignments.
class TreeSizeOracle {
 public:
  explicit TreeSizeOracle(const CnfFormula& f) : f_(f) {}

  double expected_nodes() {
    std::vector<int8_t> a(static_cast<size_t>(f_.num_vars) + 1, 0);
    return nodes(propagate(a));
  }

 private:
  // Returns the propagated state; slot 0 holds 1 on conflict.
  std::vector<int8_t> propagate(std::vector<int8_t> a) const {
    bool changed = true;
    while (changed && a[0] == 0) {
      changed = false;
      for (const Clause& c : f_.clauses) {
        int free = 0;
        Literal last = 1;
        bool sat = false;
        for (Literal l : c) {
          int8_t v = a[static_cast<size_t>(l.var())];
          if (v == 0) {
            ++free;
            last = l;
          } else if ((v > 0) == l.positive()) {
            sat = true;
          }
        }
        if (sat) continue;
        if (free == 0) {
          a[0] = 1;
          break;
        }
        if (free == 1 && a[static_cast<size_t>(last.var())] == 0) {
          a[static_cast<size_t>(last.var())] = last.positive() ? 1 : -1;
          changed = true;
        }
      }
    }
    return a;
  }

  bool terminal(const std::vector<int8_t>& a) const {
    if (a[0] != 0) return true;
    bool all_sat = true;
    for (const Clause& c : f_.clauses) {
      bool sat = false;
      for (Literal l : c) {
        int8_t v = a[static_cast<size_t>(l.var())];
        sat = sat || (v != 0 && (v > 0) == l.positive());
      }
      all_sat = all_sat && sat;
    }
    if (all_sat) return true;
    for (size_t v = 1; v < a.size(); ++v) {
      if (a[v] == 0) return false;
    }
    return true;
  }

  double nodes(const std::vector<int8_t>& a) {
    auto it = memo_.find(a);
    if (it != memo_.end()) return it->second;
    double total = 1.0;
    if (!terminal(a)) {
      double sum = 0.0;
      int free = 0;
      for (size_t v = 1; v < a.size(); ++v) {
        if (a[v] != 0) continue;
        ++free;
        for (int8_t sign : {int8_t{1}, int8_t{-1}}) {
          std::vector<int8_t> child = a;
          child[v] = sign;
          sum += nodes(propagate(child));
        }
      }
      total += sum / free;
    }
    memo_.emplace(a, total);
    return total;
  }

  struct Hash {
    size_t operator()(const std::vector<int8_t>& a) const {
      size_t h = 1469598103934665603ULL;
      for (int8_t x : a) h = (h ^ static_cast<uint8_t>(x)) * 1099511628211ULL;
      return h;
    }
  };

  const CnfFormula& f_;
  std::unordered_map<std::vector<int8_t>, double, Hash> memo_;
};

}  // namespace zf::testing

#endif  // ZF_TESTS_UNIT_TREE_SIZE_ORACLE_H_
