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

#ifndef ZF_CNF_H_
#define ZF_CNF_H_

#include <compare>
#include <cstdint>
#include <cstdlib>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace zf {

// A signed DIMACS literal: +v is variable v, -v its negation. Never zero.
class Literal {
 public:
  constexpr Literal(int32_t value) : value_(value) {}  // NOLINT: implicit by design of DIMACS ints

  constexpr int32_t value() const { return value_; }
  constexpr int32_t var() const { return value_ < 0 ? -value_ : value_; }
  constexpr bool positive() const { return value_ > 0; }
  constexpr Literal operator-() const { return Literal(-value_); }

  friend constexpr auto operator<=>(Literal, Literal) = default;

 private:
  int32_t value_;
};

using Clause = std::vector<Literal>;

struct CnfFormula {
  int32_t num_vars = 0;
  std::vector<Clause> clauses;
  std::string source_id;

  size_t num_clauses() const { return clauses.size(); }

  // Structural equality; source_id is an annotation and is not compared.
  bool operator==(const CnfFormula& other) const {
    return num_vars == other.num_vars && clauses == other.clauses;
  }
};

class DimacsError : public std::runtime_error {
 public:
  enum class Kind {
    kMissingHeader,
    kHeaderMismatch,
    kLiteralOutOfRange,
    kEmptyClause,
    kMalformedToken,
  };

  DimacsError(Kind kind, size_t line, const std::string& what);

  Kind kind() const { return kind_; }
  size_t line() const { return line_; }

 private:
  Kind kind_;
  size_t line_;
};

// Parses DIMACS CNF. Comment lines ("c ...") and blank lines are skipped,
// clauses may span lines, and a lone "%" line ends the input.
CnfFormula parse_dimacs(std::istream& in, std::string source_id = {});
CnfFormula parse_dimacs(std::string_view text, std::string source_id = {});
CnfFormula read_dimacs_file(const std::string& path);

void write_dimacs(const CnfFormula& formula, std::ostream& out);
std::string write_dimacs(const CnfFormula& formula);

}  // namespace zf

#endif  // ZF_CNF_H_
