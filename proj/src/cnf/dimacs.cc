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

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "zf/cnf.h"

namespace zf {

DimacsError::DimacsError(Kind kind, size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what),
      kind_(kind),
      line_(line) {}

namespace {

using Kind = DimacsError::Kind;

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

// Splits on whitespace without allocating per token.
std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && is_space(line[i])) ++i;
    size_t j = i;
    while (j < line.size() && !is_space(line[j])) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool parse_int(std::string_view token, int64_t& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* end = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(token.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

CnfFormula parse_dimacs(std::istream& in, std::string source_id) {
  CnfFormula formula;
  formula.source_id = std::move(source_id);
  bool have_header = false;
  int64_t declared_clauses = 0;
  Clause pending;
  size_t line_no = 0;
  std::string line;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    while (!view.empty() && is_space(view.back())) view.remove_suffix(1);
    size_t first = 0;
    while (first < view.size() && is_space(view[first])) ++first;
    view.remove_prefix(first);
    if (view.empty() || view.front() == 'c') continue;
    if (view == "%") break;

    auto tokens = tokenize(view);
    if (tokens.front() == "p") {
      if (have_header) throw DimacsError(Kind::kMalformedToken, line_no, "duplicate problem line");
      int64_t vars = 0;
      if (tokens.size() != 4 || tokens[1] != "cnf" || !parse_int(tokens[2], vars) ||
          !parse_int(tokens[3], declared_clauses) || vars < 0 || declared_clauses < 0 ||
          vars > INT32_MAX) {
        throw DimacsError(Kind::kMalformedToken, line_no, "bad problem line '" + std::string(view) + "'");
      }
      formula.num_vars = static_cast<int32_t>(vars);
      formula.clauses.reserve(static_cast<size_t>(declared_clauses));
      have_header = true;
      continue;
    }
    if (!have_header) throw DimacsError(Kind::kMissingHeader, line_no, "clause before problem line");

    for (std::string_view token : tokens) {
      int64_t lit = 0;
      if (!parse_int(token, lit)) {
        throw DimacsError(Kind::kMalformedToken, line_no, "bad token '" + std::string(token) + "'");
      }
      if (lit == 0) {
        if (pending.empty()) throw DimacsError(Kind::kEmptyClause, line_no, "empty clause");
        formula.clauses.push_back(std::move(pending));
        pending.clear();
        continue;
      }
      if (lit > formula.num_vars || -lit > formula.num_vars) {
        throw DimacsError(Kind::kLiteralOutOfRange, line_no,
                          "literal " + std::to_string(lit) + " exceeds " +
                              std::to_string(formula.num_vars) + " variables");
      }
      pending.emplace_back(static_cast<int32_t>(lit));
    }
  }

  if (!have_header) throw DimacsError(Kind::kMissingHeader, line_no, "no problem line");
  // A final clause without its terminating 0 is accepted.
  if (!pending.empty()) formula.clauses.push_back(std::move(pending));
  if (static_cast<int64_t>(formula.clauses.size()) != declared_clauses) {
    throw DimacsError(Kind::kHeaderMismatch, line_no,
                      "declared " + std::to_string(declared_clauses) + " clauses, found " +
                          std::to_string(formula.clauses.size()));
  }
  return formula;
}

CnfFormula parse_dimacs(std::string_view text, std::string source_id) {
  std::istringstream in{std::string(text)};
  return parse_dimacs(in, std::move(source_id));
}

CnfFormula read_dimacs_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in, path);
}

void write_dimacs(const CnfFormula& formula, std::ostream& out) {
  out << "p cnf " << formula.num_vars << ' ' << formula.clauses.size() << '\n';
  for (const Clause& clause : formula.clauses) {
    for (Literal lit : clause) out << lit.value() << ' ';
    out << "0\n";
  }
}

std::string write_dimacs(const CnfFormula& formula) {
  std::ostringstream out;
  write_dimacs(formula, out);
  return out.str();
}

}  // namespace zf
