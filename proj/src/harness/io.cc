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

#include <cstdlib>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "zf/harness.h"

namespace zf {

namespace {

using DKind = DataError::Kind;

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& text, size_t line_no) {
  const char* begin = text.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size()) {
    throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": bad number '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& text, size_t line_no) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": bad boolean '" + text + "'");
}

// Reads the header line and checks it against `expected`.
void expect_header(std::istream& in, const std::vector<std::string>& expected) {
  std::string line;
  if (!std::getline(in, line) || split_csv_line(line) != expected) {
    throw DataError(DKind::kParse, "unexpected CSV header, want " + [&] {
      std::string s;
      for (const auto& e : expected) s += (s.empty() ? "" : ",") + e;
      return s;
    }());
  }
}

bool blank(const std::string& line) { return line.find_first_not_of(" \t\r") == std::string::npos; }

}  // namespace

std::optional<size_t> FeatureTable::find(const std::string& id) const {
  for (size_t i = 0; i < instance_ids.size(); ++i) {
    if (instance_ids[i] == id) return i;
  }
  return std::nullopt;
}

const FeatureVector& FeatureTable::at(const std::string& id) const {
  auto i = find(id);
  if (!i) throw DataError(DKind::kUnknownId, "no features for instance " + id);
  return rows[*i];
}

FeatureTable FeatureTable::select(const std::vector<std::string>& ids) const {
  std::unordered_map<std::string, size_t> pos;
  for (size_t i = 0; i < instance_ids.size(); ++i) pos.emplace(instance_ids[i], i);
  FeatureTable out;
  for (const auto& id : ids) {
    auto it = pos.find(id);
    if (it == pos.end()) throw DataError(DKind::kUnknownId, "no features for instance " + id);
    out.instance_ids.push_back(id);
    out.rows.push_back(rows[it->second]);
  }
  return out;
}

void write_feature_csv(const FeatureTable& table, std::ostream& out) {
  out << "instance_id";
  for (auto name : feature_names()) out << ',' << name;
  out << ",feature_time,timed_out\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (size_t i = 0; i < table.size(); ++i) {
    const FeatureVector& fv = table.rows[i];
    out << table.instance_ids[i];
    for (size_t j = 0; j < kNumFeatures; ++j) {
      out << ',';
      if (fv.values) out << (*fv.values)[j];
    }
    out << ',' << fv.feature_time_seconds << ',' << (fv.timed_out ? 1 : 0) << '\n';
  }
}

FeatureTable read_feature_csv(std::istream& in) {
  std::vector<std::string> header{"instance_id"};
  for (auto name : feature_names()) header.emplace_back(name);
  header.emplace_back("feature_time");
  header.emplace_back("timed_out");
  expect_header(in, header);

  FeatureTable table;
  std::unordered_set<std::string> seen;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " cells");
    }
    if (!seen.insert(cells[0]).second) throw DataError(DKind::kDuplicateId, "duplicate instance " + cells[0]);
    FeatureVector fv;
    fv.feature_time_seconds = parse_double(cells[kNumFeatures + 1], line_no);
    fv.timed_out = parse_bool(cells[kNumFeatures + 2], line_no);
    if (!fv.timed_out) {
      FeatureArray x{};
      for (size_t j = 0; j < kNumFeatures; ++j) x[j] = parse_double(cells[j + 1], line_no);
      fv.values = x;
    }
    table.instance_ids.push_back(cells[0]);
    table.rows.push_back(fv);
  }
  return table;
}

void write_runtime_csv(const RuntimeMatrix& matrix, std::ostream& out) {
  out << "instance_id,solver_id,runtime,status\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (size_t i = 0; i < matrix.num_instances(); ++i) {
    for (size_t s = 0; s < matrix.num_solvers(); ++s) {
      if (!matrix.has(s, i)) continue;
      const RunRecord& r = matrix.at(s, i);
      out << r.instance_id << ',' << r.solver_id << ',' << r.runtime_seconds << ',' << to_string(r.status) << '\n';
    }
  }
}

RuntimeMatrix read_runtime_csv(std::istream& in, double cutoff_seconds) {
  expect_header(in, {"instance_id", "solver_id", "runtime", "status"});
  std::vector<RunRecord> records;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 4) throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": expected 4 cells");
    RunStatus status;
    try {
      status = run_status_from_string(cells[3]);
    } catch (const DataError&) {
      throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": bad status '" + cells[3] + "'");
    }
    records.push_back(make_record(cells[1], cells[0], parse_double(cells[2], line_no), status, cutoff_seconds));
  }
  return RuntimeMatrix::from_records(records, cutoff_seconds);
}

void write_instances_csv(const std::vector<InstanceInfo>& instances, std::ostream& out) {
  out << "instance_id,category,satisfiable\n";
  for (const auto& info : instances) {
    out << info.id << ',' << info.category << ','
        << (info.satisfiable ? (*info.satisfiable ? "sat" : "unsat") : "unknown") << '\n';
  }
}

std::vector<InstanceInfo> read_instances_csv(std::istream& in) {
  expect_header(in, {"instance_id", "category", "satisfiable"});
  std::vector<InstanceInfo> out;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 3) throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": expected 3 cells");
    InstanceInfo info{cells[0], cells[1], std::nullopt};
    if (cells[2] == "sat") {
      info.satisfiable = true;
    } else if (cells[2] == "unsat") {
      info.satisfiable = false;
    } else if (cells[2] != "unknown" && !cells[2].empty()) {
      throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": bad satisfiability '" + cells[2] + "'");
    }
    out.push_back(info);
  }
  return out;
}

void write_split_csv(const DataSplit& split, std::ostream& out) {
  out << "instance_id,part\n";
  for (const auto& id : split.train) out << id << ",train\n";
  for (const auto& id : split.validation) out << id << ",validation\n";
  for (const auto& id : split.test) out << id << ",test\n";
}

DataSplit read_split_csv(std::istream& in) {
  expect_header(in, {"instance_id", "part"});
  DataSplit split;
  std::string line;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != 2) throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": expected 2 cells");
    if (cells[1] == "train") {
      split.train.push_back(cells[0]);
    } else if (cells[1] == "validation") {
      split.validation.push_back(cells[0]);
    } else if (cells[1] == "test") {
      split.test.push_back(cells[0]);
    } else {
      throw DataError(DKind::kParse, "line " + std::to_string(line_no) + ": bad part '" + cells[1] + "'");
    }
  }
  return split;
}

}  // namespace zf
