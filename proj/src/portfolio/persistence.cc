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

#include "zf/persistence.h"

#include <fstream>

#include "json.hpp"

namespace zf {

namespace {

using json = nlohmann::json;
using Kind = PortfolioError::Kind;

json matrix_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix matrix_from(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<size_t>(rows * cols)) {
    throw PortfolioError(Kind::kFormat, "matrix size does not match its data");
  }
  Matrix m(rows, cols);
  size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++].get<double>();
  }
  return m;
}

json basis_json(const BasisSpec& b) {
  json pairs = json::array();
  for (const auto& [j, k] : b.product_pairs) pairs.push_back({j, k});
  return json{{"num_raw", b.num_raw},
              {"raw_indices", b.raw_indices},
              {"product_pairs", pairs},
              {"means", b.means},
              {"scales", b.scales}};
}

BasisSpec basis_from(const json& j) {
  BasisSpec b;
  b.num_raw = j.at("num_raw").get<size_t>();
  b.raw_indices = j.at("raw_indices").get<std::vector<int>>();
  for (const auto& p : j.at("product_pairs")) b.product_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  b.means = j.at("means").get<std::vector<double>>();
  b.scales = j.at("scales").get<std::vector<double>>();
  return b;
}

json ridge_json(const RidgeModel& m) {
  return json{{"basis", basis_json(m.basis)}, {"weights", m.weights}, {"bias", m.bias},
              {"delta", m.delta},           {"sigma", m.sigma},     {"target", to_string(m.target)}};
}

RidgeModel ridge_from(const json& j) {
  RidgeModel m;
  m.basis = basis_from(j.at("basis"));
  m.weights = j.at("weights").get<std::vector<double>>();
  m.bias = j.at("bias").get<double>();
  m.delta = j.at("delta").get<double>();
  m.sigma = j.at("sigma").get<double>();
  m.target = target_from_string(j.at("target").get<std::string>());
  m.validate();
  return m;
}

json classifier_json(const ClassifierModel& c) {
  return json{{"classes", c.classes},
              {"represented", c.represented},
              {"weights", matrix_json(c.weights)},
              {"means", c.means},
              {"scales", c.scales},
              {"penalty", c.penalty}};
}

ClassifierModel classifier_from(const json& j) {
  ClassifierModel c;
  c.classes = j.at("classes").get<std::vector<std::string>>();
  c.represented = j.at("represented").get<std::vector<bool>>();
  c.weights = matrix_from(j.at("weights"));
  c.means = j.at("means").get<std::vector<double>>();
  c.scales = j.at("scales").get<std::vector<double>>();
  c.penalty = j.at("penalty").get<double>();
  c.validate();
  return c;
}

json hierarchical_json(const HierarchicalModel& m) {
  json experts = json::array();
  for (const auto& e : m.experts) experts.push_back(ridge_json(e));
  return json{{"classes", m.classes},
              {"experts", experts},
              {"classifier", classifier_json(m.classifier)},
              {"gating",
               {{"weights", matrix_json(m.gating.weights)}, {"means", m.gating.means}, {"scales", m.gating.scales}}}};
}

HierarchicalModel hierarchical_from(const json& j) {
  HierarchicalModel m;
  m.classes = j.at("classes").get<std::vector<std::string>>();
  for (const auto& e : j.at("experts")) m.experts.push_back(ridge_from(e));
  m.classifier = classifier_from(j.at("classifier"));
  const json& g = j.at("gating");
  m.gating.weights = matrix_from(g.at("weights"));
  m.gating.means = g.at("means").get<std::vector<double>>();
  m.gating.scales = g.at("scales").get<std::vector<double>>();
  m.validate();
  return m;
}

std::string timing_mode_name(TimingMode mode) { return mode == TimingMode::kStepCount ? "step_count" : "wall_clock"; }

TimingMode timing_mode_from(const std::string& name) {
  if (name == "wall_clock") return TimingMode::kWallClock;
  if (name == "step_count") return TimingMode::kStepCount;
  throw PortfolioError(Kind::kFormat, "unknown timing mode '" + name + "'");
}

json budget_json(const ProbeBudget& b) {
  return json{{"per_probe_seconds", b.per_probe_seconds},
              {"total_seconds", b.total_seconds},
              {"max_ls_steps", b.max_ls_steps},
              {"ls_probe_runs", b.ls_probe_runs},
              {"dpll_probe_runs", b.dpll_probe_runs},
              {"mode", timing_mode_name(b.mode)},
              {"work_units_per_second", b.work_units_per_second}};
}

ProbeBudget budget_from(const json& j) {
  ProbeBudget b;
  b.per_probe_seconds = j.at("per_probe_seconds").get<double>();
  b.total_seconds = j.at("total_seconds").get<double>();
  b.max_ls_steps = j.at("max_ls_steps").get<int64_t>();
  b.ls_probe_runs = j.at("ls_probe_runs").get<int>();
  b.dpll_probe_runs = j.at("dpll_probe_runs").get<int>();
  b.mode = timing_mode_from(j.at("mode").get<std::string>());
  b.work_units_per_second = j.at("work_units_per_second").get<double>();
  return b;
}

json model_json(const SolverModel& m) {
  if (const auto* ridge = std::get_if<RidgeModel>(&m.model)) return json{{"type", "ridge"}, {"model", ridge_json(*ridge)}};
  return json{{"type", "hierarchical"}, {"model", hierarchical_json(std::get<HierarchicalModel>(m.model))}};
}

SolverModel model_from(const json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "ridge") return SolverModel{ridge_from(j.at("model"))};
  if (type == "hierarchical") return SolverModel{hierarchical_from(j.at("model"))};
  throw PortfolioError(Kind::kFormat, "unknown model type '" + type + "'");
}

json parse(std::istream& in, const char* format) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw PortfolioError(Kind::kFormat, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("format", std::string()) != format) {
    throw PortfolioError(Kind::kFormat, std::string("expected a ") + format + " document");
  }
  return doc;
}

// Converts JSON access errors and model validation failures into kFormat.
template <typename F>
auto guarded(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw PortfolioError(Kind::kFormat, std::string("malformed document: ") + e.what());
  } catch (const LearningError& e) {
    throw PortfolioError(Kind::kFormat, std::string("inconsistent model: ") + e.what());
  } catch (const HarnessError& e) {
    throw PortfolioError(Kind::kFormat, std::string("bad solver entry: ") + e.what());
  } catch (const PortfolioError& e) {
    throw PortfolioError(Kind::kFormat, e.what());
  }
}

}  // namespace

void write_ridge_model(const RidgeModel& model, std::ostream& out) {
  json doc = ridge_json(model);
  doc["format"] = kRidgeFormat;
  out << doc.dump(2) << '\n';
}

RidgeModel read_ridge_model(std::istream& in) {
  json doc = parse(in, kRidgeFormat);
  return guarded([&] { return ridge_from(doc); });
}

void write_hierarchical_model(const HierarchicalModel& model, std::ostream& out) {
  json doc = hierarchical_json(model);
  doc["format"] = kHierarchicalFormat;
  out << doc.dump(2) << '\n';
}

HierarchicalModel read_hierarchical_model(std::istream& in) {
  json doc = parse(in, kHierarchicalFormat);
  return guarded([&] { return hierarchical_from(doc); });
}

void write_portfolio(const PortfolioConfig& p, std::ostream& out) {
  json solvers = json::array();
  for (const auto& d : p.solvers) solvers.push_back({{"id", d.id}, {"kind", to_string(d.kind)}, {"command", d.command}});
  json presolvers = json::array();
  for (const auto& e : p.presolvers.entries) presolvers.push_back({{"solver", e.solver_id}, {"cutoff", e.cutoff_seconds}});
  json subset = json::array();
  for (const auto& m : p.subset) subset.push_back({{"solver", m.solver_id}, {"model", model_json(m.model)}});
  json doc{{"format", kPortfolioFormat},
           {"objective", to_string(p.objective)},
           {"hierarchy", to_string(p.hierarchy)},
           {"cutoff_seconds", p.cutoff_seconds},
           {"seed", p.seed},
           {"feature_budget", budget_json(p.feature_budget)},
           {"solvers", solvers},
           {"presolvers", presolvers},
           {"backup_solver", p.backup_solver},
           {"subset", subset}};
  out << doc.dump(2) << '\n';
}

PortfolioConfig read_portfolio(std::istream& in) {
  json doc = parse(in, kPortfolioFormat);
  PortfolioConfig p = guarded([&] {
    PortfolioConfig p;
    p.objective = objective_from_string(doc.at("objective").get<std::string>());
    p.hierarchy = hierarchy_mode_from_string(doc.at("hierarchy").get<std::string>());
    p.cutoff_seconds = doc.at("cutoff_seconds").get<double>();
    p.seed = doc.at("seed").get<uint64_t>();
    p.feature_budget = budget_from(doc.at("feature_budget"));
    for (const auto& d : doc.at("solvers")) {
      p.solvers.push_back(SolverDescriptor{d.at("id").get<std::string>(),
                                           solver_kind_from_string(d.at("kind").get<std::string>()),
                                           d.at("command").get<std::string>()});
    }
    for (const auto& e : doc.at("presolvers")) {
      p.presolvers.entries.push_back(PresolverEntry{e.at("solver").get<std::string>(), e.at("cutoff").get<double>()});
    }
    p.backup_solver = doc.at("backup_solver").get<std::string>();
    for (const auto& m : doc.at("subset")) {
      p.subset.push_back(PortfolioMember{m.at("solver").get<std::string>(), model_from(m.at("model"))});
    }
    return p;
  });
  try {
    p.validate();
  } catch (const PortfolioError& e) {
    throw PortfolioError(Kind::kFormat, std::string("invalid portfolio: ") + e.what());
  }
  return p;
}

void write_portfolio_file(const PortfolioConfig& portfolio, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw PortfolioError(Kind::kFormat, "cannot write " + path);
  write_portfolio(portfolio, out);
}

PortfolioConfig read_portfolio_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PortfolioError(Kind::kFormat, "cannot open " + path);
  return read_portfolio(in);
}

}  // namespace zf
