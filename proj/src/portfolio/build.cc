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
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>

#include "zf/portfolio.h"

namespace zf {

namespace {

using Kind = PortfolioError::Kind;

uint64_t mix_seed(uint64_t seed, uint64_t k) {
  uint64_t x = seed + 0x9E3779B97F4A7C15ULL * (k + 1);
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Competition score a new entrant would earn on the validation set, given
// its per-instance solve flags and times; the recorded solvers compete.
class EntrantScorer {
 public:
  EntrantScorer(const RuntimeMatrix& m, const PurseConfig& purse, const SeriesMap& series) : purse_(purse) {
    const size_t n = m.num_instances();
    winners_.assign(n, 0.0);
    sf_sum_.assign(n, 0.0);
    std::vector<std::string> sid = series_of(series, m.instances());
    std::map<std::string, size_t> group_of;
    for (size_t i = 0; i < n; ++i) {
      auto [it, fresh] = group_of.emplace(sid[i], group_of.size());
      group_.push_back(it->second);
    }
    std::vector<std::set<size_t>> scorers(group_of.size());
    for (size_t s = 0; s < m.num_solvers(); ++s) {
      for (size_t i = 0; i < n; ++i) {
        const RunRecord& r = m.at(s, i);
        if (!scores(r, purse)) continue;
        winners_[i] += 1.0;
        sf_sum_[i] += speed_factor(purse.time_limit, r.runtime_seconds);
        scorers[group_[i]].insert(s);
      }
    }
    for (const auto& g : scorers) series_rivals_.push_back(static_cast<double>(g.size()));
  }

  double score(const std::vector<char>& solved, const std::vector<double>& time) const {
    double solution = 0.0, speed = 0.0;
    std::vector<char> hit(series_rivals_.size(), 0);
    for (size_t i = 0; i < solved.size(); ++i) {
      if (!solved[i] || time[i] > purse_.time_limit) continue;
      const double sf = speed_factor(purse_.time_limit, time[i]);
      solution += purse_.solution_purse / (winners_[i] + 1.0);
      speed += purse_.speed_purse * sf / (sf_sum_[i] + sf);
      hit[group_[i]] = 1;
    }
    double series = 0.0;
    for (size_t g = 0; g < hit.size(); ++g) {
      if (hit[g]) series += purse_.series_purse / (series_rivals_[g] + 1.0);
    }
    return solution + speed + series;
  }

 private:
  PurseConfig purse_;
  std::vector<double> winners_;
  std::vector<double> sf_sum_;
  std::vector<size_t> group_;
  std::vector<double> series_rivals_;
};

// State of a validation instance once pre-solving and feature computation
// are done; only `select` instances depend on the subset.
struct PreMain {
  bool select = false;
  bool solved = false;
  double time = 0.0;  // total time if decided, elapsed so far if select
};

// Mirrors SimulatedRunner: solved or crashed within budget keep their time.
struct SimRun {
  bool solved = false;
  bool crash = false;
  double used = 0.0;
};

SimRun sim_run(const RunRecord& r, double budget) {
  SimRun out;
  if ((is_solved(r.status) || r.status == RunStatus::kCrash) && r.runtime_seconds <= budget) {
    out.solved = is_solved(r.status);
    out.crash = r.status == RunStatus::kCrash;
    out.used = std::max(r.runtime_seconds, 0.0);
  } else {
    out.used = budget;
  }
  return out;
}

struct TrainedSet {
  std::vector<size_t> rows;  // indices into the usable training rows
  std::vector<std::optional<SolverModel>> models;  // per solver
  std::vector<std::vector<double>> val_pred;       // per solver, per validation instance
};

}  // namespace

PortfolioConfig build_portfolio(const PortfolioData& data, const PortfolioBuildOptions& options, BuildReport* report) {
  BuildReport local_report;
  BuildReport& rep = report ? *report : local_report;
  rep = BuildReport{};

  const RuntimeMatrix& train = data.train;
  const RuntimeMatrix& val = data.validation;
  train.require_complete();
  val.require_complete();
  if (data.solvers.empty()) throw PortfolioError(Kind::kInvalidConfig, "no solvers");
  const double cutoff = train.cutoff();
  const bool by_score = options.objective == Objective::kMaxScore;

  // Solvers sorted by id so index order is the lexicographic tie order.
  std::vector<SolverDescriptor> solvers = data.solvers;
  std::sort(solvers.begin(), solvers.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  const size_t ns = solvers.size();
  std::vector<size_t> train_col(ns), val_col(ns);
  for (size_t s = 0; s < ns; ++s) {
    if (s > 0 && solvers[s].id == solvers[s - 1].id) throw PortfolioError(Kind::kInvalidConfig, "duplicate solver id");
    auto t = train.find_solver(solvers[s].id);
    auto v = val.find_solver(solvers[s].id);
    if (!t || !v) throw PortfolioError(Kind::kInvalidConfig, "solver " + solvers[s].id + " lacks runtime data");
    train_col[s] = *t;
    val_col[s] = *v;
  }
  auto modelled = [&](size_t s) { return by_score || solvers[s].kind == SolverKind::kComplete; };

  // Usable training rows: those with computed features.
  std::vector<size_t> usable;
  for (size_t i = 0; i < train.num_instances(); ++i) {
    const FeatureVector& fv = data.features.at(train.instances()[i]);
    if (!fv.timed_out && fv.values) usable.push_back(i);
  }
  Matrix x_train(static_cast<Eigen::Index>(usable.size()), static_cast<Eigen::Index>(kNumFeatures));
  for (size_t r = 0; r < usable.size(); ++r) {
    const FeatureArray& x = *data.features.at(train.instances()[usable[r]]).values;
    for (size_t j = 0; j < kNumFeatures; ++j) x_train(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = x[j];
  }

  // Targets per solver on the usable rows.
  std::vector<LabeledDataset> datasets(ns);
  for (size_t s = 0; s < ns; ++s) {
    if (!modelled(s)) continue;
    LabeledDataset& d = datasets[s];
    d.features = x_train;
    d.targets.resize(static_cast<Eigen::Index>(usable.size()));
    d.censored.assign(usable.size(), false);
    d.cutoff_log = log_runtime(cutoff);
    std::vector<double> labels;
    if (by_score) labels = score_labels(train, solvers[s].id, options.purse, options.series);
    for (size_t r = 0; r < usable.size(); ++r) {
      const RunRecord& rec = train.at(train_col[s], usable[r]);
      const auto row = static_cast<Eigen::Index>(r);
      if (by_score) {
        d.targets[row] = labels[usable[r]];
      } else if (is_solved(rec.status)) {
        d.targets[row] = log_runtime(rec.runtime_seconds);
      } else {
        d.targets[row] = d.cutoff_log;
        d.censored[r] = true;
      }
    }
  }

  // Class labels and a classifier shared by every schedule.
  std::vector<std::string> classes;
  std::vector<int> class_of(usable.size(), -1);
  std::optional<ClassifierModel> classifier;
  if (options.hierarchy != HierarchyMode::kNone) {
    std::vector<std::string> names(usable.size());
    std::set<std::string> class_set;
    for (size_t r = 0; r < usable.size(); ++r) {
      auto sat = train.satisfiable(usable[r]);
      if (!sat) continue;
      std::string name = *sat ? "sat" : "unsat";
      if (options.hierarchy == HierarchyMode::kGeneral6) {
        auto it = data.categories.find(train.instances()[usable[r]]);
        name = (it == data.categories.end() ? std::string("default") : it->second) + "/" + name;
      }
      names[r] = name;
      class_set.insert(name);
    }
    if (options.hierarchy == HierarchyMode::kSat2) class_set = {"sat", "unsat"};
    if (options.hierarchy == HierarchyMode::kGeneral6) {
      std::set<std::string> cats;
      for (const auto& c : class_set) cats.insert(c.substr(0, c.rfind('/')));
      for (const auto& c : cats) class_set.insert({c + "/sat", c + "/unsat"});
    }
    classes.assign(class_set.begin(), class_set.end());
    std::vector<size_t> labelled;
    std::vector<int> labels;
    for (size_t r = 0; r < usable.size(); ++r) {
      if (names[r].empty()) continue;
      class_of[r] = static_cast<int>(std::lower_bound(classes.begin(), classes.end(), names[r]) - classes.begin());
      labelled.push_back(r);
      labels.push_back(class_of[r]);
    }
    Matrix xl(static_cast<Eigen::Index>(labelled.size()), x_train.cols());
    for (size_t k = 0; k < labelled.size(); ++k) {
      xl.row(static_cast<Eigen::Index>(k)) = x_train.row(static_cast<Eigen::Index>(labelled[k]));
    }
    try {
      classifier = train_classifier(xl, labels, classes, options.hierarchical.classifier);
    } catch (const LearningError& e) {
      rep.warnings.push_back(std::string("classifier not trained, using flat models: ") + e.what());
    }
  }

  // Validation data.
  const size_t nv = val.num_instances();
  std::vector<FeatureVector> val_features(nv);
  std::vector<bool> val_timed_out(nv);
  for (size_t i = 0; i < nv; ++i) {
    val_features[i] = data.features.at(val.instances()[i]);
    val_timed_out[i] = val_features[i].timed_out || !val_features[i].values;
  }
  EntrantScorer scorer(val, options.purse, options.series);

  rep.candidates = select_presolver_candidates(val, solvers, options.purse, options.series,
                                               options.presolver_candidates_per_kind);
  std::vector<PresolverSchedule> schedules = enumerate_presolver_configs(rep.candidates);

  // Group schedules by the training rows they leave.
  std::map<std::vector<bool>, size_t> set_index;
  std::vector<TrainedSet> sets;
  std::vector<std::optional<size_t>> schedule_set(schedules.size());
  for (size_t k = 0; k < schedules.size(); ++k) {
    const auto active = schedules[k].active();
    std::vector<bool> presolved(train.num_instances(), false);
    size_t count = 0;
    for (size_t i = 0; i < train.num_instances(); ++i) {
      for (const auto& e : active) {
        const RunRecord& r = train.at(train.solver_index(e.solver_id), i);
        if (is_solved(r.status) && r.runtime_seconds <= e.cutoff_seconds) {
          presolved[i] = true;
          break;
        }
      }
      count += presolved[i];
    }
    if (count == train.num_instances()) continue;
    std::vector<bool> keep(usable.size());
    for (size_t r = 0; r < usable.size(); ++r) keep[r] = !presolved[usable[r]];
    auto [it, fresh] = set_index.emplace(keep, sets.size());
    if (fresh) {
      TrainedSet ts;
      for (size_t r = 0; r < usable.size(); ++r) {
        if (keep[r]) ts.rows.push_back(r);
      }
      ts.models.resize(ns);
      ts.val_pred.resize(ns);
      sets.push_back(std::move(ts));
    }
    schedule_set[k] = it->second;
  }
  rep.distinct_training_sets = sets.size();

  // Per-solver models for every distinct training set.
  std::mutex warn_mutex;
  auto warn = [&](std::string w) {
    std::lock_guard<std::mutex> lock(warn_mutex);
    rep.warnings.push_back(std::move(w));
  };
  HardnessModelOptions model_options = options.model;
  model_options.target = by_score ? Target::kScore : Target::kLogRuntime;
  HierarchicalOptions hier_options = options.hierarchical;
  hier_options.expert = model_options;
  parallel_for(sets.size() * ns, options.workers, [&](size_t task) {
    TrainedSet& ts = sets[task / ns];
    const size_t s = task % ns;
    if (!modelled(s)) return;
    if (ts.rows.size() < options.min_training_rows) {
      warn("training set " + std::to_string(task / ns) + ": " + solvers[s].id + " excluded, only " +
           std::to_string(ts.rows.size()) + " rows");
      return;
    }
    try {
      if (classifier) {
        std::vector<size_t> rows;
        std::vector<int> labels;
        for (size_t r : ts.rows) {
          if (class_of[r] < 0) continue;
          rows.push_back(r);
          labels.push_back(class_of[r]);
        }
        ts.models[s] = SolverModel{train_hierarchical(datasets[s].subset(rows), labels, *classifier, hier_options)};
      } else {
        ts.models[s] = SolverModel{train_hardness_model(datasets[s].subset(ts.rows), model_options)};
      }
    } catch (const LearningError& e) {
      warn("training set " + std::to_string(task / ns) + ": " + solvers[s].id + " excluded: " + e.what());
      return;
    }
    std::vector<double>& pred = ts.val_pred[s];
    pred.assign(nv, std::numeric_limits<double>::quiet_NaN());
    for (size_t i = 0; i < nv; ++i) {
      if (!val_timed_out[i]) pred[i] = ts.models[s]->predict(*val_features[i].values);
    }
  });

  // Evaluate every schedule on the validation set.
  std::vector<size_t> backup_pool;
  std::vector<std::string> backup_ids;
  for (size_t s = 0; s < ns; ++s) {
    if (modelled(s)) {
      backup_pool.push_back(s);
      backup_ids.push_back(solvers[s].id);
    }
  }
  if (backup_ids.empty()) throw PortfolioError(Kind::kInsufficientData, "no solver eligible for the objective");

  rep.schedules.resize(schedules.size());
  std::optional<size_t> best;
  for (size_t k = 0; k < schedules.size(); ++k) {
    ScheduleResult& result = rep.schedules[k];
    result.schedule = schedules[k];
    if (!schedule_set[k]) {
      result.rejected = true;
      rep.warnings.push_back("schedule " + std::to_string(k) + " solves every training instance; skipped");
      continue;
    }
    const TrainedSet& ts = sets[*schedule_set[k]];
    std::vector<size_t> candidates;
    for (size_t s = 0; s < ns; ++s) {
      if (ts.models[s]) candidates.push_back(s);
    }
    if (candidates.empty()) {
      result.rejected = true;
      rep.warnings.push_back("schedule " + std::to_string(k) + " leaves no trainable solver; skipped");
      continue;
    }
    result.backup = choose_backup(val, schedules[k], val_timed_out, options.objective, options.purse, options.series,
                                  backup_ids);
    const size_t backup_col = val.solver_index(result.backup);

    // Pre-solving, features and backup do not depend on the subset.
    const auto active = schedules[k].active();
    std::vector<PreMain> pre(nv);
    for (size_t i = 0; i < nv; ++i) {
      PreMain& p = pre[i];
      double elapsed = 0.0;
      bool done = false;
      for (const auto& e : active) {
        const double budget = std::min(e.cutoff_seconds, cutoff - elapsed);
        if (budget <= 0.0) break;
        SimRun run = sim_run(val.at(val.solver_index(e.solver_id), i), budget);
        elapsed += std::clamp(run.used, 0.0, budget);
        if (run.solved) {
          p.solved = true;
          done = true;
          break;
        }
      }
      if (!done && cutoff - elapsed > 0.0) {
        const double fb_total = std::min(options.feature_budget.total_seconds, cutoff - elapsed);
        bool timed_out = val_timed_out[i];
        double ft = val_features[i].feature_time_seconds;
        if (ft > fb_total) {
          timed_out = true;
          ft = fb_total;
        }
        elapsed += std::clamp(ft, 0.0, cutoff - elapsed);
        if (cutoff - elapsed > 0.0) {
          if (timed_out) {
            const double budget = cutoff - elapsed;
            SimRun run = sim_run(val.at(backup_col, i), budget);
            elapsed += std::clamp(run.used, 0.0, budget);
            p.solved = run.solved;
          } else {
            p.select = true;
          }
        }
      }
      p.time = std::min(elapsed, cutoff);
    }

    auto evaluate = [&](const std::vector<size_t>& subset) {
      std::vector<char> solved(nv, 0);
      std::vector<double> time(nv, cutoff);
      std::vector<size_t> order(subset.size());
      for (size_t i = 0; i < nv; ++i) {
        if (!pre[i].select) {
          solved[i] = pre[i].solved;
          time[i] = pre[i].time;
          continue;
        }
        for (size_t a = 0; a < subset.size(); ++a) order[a] = candidates[subset[a]];
        std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
          const double pa = ts.val_pred[a][i], pb = ts.val_pred[b][i];
          return by_score ? pa > pb : pa < pb;
        });
        double elapsed = pre[i].time;
        for (size_t s : order) {
          const double budget = cutoff - elapsed;
          if (budget <= 0.0) break;
          SimRun run = sim_run(val.at(val_col[s], i), budget);
          elapsed += std::clamp(run.used, 0.0, budget);
          if (run.solved) solved[i] = 1;
          if (!run.crash) break;
        }
        time[i] = std::min(elapsed, cutoff);
      }
      if (by_score) return scorer.score(solved, time);
      double total = 0.0;
      for (size_t i = 0; i < nv; ++i) total += solved[i] ? time[i] : cutoff;
      return -total / static_cast<double>(std::max<size_t>(nv, 1));
    };

    SubsetResult found = candidates.size() <= options.exhaustive_limit
                             ? subset_search_exhaustive(candidates.size(), evaluate)
                             : subset_search_local(candidates.size(), evaluate, mix_seed(options.seed, k),
                                                   options.local_search);
    for (size_t a : found.subset) result.subset.push_back(solvers[candidates[a]].id);
    result.performance = found.performance;
    if (!best || result.performance > rep.schedules[*best].performance) best = k;
  }
  if (!best) throw PortfolioError(Kind::kInsufficientData, "no pre-solver schedule left trainable data");
  rep.chosen = *best;

  const ScheduleResult& chosen = rep.schedules[*best];
  const TrainedSet& ts = sets[*schedule_set[*best]];
  PortfolioConfig config;
  config.solvers = data.solvers;
  config.presolvers = chosen.schedule;
  config.backup_solver = chosen.backup;
  for (const auto& id : chosen.subset) {
    size_t s = static_cast<size_t>(std::find_if(solvers.begin(), solvers.end(), [&](const auto& d) { return d.id == id; }) -
                                   solvers.begin());
    config.subset.push_back(PortfolioMember{id, *ts.models[s]});
  }
  config.objective = options.objective;
  config.hierarchy = classifier ? options.hierarchy : HierarchyMode::kNone;
  config.cutoff_seconds = cutoff;
  config.feature_budget = options.feature_budget;
  config.seed = options.seed;
  config.validate();
  return config;
}

}  // namespace zf
