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

#include <cmath>
#include <random>

#include "zf/harness.h"

namespace zf {

namespace {

uint64_t splitmix(uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b) { return splitmix(splitmix(seed ^ splitmix(a)) ^ b); }

std::string category_name(int cluster) {
  static const char* kNames[] = {"random", "crafted", "industrial"};
  return cluster < 3 ? kNames[cluster] : "cluster" + std::to_string(cluster);
}

std::vector<SyntheticSolverModel> synthetic_solvers(int clusters) {
  const auto k = static_cast<size_t>(clusters);
  std::vector<SyntheticSolverModel> models;
  for (int c = 0; c < clusters; ++c) {
    SyntheticSolverModel m;
    m.id = "dom" + std::to_string(c);
    m.mu.assign(k, std::log(4000.0));
    m.sigma.assign(k, 1.5);
    m.mu[static_cast<size_t>(c)] = std::log(15.0);
    m.sigma[static_cast<size_t>(c)] = 1.0;
    m.unsat_shift = 0.4;
    models.push_back(m);
  }
  SyntheticSolverModel generalist;
  generalist.id = "generalist";
  generalist.mu.assign(k, std::log(700.0));
  generalist.sigma.assign(k, 1.4);
  generalist.unsat_shift = 0.3;
  generalist.crash_probability = 0.01;
  models.push_back(generalist);

  SyntheticSolverModel quick;
  quick.id = "ls_quick";
  quick.kind = SolverKind::kLocalSearch;
  quick.mu.assign(k, std::log(3000.0));
  quick.sigma.assign(k, 1.0);
  quick.mu[0] = std::log(1.5);
  if (k > 1) quick.mu[1] = std::log(40.0);
  models.push_back(quick);

  SyntheticSolverModel slow;
  slow.id = "ls_slow";
  slow.kind = SolverKind::kLocalSearch;
  slow.mu.assign(k, std::log(300.0));
  slow.sigma.assign(k, 1.5);
  models.push_back(slow);
  return models;
}

}  // namespace

RunRecord run_synthetic(const SyntheticSolverModel& model, const InstanceLatent& instance, const std::string& instance_id,
                        double cutoff_seconds, uint64_t seed) {
  const auto c = static_cast<size_t>(instance.cluster);
  if (c >= model.mu.size() || c >= model.sigma.size() || !(model.sigma[c] > 0.0)) {
    throw HarnessError(HarnessError::Kind::kInvalidArgument, "synthetic solver " + model.id + " has no cluster " +
                                                                 std::to_string(instance.cluster));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  double log_time = model.mu[c] + instance.hardness + model.sigma[c] * normal(rng);
  if (!instance.satisfiable) log_time += model.unsat_shift;
  const double runtime = std::exp(log_time);
  const double crash_roll = uniform(rng);
  if (model.kind == SolverKind::kLocalSearch && !instance.satisfiable) {
    return make_record(model.id, instance_id, cutoff_seconds, RunStatus::kTimeout, cutoff_seconds);
  }
  if (crash_roll < model.crash_probability) {
    return make_record(model.id, instance_id, std::min(runtime, cutoff_seconds) * uniform(rng), RunStatus::kCrash,
                       cutoff_seconds);
  }
  return make_record(model.id, instance_id, runtime, instance.satisfiable ? RunStatus::kSat : RunStatus::kUnsat,
                     cutoff_seconds);
}

SyntheticBenchmark make_synthetic_benchmark(const SyntheticBenchmarkOptions& options) {
  if (options.clusters < 1 || options.instances < 1 || options.unsat_fraction < 0.0 || options.unsat_fraction > 1.0) {
    throw HarnessError(HarnessError::Kind::kInvalidArgument, "invalid synthetic benchmark options");
  }
  SyntheticBenchmark bench;
  bench.models = synthetic_solvers(options.clusters);
  std::vector<std::string> solver_ids;
  for (const auto& m : bench.models) {
    bench.solvers.push_back(SolverDescriptor{m.id, m.kind, ""});
    solver_ids.push_back(m.id);
  }

  std::vector<std::string> ids;
  std::mt19937_64 rng(derive_seed(options.seed, 0xB0, 0));
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> uniform;
  for (int i = 0; i < options.instances; ++i) {
    std::string id = "inst" + std::to_string(i);
    InstanceLatent latent;
    latent.cluster = i % options.clusters;
    latent.satisfiable = uniform(rng) >= options.unsat_fraction;
    latent.hardness = 0.6 * normal(rng);

    FeatureVector fv;
    fv.seed = options.seed;
    FeatureArray x{};
    for (double& v : x) v = normal(rng);
    // Planted signal: cluster identity, satisfiability and hardness.
    x[static_cast<size_t>((2 * latent.cluster) % 6)] += 2.5;
    x[static_cast<size_t>((2 * latent.cluster + 1) % 6)] += 2.5;
    const double sat_sign = latent.satisfiable ? 1.0 : -1.0;
    x[6] += 1.5 * sat_sign;
    x[7] += 1.5 * sat_sign;
    for (size_t j = 8; j < 11; ++j) x[j] = latent.hardness + 0.25 * normal(rng);
    fv.feature_time_seconds = std::exp(std::log(1.5) + 0.5 * normal(rng));
    if (uniform(rng) < options.feature_timeout_fraction) {
      fv.timed_out = true;
      fv.feature_time_seconds = 60.0;
    } else {
      fv.values = x;
    }

    InstanceInfo info;
    info.id = id;
    info.category = category_name(latent.cluster);
    info.satisfiable = latent.satisfiable;
    bench.instances.push_back(info);
    bench.latents.push_back(latent);
    bench.features.instance_ids.push_back(id);
    bench.features.rows.push_back(fv);
    ids.push_back(id);
  }

  bench.runtimes = RuntimeMatrix(solver_ids, ids, options.cutoff_seconds);
  for (size_t i = 0; i < ids.size(); ++i) {
    for (size_t s = 0; s < bench.models.size(); ++s) {
      bench.runtimes.set(s, i, run_synthetic(bench.models[s], bench.latents[i], ids[i], options.cutoff_seconds,
                                             derive_seed(options.seed, i + 1, s + 1)));
    }
  }
  return bench;
}

}  // namespace zf
