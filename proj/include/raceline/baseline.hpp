// Copyright 2026 The Raceline Authors
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

#ifndef RACELINE_BASELINE_HPP
#define RACELINE_BASELINE_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "raceline/bayesopt.hpp"
#include "raceline/lap_evaluator.hpp"

namespace raceline {

/// Running minimum of the lap time over consecutive evaluations.
struct ConvergenceCurve {
  std::vector<double> best_so_far;
  std::uint64_t seed = 0;
};

/// Uniform random sampling of offset vectors in the lateral box. Draws use
/// the same stream as BayesOpt initialization, so with equal seeds the first
/// `n_init` samples coincide. Failed evaluations count toward the budget.
template <typename Evaluator>
ConvergenceCurve random_search(const Evaluator& eval, int n_evals, std::uint64_t seed) {
  if (n_evals < 1) throw ValidationError("random search: n_evals must be >= 1");
  const OffsetScaler scaler(eval.nodes().half_widths);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  ConvergenceCurve curve;
  curve.seed = seed;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_evals; ++i) {
    Eigen::VectorXd u(static_cast<Eigen::Index>(scaler.dimension()));
    for (Eigen::Index d = 0; d < u.size(); ++d) u[d] = unit(rng);
    try {
      best = std::min(best, eval.lap_time(scaler.denormalize(u)));
    } catch (const NumericalError&) {
    }
    curve.best_so_far.push_back(best);
  }
  return curve;
}

inline ConvergenceCurve random_search(const CenterLine& center, const VehicleParams& params, int n_evals, std::uint64_t seed,
                                      int nodes = 20, int resample_count = 100) {
  return random_search(LapEvaluator<>(select_nodes(center, nodes), params, resample_count), n_evals, seed);
}

enum class MethodKind { kRandom, kEI, kNEI };

struct MethodSpec {
  std::string label;
  MethodKind kind = MethodKind::kRandom;
};

inline MethodSpec parse_method(const std::string& name) {
  if (name == "random") return {"random", MethodKind::kRandom};
  if (name == "ei") return {"ei", MethodKind::kEI};
  if (name == "nei") return {"nei", MethodKind::kNEI};
  throw ValidationError("unknown method '" + name + "' (valid: random, ei, nei)");
}

struct CompareConfig {
  int evaluations = 50;  // per run, initialization included
  int n_runs = 10;
  std::uint64_t base_seed = 0;
  int jobs = 1;
  /// Give every run `base_seed` itself instead of a derived seed.
  bool repeat_seed = false;
  OptConfig bayesopt{};  // n_init, acquisition settings; budget is derived
};

struct MethodSummary {
  std::string label;
  std::vector<ConvergenceCurve> runs;
  std::vector<double> mean;
  std::vector<double> lower;  // 95% band
  std::vector<double> upper;
  double final_mean = 0.0;
  std::vector<std::string> failures;
};

struct ComparisonReport {
  std::vector<MethodSummary> methods;
  int n_runs = 0;
  int evaluations = 0;
};

/// Seed of run `r`, shared by all methods so every method starts from the same draws.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t run) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (run + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct Band {
  std::vector<double> mean, lower, upper;
};

/// Pointwise mean with a normal-approximation 95% band, mean +- 1.96 s / sqrt(n).
inline Band confidence_band(const std::vector<ConvergenceCurve>& runs) {
  Band b;
  if (runs.empty()) return b;
  const std::size_t len = runs.front().best_so_far.size();
  const double n = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < len; ++i) {
    double sum = 0.0;
    for (const auto& r : runs) sum += r.best_so_far[i];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : runs) ss += (r.best_so_far[i] - mean) * (r.best_so_far[i] - mean);
    const double half = runs.size() > 1 ? 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
    b.mean.push_back(mean);
    b.lower.push_back(mean - half);
    b.upper.push_back(mean + half);
  }
  return b;
}

/// One run of one method: the best-so-far lap time after every evaluation.
template <typename Evaluator>
ConvergenceCurve run_method(const Evaluator& eval, const MethodSpec& method, const CompareConfig& cfg, std::uint64_t seed) {
  if (method.kind == MethodKind::kRandom) return random_search(eval, cfg.evaluations, seed);
  OptConfig oc = cfg.bayesopt;
  oc.acquisition = method.kind == MethodKind::kEI ? AcquisitionKind::kEI : AcquisitionKind::kNEI;
  oc.rng_seed = seed;
  oc.budget = cfg.evaluations - oc.n_init;
  oc.convergence = ConvergenceMode::kFixedBudget;
  if (oc.budget < 0) throw ValidationError("compare: evaluation budget is smaller than n_init");
  OptState state = initialize(eval, oc);
  for (int i = 0; i < oc.budget; ++i) state = step(std::move(state), eval, oc);
  ConvergenceCurve curve;
  curve.seed = seed;
  for (const auto& e : state.evaluations) curve.best_so_far.push_back(e.tau_best);
  return curve;
}

/// Runs every method `n_runs` times with seeds shared across methods and
/// reports pointwise mean curves with 95% bands. Runs that throw are left out
/// of the statistics and listed in `failures`.
template <typename Evaluator>
ComparisonReport compare(const Evaluator& eval, const std::vector<MethodSpec>& methods, const CompareConfig& cfg) {
  if (cfg.n_runs < 2) throw ValidationError("compare: n_runs must be >= 2");
  if (methods.empty()) throw ValidationError("compare: no methods given");
  if (cfg.evaluations < 1) throw ValidationError("compare: evaluations must be >= 1");

  const std::size_t runs = static_cast<std::size_t>(cfg.n_runs);
  const std::size_t tasks = methods.size() * runs;
  std::vector<ConvergenceCurve> curves(tasks);
  std::vector<std::string> errors(tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const std::size_t m = t / runs;
      const std::size_t r = t % runs;
      try {
        curves[t] = run_method(eval, methods[m], cfg, cfg.repeat_seed ? cfg.base_seed : derive_seed(cfg.base_seed, r));
      } catch (const std::exception& e) {
        errors[t] = e.what();
      }
    }
  };
  const int jobs = std::clamp(cfg.jobs, 1, static_cast<int>(tasks));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  ComparisonReport report;
  report.n_runs = cfg.n_runs;
  report.evaluations = cfg.evaluations;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodSummary s;
    s.label = methods[m].label;
    for (std::size_t r = 0; r < runs; ++r) {
      const std::size_t t = m * runs + r;
      if (errors[t].empty()) {
        s.runs.push_back(std::move(curves[t]));
      } else {
        s.failures.push_back("run " + std::to_string(r) + ": " + errors[t]);
      }
    }
    const Band b = confidence_band(s.runs);
    s.mean = b.mean;
    s.lower = b.lower;
    s.upper = b.upper;
    s.final_mean = s.mean.empty() ? std::numeric_limits<double>::quiet_NaN() : s.mean.back();
    report.methods.push_back(std::move(s));
  }
  return report;
}

}  // namespace raceline

#endif  // RACELINE_BASELINE_HPP
