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

#ifndef RACELINE_BAYESOPT_HPP
#define RACELINE_BAYESOPT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "raceline/acquisition.hpp"
#include "raceline/errors.hpp"
#include "raceline/gp.hpp"
#include "raceline/lap_evaluator.hpp"

namespace raceline {

enum class AcquisitionKind { kEI, kNEI };
enum class ConvergenceMode { kFixedBudget, kNoImprovement };

inline std::string to_string(AcquisitionKind k) { return k == AcquisitionKind::kEI ? "ei" : "nei"; }
inline std::string to_string(ConvergenceMode m) { return m == ConvergenceMode::kFixedBudget ? "fixed_budget" : "no_improvement"; }

struct OptConfig {
  int n_init = 10;
  int budget = 50;  // new observations after initialization
  AcquisitionKind acquisition = AcquisitionKind::kEI;
  int nei_fantasies = 32;
  int acq_restarts = 16;
  int acq_candidates = 2048;
  std::uint64_t rng_seed = 0;
  ConvergenceMode convergence = ConvergenceMode::kFixedBudget;
  int patience = 15;
  double min_delta = 0.01;  // s
  /// Resampling attempts for an initial sample whose evaluation fails.
  int init_retries = 5;
  /// Surrogate fit settings. One shared lengthscale by default.
  FitOptions gp = isotropic_fit();

  static FitOptions isotropic_fit() {
    FitOptions f;
    f.ard = false;
    return f;
  }

  void validate() const {
    if (n_init < 2) throw ValidationError("n_init must be >= 2");
    if (budget < 0) throw ValidationError("budget must be >= 0");
    if (nei_fantasies < 8) throw ValidationError("nei_fantasies must be >= 8");
    if (acq_restarts < 1) throw ValidationError("acq_restarts must be >= 1");
    if (acq_candidates < 1) throw ValidationError("acq_candidates must be >= 1");
    if (patience < 1) throw ValidationError("patience must be >= 1");
  }
};

/// One Bayesian-optimization step.
struct IterationRecord {
  int iteration = 0;  // 1-based step index
  OffsetVector w;
  double tau = 0.0;
  double tau_best = 0.0;
  double acquisition_value = 0.0;
  bool penalized = false;
};

/// One objective evaluation (initial samples included).
struct EvaluationRecord {
  OffsetVector w;
  double tau = 0.0;
  double tau_best = 0.0;
  bool penalized = false;
};

struct OptState {
  Dataset dataset;  // inputs normalized to [-1, 1] by the node half widths
  std::optional<FittedGP> model;
  std::optional<Hyperparams> fitted_standardized;
  double tau_best = std::numeric_limits<double>::infinity();
  OffsetVector w_best;
  std::vector<IterationRecord> history;
  std::vector<EvaluationRecord> evaluations;
  int n_init = 0;
  std::mt19937_64 rng;
};

/// Maps an offset vector to [-1, 1]^n and back.
class OffsetScaler {
 public:
  explicit OffsetScaler(std::vector<double> half_widths) : half_widths_(std::move(half_widths)) {}

  Eigen::VectorXd normalize(const OffsetVector& w) const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(w.size()));
    for (std::size_t i = 0; i < w.size(); ++i) u[static_cast<Eigen::Index>(i)] = w[i] / half_widths_[i];
    return u;
  }

  OffsetVector denormalize(const Eigen::VectorXd& u) const {
    OffsetVector w = OffsetVector::zeros(half_widths_.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double hw = half_widths_[i];
      w[i] = std::clamp(u[static_cast<Eigen::Index>(i)] * hw, -hw, hw);
    }
    return w;
  }

  std::size_t dimension() const { return half_widths_.size(); }

 private:
  std::vector<double> half_widths_;
};

namespace detail {

template <typename Evaluator>
OffsetScaler scaler_of(const Evaluator& eval) {
  return OffsetScaler(eval.nodes().half_widths);
}

inline void refit(OptState& state, const OptConfig& config) {
  FitOptions opt = config.gp;
  if (state.fitted_standardized) opt.warm_start = state.fitted_standardized;
  FitReport report;
  state.model.emplace(fit(state.dataset, opt, &report));
  state.fitted_standardized = report.standardized;
}

inline void record(OptState& state, const OffsetScaler& scaler, const OffsetVector& w, double tau, bool penalized) {
  state.dataset.add(scaler.normalize(w), tau);
  if (tau < state.tau_best) {
    state.tau_best = tau;
    state.w_best = w;
  }
  state.evaluations.push_back({w, tau, state.tau_best, penalized});
}

}  // namespace detail

/// Samples `n_init` offset vectors uniformly in the lateral box, evaluates
/// them, and fits the surrogate. A sample whose evaluation fails is redrawn
/// up to `init_retries` times.
template <typename Evaluator>
OptState initialize(const Evaluator& eval, const OptConfig& config) {
  config.validate();
  const OffsetScaler scaler = detail::scaler_of(eval);
  const std::size_t n = scaler.dimension();
  OptState state;
  state.rng.seed(config.rng_seed);
  state.n_init = config.n_init;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  int infeasible = 0;
  for (int j = 0; j < config.n_init; ++j) {
    bool done = false;
    for (int attempt = 0; attempt <= config.init_retries && !done; ++attempt) {
      Eigen::VectorXd u(static_cast<Eigen::Index>(n));
      for (Eigen::Index d = 0; d < u.size(); ++d) u[d] = unit(state.rng);
      const OffsetVector w = scaler.denormalize(u);
      try {
        const double tau = eval.lap_time(w);
        detail::record(state, scaler, w, tau, false);
        done = true;
      } catch (const NumericalError&) {
        ++infeasible;
      }
      if (2 * infeasible > config.n_init) {
        throw InitializationError("initialization: " + std::to_string(infeasible) + " of the sampled trajectories were infeasible; "
                                  "use fewer nodes or narrower offset bounds");
      }
    }
    if (!done) {
      throw InitializationError("initialization: no feasible trajectory after " + std::to_string(config.init_retries) +
                                " resamples; use fewer nodes or narrower offset bounds");
    }
  }
  detail::refit(state, config);
  return state;
}

/// Proposes the acquisition maximizer, evaluates it, and refits the surrogate.
/// A failed evaluation is recorded with twice the worst observed lap time.
template <typename Evaluator>
OptState step(OptState state, const Evaluator& eval, const OptConfig& config) {
  if (!state.model) throw ValidationError("step: state has no fitted model");
  const OffsetScaler scaler = detail::scaler_of(eval);
  const Eigen::Index dim = static_cast<Eigen::Index>(scaler.dimension());
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(dim, -1.0);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(dim, 1.0);

  AcquisitionSearch search;
  search.candidates = config.acq_candidates;
  search.restarts = config.acq_restarts;

  // The best few observed inputs seed local candidates.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(state.dataset.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<Eigen::Index>(i);
  std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return state.dataset.outputs[a] < state.dataset.outputs[b];
  });
  std::vector<Eigen::VectorXd> anchors;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, idx.size()); ++i) {
    anchors.push_back(state.dataset.inputs.row(idx[i]).transpose());
  }

  AcquisitionOptimum opt;
  if (config.acquisition == AcquisitionKind::kEI) {
    const ExpectedImprovement acq(*state.model, state.tau_best);
    opt = maximize_acquisition(acq, lo, hi, search, state.rng, anchors);
  } else {
    const NoisyExpectedImprovement acq(*state.model, config.nei_fantasies, state.rng());
    opt = maximize_acquisition(acq, lo, hi, search, state.rng, anchors);
  }

  const OffsetVector w = scaler.denormalize(opt.x);
  double tau = 0.0;
  bool penalized = false;
  try {
    tau = eval.lap_time(w);
  } catch (const NumericalError&) {
    tau = 2.0 * state.dataset.outputs.maxCoeff();
    penalized = true;
  }
  detail::record(state, scaler, w, tau, penalized);
  state.history.push_back({static_cast<int>(state.history.size()) + 1, w, tau, state.tau_best, opt.value, penalized});
  detail::refit(state, config);
  return state;
}

struct RunResult {
  OffsetVector w_best;
  TrajectoryEvaluation best;  // racing line: waypoints, resampled path, speed profile
  OptState state;
};

inline bool converged(const OptState& state, const OptConfig& config) {
  if (config.convergence != ConvergenceMode::kNoImprovement) return false;
  const auto& h = state.history;
  if (static_cast<int>(h.size()) < config.patience) return false;
  const double before = h.size() == static_cast<std::size_t>(config.patience)
                            ? state.evaluations[static_cast<std::size_t>(state.n_init) - 1].tau_best
                            : h[h.size() - static_cast<std::size_t>(config.patience) - 1].tau_best;
  return before - h.back().tau_best < config.min_delta;
}

/// Initialization followed by Bayesian-optimization steps until the budget
/// is spent or the no-improvement rule fires.
template <typename Evaluator>
RunResult run(const Evaluator& eval, const OptConfig& config) {
  OptState state = initialize(eval, config);
  for (int i = 0; i < config.budget; ++i) {
    state = step(std::move(state), eval, config);
    if (converged(state, config)) break;
  }
  RunResult out;
  out.w_best = state.w_best;
  out.best = eval.evaluate(state.w_best);
  out.state = std::move(state);
  return out;
}

/// Convenience overload building the evaluator from a center line.
inline RunResult run(const CenterLine& center, const VehicleParams& params, const OptConfig& config, int nodes = 20,
                     int resample_count = 100) {
  const LapEvaluator<> eval(select_nodes(center, nodes), params, resample_count);
  return run(eval, config);
}

}  // namespace raceline

#endif  // RACELINE_BAYESOPT_HPP
