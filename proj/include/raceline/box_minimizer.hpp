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

#ifndef RACELINE_BOX_MINIMIZER_HPP
#define RACELINE_BOX_MINIMIZER_HPP

#include <algorithm>
#include <cmath>
#include <deque>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace raceline {

struct BoxMinimizerOptions {
  int max_iterations = 200;
  int memory = 8;
  double gradient_tolerance = 1e-9;  // on the projected gradient, infinity norm
  double max_step = 2.0;             // infinity norm of the first trial step
  /// Consecutive steps with f unchanged up to roundoff before giving up.
  int max_flat_steps = 10;
};

struct BoxMinimizerResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  double projected_gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Gradient components that can still move x inside [lo, hi]; components
/// pushing against an active bound are zeroed.
inline Eigen::VectorXd projected_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
  Eigen::VectorXd pg = g;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if ((x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0)) pg[i] = 0.0;
  }
  return pg;
}

/// Projected limited-memory BFGS for smooth objectives under box constraints.
/// `fn(x, grad)` returns f(x) and writes its gradient.
template <typename Fn>
BoxMinimizerResult minimize_box(Fn&& fn, Eigen::VectorXd x, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                const BoxMinimizerOptions& opt = {}) {
  const Eigen::Index n = x.size();
  auto project = [&](Eigen::VectorXd v) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    return v;
  };
  x = project(std::move(x));
  Eigen::VectorXd g(n);
  double f = fn(x, g);
  std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> memory;

  BoxMinimizerResult res;
  int it = 0;
  int flat_steps = 0;
  for (; it < opt.max_iterations; ++it) {
    const Eigen::VectorXd pg = projected_gradient(x, g, lo, hi);
    if (pg.lpNorm<Eigen::Infinity>() < opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    // Two-loop recursion restricted to the free variables.
    Eigen::VectorXd q = pg;
    std::vector<double> alphas(memory.size());
    for (std::size_t j = memory.size(); j-- > 0;) {
      const auto& [s, y] = memory[j];
      alphas[j] = s.dot(q) / y.dot(s);
      q -= alphas[j] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      q *= s.dot(y) / y.squaredNorm();
    } else {
      q *= std::min(1.0, opt.max_step / pg.lpNorm<Eigen::Infinity>());
    }
    for (std::size_t j = 0; j < memory.size(); ++j) {
      const auto& [s, y] = memory[j];
      const double beta = y.dot(q) / y.dot(s);
      q += (alphas[j] - beta) * s;
    }
    Eigen::VectorXd dir = -q;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pg[i] == 0.0) dir[i] = 0.0;
    }
    if (dir.dot(pg) >= 0.0) {
      dir = -pg * std::min(1.0, opt.max_step / pg.lpNorm<Eigen::Infinity>());
      memory.clear();
    }

    // Armijo backtracking. Close to the optimum the decrease drops below the
    // roundoff in f; there a step is taken if f stays flat and the projected
    // gradient shrinks.
    const double pg_norm = pg.lpNorm<Eigen::Infinity>();
    const double flat = 1e-14 * std::max(1.0, std::abs(f));
    double step = 1.0;
    Eigen::VectorXd x_new, g_new(n);
    double f_new = f;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls) {
      x_new = project(x + step * dir);
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      if (std::isfinite(f_new) && f_new <= f + flat &&
          projected_gradient(x_new, g_new, lo, hi).lpNorm<Eigen::Infinity>() < pg_norm) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    flat_steps = std::abs(f_new - f) <= flat ? flat_steps + 1 : 0;

    Eigen::VectorXd s = x_new - x;
    Eigen::VectorXd y = g_new - g;
    if (s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > opt.memory) memory.pop_front();
    }
    x = std::move(x_new);
    g = g_new;
    f = f_new;
    if (flat_steps >= opt.max_flat_steps) break;
  }
  res.x = x;
  res.value = f;
  res.gradient = g;
  res.projected_gradient_norm = projected_gradient(x, g, lo, hi).lpNorm<Eigen::Infinity>();
  res.iterations = it;
  if (res.projected_gradient_norm < opt.gradient_tolerance) res.converged = true;
  return res;
}

}  // namespace raceline

#endif  // RACELINE_BOX_MINIMIZER_HPP
