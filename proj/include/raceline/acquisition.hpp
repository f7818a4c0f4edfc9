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

#ifndef RACELINE_ACQUISITION_HPP
#define RACELINE_ACQUISITION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "raceline/gp.hpp"

namespace raceline {

inline double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// E[max(tau_best - T, 0)] for T ~ N(mean, variance). Lap time is minimized,
/// so improvement is measured below the incumbent.
inline double expected_improvement(double mean, double variance, double tau_best) {
  const double gap = tau_best - mean;
  if (!(variance > 0.0)) return std::max(gap, 0.0);
  const double sigma = std::sqrt(variance);
  const double z = gap / sigma;
  return std::max(gap * normal_cdf(z) + sigma * normal_pdf(z), 0.0);
}

/// Expected improvement over the best observed output under a fitted model.
class ExpectedImprovement {
 public:
  ExpectedImprovement(const FittedGP& model, double tau_best) : model_(&model), tau_best_(tau_best) {}

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Prediction p = model_->predict(x);
    return expected_improvement(p.mean, p.variance, tau_best_);
  }

 private:
  const FittedGP* model_;
  double tau_best_;
};

/// Monte-Carlo noisy expected improvement.
///
/// Draws joint posterior samples of the latent function at the observed
/// inputs. For each draw the model is conditioned on the drawn values as
/// noise-free observations and the EI of the query is taken against the
/// draw's minimum; the acquisition is the average over draws. Draws are fixed
/// at construction, so the value is a deterministic function of the query.
class NoisyExpectedImprovement {
 public:
  NoisyExpectedImprovement(const FittedGP& model, int fantasies, std::uint64_t seed) : model_(&model) {
    const Dataset& data = model.dataset();
    const Hyperparams& h = model.hyperparams();
    const Eigen::Index n = data.size();

    const Eigen::MatrixXd cov = model.posterior_covariance(data.inputs);
    const Eigen::VectorXd mean = model.posterior_mean(data.inputs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::VectorXd root_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd root = eig.eigenvectors() * root_vals.asDiagonal();

    noiseless_ = factorize(gram(data.inputs, h), 0.0, h.signal_variance);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    weights_.resize(n, fantasies);
    best_.resize(static_cast<std::size_t>(fantasies));
    Eigen::VectorXd z(n);
    for (int j = 0; j < fantasies; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
      const Eigen::VectorXd draw = mean + root * z;
      best_[static_cast<std::size_t>(j)] = draw.minCoeff();
      weights_.col(j) = noiseless_.llt.solve((draw.array() - h.prior_mean).matrix());
    }
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Hyperparams& h = model_->hyperparams();
    const Eigen::VectorXd k = model_->cross_covariance(x);
    const Eigen::VectorXd v = noiseless_.llt.matrixL().solve(k);
    const double var = std::max(h.signal_variance - v.squaredNorm(), 0.0);
    const Eigen::VectorXd means = (weights_.transpose() * k).array() + h.prior_mean;
    double total = 0.0;
    for (Eigen::Index j = 0; j < means.size(); ++j) {
      total += expected_improvement(means[j], var, best_[static_cast<std::size_t>(j)]);
    }
    return total / static_cast<double>(means.size());
  }

 private:
  const FittedGP* model_;
  Factorization noiseless_;
  Eigen::MatrixXd weights_;  // one column per fantasy
  std::vector<double> best_;
};

// ---------------------------------------------------------------------------
// Box-constrained maximization
// ---------------------------------------------------------------------------

struct AcquisitionSearch {
  int candidates = 2048;
  int restarts = 16;
  int max_sweeps = 40;
  double step_tolerance = 1e-5;  // relative to the box width
  /// Share of candidates drawn as Gaussian perturbations of the anchors.
  double local_fraction = 0.25;
  double local_sigma = 0.1;  // relative to the box width
};

struct AcquisitionOptimum {
  Eigen::VectorXd x;
  double value = 0.0;
  double best_candidate_value = 0.0;  // before local refinement
};

namespace detail {

inline double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base);
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

inline std::vector<std::uint64_t> first_primes(std::size_t count) {
  std::vector<std::uint64_t> primes;
  for (std::uint64_t c = 2; primes.size() < count; ++c) {
    bool is_prime = true;
    for (std::uint64_t p : primes) {
      if (p * p > c) break;
      if (c % p == 0) {
        is_prime = false;
        break;
      }
    }
    if (is_prime) primes.push_back(c);
  }
  return primes;
}

}  // namespace detail

/// Halton points in [0,1)^dim with a random Cranley-Patterson rotation.
inline Eigen::MatrixXd shifted_halton(Eigen::Index count, Eigen::Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd shift(dim);
  for (Eigen::Index d = 0; d < dim; ++d) shift[d] = unit(rng);
  const std::vector<std::uint64_t> bases = detail::first_primes(static_cast<std::size_t>(dim));
  Eigen::MatrixXd pts(count, dim);
  for (Eigen::Index i = 0; i < count; ++i) {
    for (Eigen::Index d = 0; d < dim; ++d) {
      const double v = detail::radical_inverse(static_cast<std::uint64_t>(i + 1), bases[static_cast<std::size_t>(d)]) + shift[d];
      pts(i, d) = v - std::floor(v);
    }
  }
  return pts;
}

/// Maximizes `acq` over the box [lo, hi]: a quasi-random candidate sweep
/// (plus perturbations of the anchor points) followed by box-projected
/// coordinate ascent from the best candidates. The result lies strictly
/// inside the box.
template <typename Acq>
AcquisitionOptimum maximize_acquisition(const Acq& acq, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                        const AcquisitionSearch& opt, std::mt19937_64& rng,
                                        const std::vector<Eigen::VectorXd>& anchors = {}) {
  const Eigen::Index dim = lo.size();
  if (hi.size() != dim) throw ValidationError("acquisition: bound dimensions differ");
  const Eigen::VectorXd width = hi - lo;
  const Eigen::VectorXd inner_lo = lo + 1e-9 * width;
  const Eigen::VectorXd inner_hi = hi - 1e-9 * width;
  auto clamp = [&](Eigen::VectorXd x) {
    for (Eigen::Index d = 0; d < dim; ++d) x[d] = std::clamp(x[d], inner_lo[d], inner_hi[d]);
    return x;
  };

  const int total = std::max(opt.candidates, 1);
  const int local = anchors.empty() ? 0 : static_cast<int>(opt.local_fraction * total);
  const Eigen::MatrixXd unit = shifted_halton(total - local, dim, rng);
  std::vector<Eigen::VectorXd> cands;
  cands.reserve(static_cast<std::size_t>(total));
  for (Eigen::Index i = 0; i < unit.rows(); ++i) {
    cands.push_back(clamp(lo + unit.row(i).transpose().cwiseProduct(width)));
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int i = 0; i < local; ++i) {
    const Eigen::VectorXd& a = anchors[static_cast<std::size_t>(i) % anchors.size()];
    Eigen::VectorXd x(dim);
    for (Eigen::Index d = 0; d < dim; ++d) x[d] = a[d] + opt.local_sigma * width[d] * normal(rng);
    cands.push_back(clamp(x));
  }

  std::vector<double> values(cands.size());
  for (std::size_t i = 0; i < cands.size(); ++i) values[i] = acq(cands[i]);
  std::vector<std::size_t> order(cands.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(std::max(opt.restarts, 1)), order.size());
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });

  AcquisitionOptimum best{cands[order[0]], values[order[0]], values[order[0]]};
  for (std::size_t r = 0; r < keep; ++r) {
    Eigen::VectorXd x = cands[order[r]];
    double fx = values[order[r]];
    Eigen::VectorXd step = 0.05 * width;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
      for (Eigen::Index d = 0; d < dim; ++d) {
        if (step[d] < opt.step_tolerance * width[d]) continue;
        bool improved = false;
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd y = x;
          y[d] = std::clamp(x[d] + sign * step[d], inner_lo[d], inner_hi[d]);
          if (y[d] == x[d]) continue;
          const double fy = acq(y);
          if (fy > fx) {
            x = std::move(y);
            fx = fy;
            improved = true;
            break;
          }
        }
        step[d] = improved ? std::min(2.0 * step[d], 0.5 * width[d]) : 0.5 * step[d];
      }
      if ((step.array() < opt.step_tolerance * width.array()).all()) break;
    }
    if (fx > best.value) {
      best.x = x;
      best.value = fx;
    }
  }
  return best;
}

}  // namespace raceline

#endif  // RACELINE_ACQUISITION_HPP
