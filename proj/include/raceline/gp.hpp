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

#ifndef RACELINE_GP_HPP
#define RACELINE_GP_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "raceline/box_minimizer.hpp"
#include "raceline/errors.hpp"
#include "raceline/logging.hpp"

namespace raceline {

// Gaussian-process regression with a squared-exponential ARD kernel and a
// constant prior mean. The latent function f has prior covariance
//   k(a, b) = s^2 exp(-1/2 sum_d ((a_d - b_d) / l_d)^2),
// observations add independent noise sigma_n^2 on the training diagonal.

struct Hyperparams {
  Eigen::VectorXd lengthscales;  // one per input dimension, or a single isotropic value
  double signal_variance = 1.0;
  double noise_variance = 0.0;
  double prior_mean = 0.0;

  double lengthscale(Eigen::Index d) const { return lengthscales.size() == 1 ? lengthscales[0] : lengthscales[d]; }

  void validate(Eigen::Index dim) const {
    if (lengthscales.size() != 1 && lengthscales.size() != dim) {
      throw ValidationError("gp: expected 1 or " + std::to_string(dim) + " lengthscales, got " + std::to_string(lengthscales.size()));
    }
    if (!(lengthscales.array() > 0.0).all()) throw ValidationError("gp: lengthscales must be positive");
    if (!(signal_variance > 0.0)) throw ValidationError("gp: signal variance must be positive");
    if (!(noise_variance >= 0.0)) throw ValidationError("gp: noise variance must be nonnegative");
  }
};

/// Training data: one input per row.
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd outputs;

  Eigen::Index size() const { return inputs.rows(); }
  Eigen::Index dimension() const { return inputs.cols(); }

  void add(const Eigen::Ref<const Eigen::VectorXd>& x, double y) {
    if (size() > 0 && x.size() != dimension()) throw ValidationError("dataset: input dimension mismatch");
    inputs.conservativeResize(size() + 1, x.size());
    inputs.row(inputs.rows() - 1) = x.transpose();
    outputs.conservativeResize(outputs.size() + 1);
    outputs[outputs.size() - 1] = y;
  }

  void validate() const {
    if (size() < 1) throw ValidationError("dataset: needs at least one observation");
    if (outputs.size() != size()) throw ValidationError("dataset: inputs and outputs differ in length");
    if (!inputs.allFinite()) throw ValidationError("dataset: non-finite input");
    if (!outputs.allFinite()) throw ValidationError("dataset: non-finite output");
  }
};

/// Diagonal regularization floor relative to the signal variance, and the
/// largest value the escalation may reach on factorization failure.
inline constexpr double kJitterFloor = 1e-12;
inline constexpr double kJitterCeiling = 1e-4;

namespace detail {

inline double scaled_sq_dist(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                             const Hyperparams& h) {
  double r2 = 0.0;
  for (Eigen::Index d = 0; d < a.size(); ++d) {
    const double z = (a[d] - b[d]) / h.lengthscale(d);
    r2 += z * z;
  }
  return r2;
}

}  // namespace detail

/// Latent covariance between two (distinct) inputs.
inline double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                          const Hyperparams& h) {
  if (a.size() != b.size()) throw ValidationError("kernel: input dimensions differ");
  if (h.lengthscales.size() != 1 && h.lengthscales.size() != a.size()) {
    throw ValidationError("kernel: lengthscale count does not match input dimension");
  }
  return h.signal_variance * std::exp(-0.5 * detail::scaled_sq_dist(a, b, h));
}

/// Observation covariance: adds the noise variance when both arguments are
/// the same training point.
inline double covariance(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                         const Hyperparams& h, bool same_training_point) {
  return kernel_eval(a, b, h) + (same_training_point ? h.noise_variance : 0.0);
}

/// Latent Gram matrix between the rows of `a` and `b`.
inline Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Hyperparams& h) {
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = h.signal_variance * std::exp(-0.5 * detail::scaled_sq_dist(a.row(i).transpose(), b.row(j).transpose(), h));
    }
  }
  return k;
}

inline Eigen::MatrixXd gram(const Eigen::MatrixXd& x, const Hyperparams& h) {
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = h.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      k(i, j) = k(j, i) = h.signal_variance * std::exp(-0.5 * detail::scaled_sq_dist(x.row(i).transpose(), x.row(j).transpose(), h));
    }
  }
  return k;
}

struct Factorization {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double diagonal = 0.0;  // total value added to the latent Gram diagonal
};

/// Cholesky of gram + max(noise, floor) I, escalating the diagonal by 10x
/// on failure up to kJitterCeiling * signal variance.
inline Factorization factorize(const Eigen::MatrixXd& latent_gram, double noise, double signal_variance) {
  const double floor = kJitterFloor * signal_variance;
  double diag = std::max(noise, floor);
  double extra = 0.0;
  const Eigen::Index n = latent_gram.rows();
  while (true) {
    Factorization f;
    f.diagonal = diag + extra;
    Eigen::MatrixXd k = latent_gram;
    k.diagonal().array() += f.diagonal;
    f.llt.compute(k);
    if (f.llt.info() == Eigen::Success && (f.llt.matrixLLT().diagonal().array() > 0.0).all()) return f;
    extra = extra == 0.0 ? floor * 10.0 : extra * 10.0;
    if (extra > kJitterCeiling * signal_variance * (1.0 + 1e-9)) {
      const double max_diag = latent_gram.diagonal().maxCoeff();
      throw NumericalError("gp: Gram matrix (" + std::to_string(n) + "x" + std::to_string(n) + ", diagonal " +
                           std::to_string(max_diag) + ") not positive definite after jitter " +
                           std::to_string(kJitterCeiling * signal_variance));
    }
  }
}

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;  // latent function variance, observation noise excluded
};

/// Gaussian-process posterior conditioned on a dataset with fixed hyperparameters.
/// Immutable; prediction is safe to call concurrently.
class FittedGP {
 public:
  FittedGP(Dataset data, Hyperparams h, double output_scale = 1.0)
      : data_(std::move(data)), hyper_(std::move(h)), output_scale_(output_scale) {
    data_.validate();
    hyper_.validate(data_.dimension());
    const Eigen::MatrixXd k = gram(data_.inputs, hyper_);
    factor_ = factorize(k, hyper_.noise_variance, hyper_.signal_variance);
    const Eigen::VectorXd centered = data_.outputs.array() - hyper_.prior_mean;
    weights_ = factor_.llt.solve(centered);
    const auto& l = factor_.llt.matrixLLT();
    const double log_det = 2.0 * l.diagonal().array().log().sum();
    lml_ = -0.5 * centered.dot(weights_) - 0.5 * log_det -
           0.5 * static_cast<double>(data_.size()) * std::log(2.0 * std::numbers::pi);
  }

  const Dataset& dataset() const { return data_; }
  const Hyperparams& hyperparams() const { return hyper_; }
  /// Output standard deviation used when fitting; acquisition values divided
  /// by it are in standardized units.
  double output_scale() const { return output_scale_; }
  const Eigen::LLT<Eigen::MatrixXd>& factor() const { return factor_.llt; }
  /// Value added to the latent Gram diagonal (noise plus any jitter).
  double diagonal_regularization() const { return factor_.diagonal; }
  /// K^{-1} (Y - mu).
  const Eigen::VectorXd& weights() const { return weights_; }
  double log_marginal_likelihood() const { return lml_; }
  Eigen::Index dimension() const { return data_.dimension(); }

  Eigen::VectorXd cross_covariance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    check_dim(x.size());
    Eigen::VectorXd k(data_.size());
    for (Eigen::Index i = 0; i < data_.size(); ++i) {
      k[i] = hyper_.signal_variance * std::exp(-0.5 * detail::scaled_sq_dist(x, data_.inputs.row(i).transpose(), hyper_));
    }
    return k;
  }

  Prediction predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    const Eigen::VectorXd k = cross_covariance(x);
    Prediction p;
    p.mean = hyper_.prior_mean + k.dot(weights_);
    const Eigen::VectorXd v = factor_.llt.matrixL().solve(k);
    double var = hyper_.signal_variance - v.squaredNorm();
    if (var < 0.0) {
      if (var < -1e-8 * hyper_.signal_variance) {
        log_warning("gp: clamped predictive variance " + std::to_string(var) + " to zero");
      }
      var = 0.0;
    }
    p.variance = var;
    return p;
  }

  /// Joint latent posterior covariance at the rows of `xq`.
  Eigen::MatrixXd posterior_covariance(const Eigen::MatrixXd& xq) const {
    check_dim(xq.cols());
    const Eigen::MatrixXd kxq = cross_gram(data_.inputs, xq, hyper_);
    const Eigen::MatrixXd v = factor_.llt.matrixL().solve(kxq);
    Eigen::MatrixXd cov = gram(xq, hyper_) - v.transpose() * v;
    return 0.5 * (cov + cov.transpose());
  }

  Eigen::VectorXd posterior_mean(const Eigen::MatrixXd& xq) const {
    check_dim(xq.cols());
    return (cross_gram(xq, data_.inputs, hyper_) * weights_).array() + hyper_.prior_mean;
  }

 private:
  void check_dim(Eigen::Index d) const {
    if (d != data_.dimension()) {
      throw ValidationError("gp: query has dimension " + std::to_string(d) + ", model has " + std::to_string(data_.dimension()));
    }
  }

  Dataset data_;
  Hyperparams hyper_;
  double output_scale_ = 1.0;
  Factorization factor_;
  Eigen::VectorXd weights_;
  double lml_ = 0.0;
};

// ---------------------------------------------------------------------------
// Marginal likelihood and hyperparameter fitting
// ---------------------------------------------------------------------------

/// Log-space hyperparameter vector: [log l_1..log l_m, log s^2, log sigma_n^2].
inline Eigen::VectorXd pack_log(const Hyperparams& h) {
  const Eigen::Index m = h.lengthscales.size();
  Eigen::VectorXd theta(m + 2);
  theta.head(m) = h.lengthscales.array().log();
  theta[m] = std::log(h.signal_variance);
  theta[m + 1] = std::log(h.noise_variance);
  return theta;
}

inline Hyperparams unpack_log(const Eigen::VectorXd& theta, double prior_mean) {
  const Eigen::Index m = theta.size() - 2;
  Hyperparams h;
  h.lengthscales = theta.head(m).array().exp();
  h.signal_variance = std::exp(theta[m]);
  h.noise_variance = std::exp(theta[m + 1]);
  h.prior_mean = prior_mean;
  return h;
}

struct LikelihoodValue {
  double value = 0.0;
  Eigen::VectorXd gradient;  // with respect to pack_log(h)
};

/// Log marginal likelihood log p(Y | X, h) and its analytic gradient in log
/// hyperparameters.
inline LikelihoodValue log_marginal_likelihood(const Dataset& data, const Hyperparams& h) {
  const Eigen::Index n = data.size();
  const Eigen::Index dim = data.dimension();
  const Eigen::Index m = h.lengthscales.size();
  const Eigen::MatrixXd k = gram(data.inputs, h);
  const Factorization f = factorize(k, h.noise_variance, h.signal_variance);
  const Eigen::VectorXd centered = data.outputs.array() - h.prior_mean;
  const Eigen::VectorXd alpha = f.llt.solve(centered);
  const double log_det = 2.0 * f.llt.matrixLLT().diagonal().array().log().sum();

  LikelihoodValue out;
  out.value = -0.5 * centered.dot(alpha) - 0.5 * log_det - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

  // d/dtheta = 1/2 tr((alpha alpha^T - K^{-1}) dK/dtheta)
  const Eigen::MatrixXd w = alpha * alpha.transpose() - f.llt.solve(Eigen::MatrixXd::Identity(n, n));
  out.gradient = Eigen::VectorXd::Zero(m + 2);
  const Eigen::MatrixXd wk = w.cwiseProduct(k);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double c = wk(i, j);
      if (c == 0.0) continue;
      for (Eigen::Index d = 0; d < dim; ++d) {
        const double l = h.lengthscale(d);
        const double diff = data.inputs(i, d) - data.inputs(j, d);
        out.gradient[m == 1 ? 0 : d] += 0.5 * c * diff * diff / (l * l);
      }
    }
  }
  out.gradient[m] = 0.5 * wk.sum();
  out.gradient[m + 1] = 0.5 * h.noise_variance * w.trace();
  return out;
}

struct FitOptions {
  int restarts = 8;
  bool ard = true;
  // Bounds in standardized output units and normalized input units.
  double min_lengthscale = 0.05;
  double max_lengthscale = 10.0;
  double min_signal_variance = 0.01;
  double max_signal_variance = 100.0;
  double min_noise_variance = 1e-10;
  double max_noise_variance = 0.1;
  BoxMinimizerOptions minimizer{};
  /// Extra starting point in standardized units, e.g. the previous fit.
  std::optional<Hyperparams> warm_start;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;
};

struct FitReport {
  Hyperparams standardized;       // optimum in standardized output units
  double log_likelihood = 0.0;    // at the optimum, standardized units
  Eigen::VectorXd gradient;       // log-space gradient at the optimum
  double projected_gradient_norm = 0.0;
  std::vector<double> start_log_likelihoods;
  double output_mean = 0.0;
  double output_scale = 1.0;
};

/// Standardizes the outputs to zero mean and unit variance. A constant
/// output vector keeps unit scale.
inline std::pair<double, double> output_standardization(const Eigen::VectorXd& y) {
  const double mean = y.mean();
  const double var = (y.array() - mean).square().mean();
  const double scale = std::sqrt(var);
  return {mean, scale > 1e-12 * std::max(1.0, std::abs(mean)) ? scale : 1.0};
}

/// Maximizes the log marginal likelihood over lengthscales, signal variance
/// and noise variance with multi-start projected L-BFGS in log space, then
/// conditions the posterior on the data. With a single observation the
/// default hyperparameters are used.
inline FittedGP fit(const Dataset& data, const FitOptions& opt = {}, FitReport* report = nullptr) {
  data.validate();
  const Eigen::Index dim = data.dimension();
  const auto [mean, scale] = output_standardization(data.outputs);
  Dataset std_data{data.inputs, (data.outputs.array() - mean) / scale};

  const Eigen::Index m = opt.ard ? dim : 1;
  Eigen::VectorXd lo(m + 2), hi(m + 2);
  lo.head(m).setConstant(std::log(opt.min_lengthscale));
  hi.head(m).setConstant(std::log(opt.max_lengthscale));
  lo[m] = std::log(opt.min_signal_variance);
  hi[m] = std::log(opt.max_signal_variance);
  lo[m + 1] = std::log(opt.min_noise_variance);
  hi[m + 1] = std::log(opt.max_noise_variance);

  Hyperparams best;
  best.lengthscales = Eigen::VectorXd::Ones(m);
  best.signal_variance = 1.0;
  best.noise_variance = opt.min_noise_variance;
  best.prior_mean = 0.0;
  FitReport rep;

  if (data.size() >= 2) {
    std::vector<Eigen::VectorXd> starts;
    Eigen::VectorXd s0(m + 2);
    s0.head(m).setZero();
    s0[m] = 0.0;
    s0[m + 1] = std::log(1e-4);
    starts.push_back(s0);
    if (opt.warm_start && opt.warm_start->lengthscales.size() == m) {
      Eigen::VectorXd w = pack_log(*opt.warm_start);
      for (Eigen::Index i = 0; i < w.size(); ++i) w[i] = std::clamp(w[i], lo[i], hi[i]);
      starts.push_back(w);
    }
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(starts.size()) < std::max(opt.restarts, 1)) {
      Eigen::VectorXd s(m + 2);
      for (Eigen::Index i = 0; i < s.size(); ++i) s[i] = lo[i] + unit(rng) * (hi[i] - lo[i]);
      starts.push_back(s);
    }

    auto objective = [&](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
      try {
        const LikelihoodValue v = log_marginal_likelihood(std_data, unpack_log(theta, 0.0));
        grad = -v.gradient;
        return -v.value;
      } catch (const NumericalError&) {
        grad.setZero(theta.size());
        return std::numeric_limits<double>::infinity();
      }
    };

    double best_value = std::numeric_limits<double>::infinity();
    std::optional<BoxMinimizerResult> best_res;
    for (const Eigen::VectorXd& s : starts) {
      Eigen::VectorXd g(s.size());
      rep.start_log_likelihoods.push_back(-objective(s, g));
      BoxMinimizerResult r = minimize_box(objective, s, lo, hi, opt.minimizer);
      if (r.value < best_value) {
        best_value = r.value;
        best_res = std::move(r);
      }
    }
    if (!best_res) throw NumericalError("gp: likelihood could not be evaluated at any start");
    best = unpack_log(best_res->x, 0.0);
    rep.log_likelihood = -best_res->value;
    rep.gradient = -best_res->gradient;
    rep.projected_gradient_norm = best_res->projected_gradient_norm;
  } else {
    rep.log_likelihood = FittedGP(std_data, best).log_marginal_likelihood();
  }
  rep.standardized = best;
  rep.output_mean = mean;
  rep.output_scale = scale;
  if (report) *report = rep;

  Hyperparams original = best;
  original.signal_variance *= scale * scale;
  original.noise_variance *= scale * scale;
  original.prior_mean = mean;
  return FittedGP(data, original, scale);
}

}  // namespace raceline

#endif  // RACELINE_GP_HPP
