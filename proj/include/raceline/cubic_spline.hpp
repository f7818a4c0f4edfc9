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

#ifndef RACELINE_CUBIC_SPLINE_HPP
#define RACELINE_CUBIC_SPLINE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "raceline/errors.hpp"

namespace raceline {

using Vec2 = Eigen::Vector2d;

enum class SplineEnd { kNatural, kPeriodic };

namespace detail {

// Thomas algorithm; sub[0] and sup[n-1] are ignored.
inline std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                             std::vector<double> sup, std::vector<double> rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
  return x;
}

// Cyclic tridiagonal system via Sherman-Morrison: corner entries are
// sub[0] (row 0, column n-1) and sup[n-1] (row n-1, column 0).
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& sub,
                                                    const std::vector<double>& diag,
                                                    const std::vector<double>& sup,
                                                    const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  const double alpha = sup[n - 1];
  const double beta = sub[0];
  const double gamma = -diag[0];
  std::vector<double> d = diag;
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  const std::vector<double> x = solve_tridiagonal(sub, d, sup, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const std::vector<double> z = solve_tridiagonal(sub, d, sup, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

}  // namespace detail

/// Interpolating C2 cubic spline in one variable.
///
/// For periodic splines the last knot closes the period and its value must
/// equal the first one; evaluation wraps the parameter into the period.
class CubicSpline {
 public:
  CubicSpline() = default;

  CubicSpline(std::span<const double> knots, std::span<const double> values, SplineEnd end)
      : knots_(knots.begin(), knots.end()), values_(values.begin(), values.end()), end_(end) {
    const std::size_t n = knots_.size();
    if (n != values_.size()) throw ValidationError("spline: knots and values differ in length");
    if (n < 3) throw ValidationError("spline: need at least 3 knots");
    for (std::size_t i = 1; i < n; ++i) {
      if (!(knots_[i] > knots_[i - 1])) throw ValidationError("spline: knots must be strictly increasing");
    }
    if (end_ == SplineEnd::kPeriodic) {
      values_.back() = values_.front();
      solve_periodic();
    } else {
      solve_natural();
    }
  }

  double front() const { return knots_.front(); }
  double back() const { return knots_.back(); }
  SplineEnd end() const { return end_; }
  std::span<const double> knots() const { return knots_; }

  double operator()(double t) const { return eval<0>(t); }
  double derivative(double t) const { return eval<1>(t); }
  double second_derivative(double t) const { return eval<2>(t); }

 private:
  void solve_natural() {
    const std::size_t n = knots_.size();
    const std::size_t m = n - 2;  // interior knots
    std::vector<double> sub(m), diag(m), sup(m), rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const double h0 = knots_[i] - knots_[i - 1];
      const double h1 = knots_[i + 1] - knots_[i];
      sub[k] = h0 / 6.0;
      diag[k] = (h0 + h1) / 3.0;
      sup[k] = h1 / 6.0;
      rhs[k] = (values_[i + 1] - values_[i]) / h1 - (values_[i] - values_[i - 1]) / h0;
    }
    const std::vector<double> inner = detail::solve_tridiagonal(sub, diag, sup, rhs);
    curv_.assign(n, 0.0);
    std::copy(inner.begin(), inner.end(), curv_.begin() + 1);
  }

  void solve_periodic() {
    const std::size_t m = knots_.size() - 1;  // distinct knots
    std::vector<double> sub(m), diag(m), sup(m), rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t prev = (i + m - 1) % m;
      const double h0 = knots_[prev + 1] - knots_[prev];
      const double h1 = knots_[i + 1] - knots_[i];
      const double y_prev = values_[prev];
      sub[i] = h0 / 6.0;
      diag[i] = (h0 + h1) / 3.0;
      sup[i] = h1 / 6.0;
      rhs[i] = (values_[i + 1] - values_[i]) / h1 - (values_[i] - y_prev) / h0;
    }
    std::vector<double> sol = m >= 3 ? detail::solve_cyclic_tridiagonal(sub, diag, sup, rhs)
                                     : std::vector<double>(m, 0.0);
    curv_ = std::move(sol);
    curv_.push_back(curv_.front());
  }

  double wrap(double t) const {
    if (end_ != SplineEnd::kPeriodic) return t;
    const double period = knots_.back() - knots_.front();
    double u = std::fmod(t - knots_.front(), period);
    if (u < 0.0) u += period;
    return knots_.front() + u;
  }

  template <int Order>
  double eval(double t) const {
    t = wrap(t);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    i = std::min(i, knots_.size() - 2);
    const double h = knots_[i + 1] - knots_[i];
    const double a = (knots_[i + 1] - t) / h;
    const double b = (t - knots_[i]) / h;
    if constexpr (Order == 0) {
      return a * values_[i] + b * values_[i + 1] +
             ((a * a * a - a) * curv_[i] + (b * b * b - b) * curv_[i + 1]) * h * h / 6.0;
    } else if constexpr (Order == 1) {
      return (values_[i + 1] - values_[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * curv_[i] +
             (3.0 * b * b - 1.0) / 6.0 * h * curv_[i + 1];
    } else {
      return a * curv_[i] + b * curv_[i + 1];
    }
  }

  std::vector<double> knots_;
  std::vector<double> values_;
  std::vector<double> curv_;  // second derivatives at the knots
  SplineEnd end_ = SplineEnd::kNatural;
};

/// Planar cubic spline through a sequence of points, parameterized by
/// cumulative chord length. A closed spline passes through the first point
/// again at parameter `length()`.
class CubicSpline2D {
 public:
  CubicSpline2D() = default;

  CubicSpline2D(std::span<const Vec2> points, bool closed) : closed_(closed) {
    const std::size_t n = points.size();
    if (n < (closed ? 3u : 2u)) throw ValidationError("spline: too few points");
    std::vector<double> t{0.0}, xs{points[0].x()}, ys{points[0].y()};
    const std::size_t segments = closed ? n : n - 1;
    for (std::size_t i = 0; i < segments; ++i) {
      const Vec2& p = points[(i + 1) % n];
      const double chord = (p - points[i]).norm();
      if (!(chord > 0.0)) throw ValidationError("spline: duplicate adjacent points at index " + std::to_string(i));
      t.push_back(t.back() + chord);
      xs.push_back(p.x());
      ys.push_back(p.y());
    }
    if (!closed && n == 2) {
      // Two points: insert the midpoint so the natural spline is the segment.
      const Vec2 mid = 0.5 * (points[0] + points[1]);
      t.insert(t.begin() + 1, 0.5 * t[1]);
      xs.insert(xs.begin() + 1, mid.x());
      ys.insert(ys.begin() + 1, mid.y());
    }
    const SplineEnd end = closed ? SplineEnd::kPeriodic : SplineEnd::kNatural;
    x_ = CubicSpline(t, xs, end);
    y_ = CubicSpline(t, ys, end);
  }

  bool closed() const { return closed_; }
  /// Parameter range is [0, length()].
  double length() const { return x_.back(); }
  std::span<const double> knots() const { return x_.knots(); }

  Vec2 position(double t) const { return {x_(t), y_(t)}; }
  Vec2 first_derivative(double t) const { return {x_.derivative(t), y_.derivative(t)}; }
  Vec2 second_derivative(double t) const { return {x_.second_derivative(t), y_.second_derivative(t)}; }

  /// Signed curvature, positive for left turns.
  double curvature(double t) const {
    const Vec2 d1 = first_derivative(t);
    const Vec2 d2 = second_derivative(t);
    const double speed_sq = d1.squaredNorm();
    return (d1.x() * d2.y() - d1.y() * d2.x()) / (speed_sq * std::sqrt(speed_sq));
  }

  double heading(double t) const {
    const Vec2 d1 = first_derivative(t);
    return std::atan2(d1.y(), d1.x());
  }

  /// Arc length between parameters a <= b by composite 5-point Gauss-Legendre.
  double arc_length(double a, double b, int panels = 4) const {
    static constexpr std::array<double, 5> kNodes{0.0, -0.5384693101056831, 0.5384693101056831,
                                                  -0.9061798459386640, 0.9061798459386640};
    static constexpr std::array<double, 5> kWeights{0.5688888888888889, 0.4786286704993665,
                                                    0.4786286704993665, 0.2369268850561891,
                                                    0.2369268850561891};
    double total = 0.0;
    const double step = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
      const double lo = a + p * step;
      const double mid = lo + 0.5 * step;
      for (std::size_t q = 0; q < kNodes.size(); ++q) {
        total += kWeights[q] * 0.5 * step * first_derivative(mid + 0.5 * step * kNodes[q]).norm();
      }
    }
    return total;
  }

 private:
  CubicSpline x_;
  CubicSpline y_;
  bool closed_ = false;
};

}  // namespace raceline

#endif  // RACELINE_CUBIC_SPLINE_HPP
