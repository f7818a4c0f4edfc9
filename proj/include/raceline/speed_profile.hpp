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

#ifndef RACELINE_SPEED_PROFILE_HPP
#define RACELINE_SPEED_PROFILE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "raceline/errors.hpp"
#include "raceline/track.hpp"

namespace raceline {

/// Friction-circle vehicle with a rear-wheel-drive propulsion cap.
struct VehicleParams {
  double mass = 1.0;        // kg
  double l_front = 0.5;     // CG to front axle, m
  double l_rear = 0.5;      // CG to rear axle, m
  double mu_s = 1.0;        // static friction coefficient
  double gravity = 9.81;    // m/s^2
  double v_cap = 50.0;      // speed cap where the path is (nearly) straight, m/s

  /// Fraction of the friction limit available for propulsion.
  double drive_fraction() const { return l_front / (l_front + l_rear); }
  /// Friction-limited acceleration mu_s * g.
  double grip() const { return mu_s * gravity; }

  void validate() const {
    auto fail = [](const std::string& what) { throw ValidationError("vehicle: " + what); };
    if (!(mass > 0.0)) fail("mass must be positive");
    if (!(l_front > 0.0)) fail("l_f must be positive");
    if (!(l_rear > 0.0)) fail("l_r must be positive");
    if (!(mu_s > 0.0 && mu_s <= 2.0)) fail("mu_s must be in (0, 2]");
    if (!(gravity > 0.0)) fail("g must be positive");
    if (!(v_cap > 0.0)) fail("v_cap must be positive");
  }
};

/// Time-optimal speed profile on a fixed path.
///
/// One entry per station. A closed path carries one extra station at the end
/// that coincides with station 0 (the finish line), so `lap_time == times.back()`.
struct SpeedProfile {
  std::vector<double> arc_positions;  // s_k, m
  std::vector<Vec2> points;
  std::vector<double> speeds;         // m/s
  std::vector<double> times;          // cumulative, s
  std::vector<double> long_force;     // N
  std::vector<double> lat_force;      // N
  std::vector<double> long_accel;     // m/s^2
  std::vector<double> lat_accel;      // m/s^2
  double lap_time = 0.0;
  double mass = 1.0;
  double grip = 9.81;

  std::size_t size() const { return speeds.size(); }
};

/// Steady-state cornering limit sqrt(mu_s g / |kappa|), capped at v_cap.
inline double max_cornering_speed(double kappa, const VehicleParams& params) {
  const double k = std::abs(kappa);
  const double kappa_min = params.grip() / (params.v_cap * params.v_cap);
  if (k < kappa_min) return params.v_cap;
  return std::sqrt(params.grip() / k);
}

namespace detail {

/// Per-station data of the discretized speed problem. The problem is posed
/// on squared speed u = v^2, which is piecewise linear in arc length under
/// constant longitudinal acceleration.
struct Stations {
  std::vector<double> curvature;  // size S+1
  std::vector<double> ds;         // size S
};

inline Stations stations_of(const SampledPath& path) {
  Stations st;
  st.curvature = path.curvature;
  st.ds = path.segment_lengths;
  if (path.closed) st.curvature.push_back(path.curvature.front());
  return st;
}

/// Largest x solving (x - u) / (2 ds) = sqrt(g^2 - (x kappa)^2), x >= u when
/// u kappa <= g. Shared by both passes: the friction circle is always applied
/// at the faster end of a segment.
inline double circle_limited_reach(double u, double kappa, double ds, double g) {
  const double c = 4.0 * ds * ds;
  const double a = 1.0 + c * kappa * kappa;
  const double disc = u * u - a * (u * u - c * g * g);
  return (u + std::sqrt(std::max(disc, 0.0))) / a;
}

/// Largest squared speed reachable at the end of a segment entered at u,
/// with the friction circle evaluated at the exit (curvature kappa_exit).
inline double accel_exit_limit(double u, double kappa_exit, double ds, const VehicleParams& p) {
  const double g = p.grip();
  const double drive = u + 2.0 * ds * p.drive_fraction() * g;
  const double lat = drive * std::abs(kappa_exit);
  if (lat < g && std::sqrt(g * g - lat * lat) >= p.drive_fraction() * g) return drive;
  return std::min(drive, circle_limited_reach(u, kappa_exit, ds, g));
}

/// Largest u_k from which the vehicle can brake to u_next over ds, with the
/// friction circle evaluated at station k:
///   (u_k - u_next) / (2 ds) <= sqrt(g^2 - (u_k kappa)^2).
inline double brake_entry_limit(double u_next, double kappa, double ds, const VehicleParams& p) {
  return circle_limited_reach(u_next, kappa, ds, p.grip());
}

/// Per-station longitudinal acceleration: each segment's constant
/// acceleration is attributed to its faster end, where its force budget was
/// checked. Stations that are the fast end of no segment get zero.
inline std::vector<double> station_accelerations(const std::vector<double>& u, const Stations& st) {
  const std::size_t n = u.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double a = (u[k + 1] - u[k]) / (2.0 * st.ds[k]);
    const std::size_t at = a > 0.0 ? k + 1 : k;
    if (a != 0.0 && std::abs(a) > std::abs(out[at])) out[at] = a;
  }
  return out;
}

}  // namespace detail

/// Forward pass: accelerate from u[0] under the drive cap and friction circle.
inline void forward_pass(std::vector<double>& u, const detail::Stations& st, const VehicleParams& p) {
  for (std::size_t k = 0; k + 1 < u.size(); ++k) {
    if (u[k + 1] > u[k]) u[k + 1] = std::min(u[k + 1], detail::accel_exit_limit(u[k], st.curvature[k + 1], st.ds[k], p));
  }
}

/// Backward pass: enforce that every station can brake down to the next one.
inline void backward_pass(std::vector<double>& u, const detail::Stations& st, const VehicleParams& p) {
  for (std::size_t k = u.size() - 1; k-- > 0;) {
    if (u[k] > u[k + 1]) u[k] = std::min(u[k], detail::brake_entry_limit(u[k + 1], st.curvature[k], st.ds[k], p));
  }
}

/// Minimum-time speed profile on a fixed path under the friction circle
/// sqrt(F_long^2 + F_lat^2) <= mu_s m g and the propulsion cap
/// F_long <= l_f / (l_f + l_r) mu_s m g. Braking is friction limited only.
///
/// Solved by three passes over squared speed: pointwise cornering caps, a
/// forward acceleration pass from `v0`, and a backward braking pass. Each
/// segment has constant longitudinal acceleration whose force budget is
/// checked against the lateral load at the segment's faster end; segment
/// time is ds over the mean of the end speeds, which is exact for constant
/// acceleration. Closed paths are driven once from the start to the finish
/// line; speeds do not wrap around.
inline SpeedProfile solve_speed_profile(const SampledPath& path, const VehicleParams& params, double v0 = 0.0) {
  params.validate();
  if (path.size() < 2) throw ValidationError("speed profile: path needs at least 2 points");
  if (!(v0 >= 0.0) || !std::isfinite(v0)) throw ValidationError("speed profile: initial speed must be >= 0");
  const detail::Stations st = detail::stations_of(path);
  const std::size_t n = st.curvature.size();

  std::vector<double> u(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(st.curvature[k])) throw DegeneratePathError("speed profile: non-finite curvature at station " + std::to_string(k));
    const double cap = max_cornering_speed(st.curvature[k], params);
    if (!(cap > 0.0)) throw DegeneratePathError("speed profile: zero cornering speed at station " + std::to_string(k));
    u[k] = cap * cap;
  }
  const double u0 = v0 * v0;
  if (u0 > u[0] * (1.0 + 1e-12)) {
    throw InfeasibleStartError("speed profile: initial speed " + std::to_string(v0) + " m/s exceeds the cornering limit " +
                               std::to_string(std::sqrt(u[0])) + " m/s at the start");
  }
  u[0] = u0;
  forward_pass(u, st, params);
  backward_pass(u, st, params);
  if (u[0] < u0 * (1.0 - 1e-9)) {
    throw InfeasibleStartError("speed profile: cannot brake from the initial speed " + std::to_string(v0) + " m/s in time");
  }
  u[0] = u0;

  constexpr double kSpeedFloor = 1e-3;
  SpeedProfile prof;
  prof.mass = params.mass;
  prof.grip = params.grip();
  prof.speeds.resize(n);
  prof.times.assign(n, 0.0);
  prof.arc_positions.assign(n, 0.0);
  prof.long_accel.assign(n, 0.0);
  prof.lat_accel.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    prof.speeds[k] = std::sqrt(std::max(u[k], 0.0));
    prof.points.push_back(path.points[k % path.size()]);
  }
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double mean = std::max(0.5 * (prof.speeds[k] + prof.speeds[k + 1]), kSpeedFloor);
    prof.times[k + 1] = prof.times[k] + st.ds[k] / mean;
    prof.arc_positions[k + 1] = prof.arc_positions[k] + st.ds[k];
  }
  prof.long_accel = detail::station_accelerations(u, st);
  for (std::size_t k = 0; k < n; ++k) {
    prof.lat_accel[k] = u[k] * st.curvature[k];
    prof.long_force.push_back(params.mass * prof.long_accel[k]);
    prof.lat_force.push_back(params.mass * prof.lat_accel[k]);
  }
  prof.lap_time = prof.times.back();
  return prof;
}

/// Default speed solver; any callable with this signature can stand in for it.
struct ForwardBackwardSolver {
  SpeedProfile operator()(const SampledPath& path, const VehicleParams& params, double v0) const {
    return solve_speed_profile(path, params, v0);
  }
};

struct GGPoint {
  double lat_accel;
  double long_accel;
};

inline std::vector<GGPoint> gg_points(const SpeedProfile& profile) {
  std::vector<GGPoint> out;
  out.reserve(profile.size());
  for (std::size_t k = 0; k < profile.size(); ++k) {
    out.push_back({profile.lat_force[k] / profile.mass, profile.long_force[k] / profile.mass});
  }
  return out;
}

}  // namespace raceline

#endif  // RACELINE_SPEED_PROFILE_HPP
