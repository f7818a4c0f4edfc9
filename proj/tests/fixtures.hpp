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

// Synthetic center lines and paths shared by the test suites.

#ifndef RACELINE_TESTS_FIXTURES_HPP
#define RACELINE_TESTS_FIXTURES_HPP

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "raceline/track.hpp"

namespace raceline::testing {

inline std::string data_path(const std::string& rel) { return std::string(RACELINE_DATA_DIR) + "/" + rel; }

/// Counter-clockwise circle sampled at `n` points, first point at angle 0.
inline std::vector<Vec2> circle_points(double radius, int n, Vec2 center = Vec2::Zero()) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    pts.push_back(center + radius * Vec2(std::cos(a), std::sin(a)));
  }
  return pts;
}

inline CenterLine circle_track(double radius, int n, double width) {
  return CenterLine(circle_points(radius, n), {width}, true);
}

inline CenterLine straight_track(double length, int n, double width) {
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(length * i / (n - 1), 0.0);
  return CenterLine(pts, {width}, false);
}

/// Straight of `leg` meters along +x, a 90 degree left corner, then `leg` meters along +y.
inline CenterLine l_track(double leg, double spacing, double width) {
  std::vector<Vec2> pts;
  const int n = static_cast<int>(std::round(leg / spacing));
  for (int i = 0; i <= n; ++i) pts.emplace_back(spacing * i, 0.0);
  for (int i = 1; i <= n; ++i) pts.emplace_back(leg, spacing * i);
  return CenterLine(pts, {width}, false);
}

/// Stadium-shaped closed track: two straights joined by half circles.
inline CenterLine oval_track(double straight, double radius, double width, double spacing = 0.5) {
  std::vector<Vec2> pts;
  const int ns = static_cast<int>(std::round(straight / spacing));
  const int na = static_cast<int>(std::round(std::numbers::pi * radius / spacing));
  for (int i = 0; i < ns; ++i) pts.emplace_back(-0.5 * straight + straight * i / ns, -radius);
  for (int i = 0; i < na; ++i) {
    const double a = -0.5 * std::numbers::pi + std::numbers::pi * i / na;
    pts.emplace_back(0.5 * straight + radius * std::cos(a), radius * std::sin(a));
  }
  for (int i = 0; i < ns; ++i) pts.emplace_back(0.5 * straight - straight * i / ns, radius);
  for (int i = 0; i < na; ++i) {
    const double a = 0.5 * std::numbers::pi + std::numbers::pi * i / na;
    pts.emplace_back(-0.5 * straight + radius * std::cos(a), radius * std::sin(a));
  }
  return CenterLine(pts, {width}, true);
}

/// Open path through `n` waypoints advancing along x with random lateral wiggle.
inline std::vector<Vec2> wiggly_waypoints(int n, double spacing, double amplitude, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<Vec2> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(spacing * i, u(rng));
  return pts;
}

}  // namespace raceline::testing

#endif  // RACELINE_TESTS_FIXTURES_HPP
