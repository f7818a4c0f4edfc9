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

#ifndef RACELINE_TRACK_HPP
#define RACELINE_TRACK_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "raceline/cubic_spline.hpp"
#include "raceline/errors.hpp"

namespace raceline {

// ---------------------------------------------------------------------------
// Center line
// ---------------------------------------------------------------------------

/// Ordered center-line waypoints with per-point track width.
///
/// A closed center line is periodic: the segment from the last point back to
/// the first one is part of the lap and counts toward `total_length`.
class CenterLine {
 public:
  CenterLine(std::vector<Vec2> points, std::vector<double> widths, bool closed)
      : points_(std::move(points)), widths_(std::move(widths)), closed_(closed) {
    if (widths_.size() == 1 && points_.size() > 1) widths_.assign(points_.size(), widths_.front());
    if (closed_ && points_.size() > 1 && (points_.front() - points_.back()).norm() <= 1e-12) {
      points_.pop_back();
      widths_.pop_back();
    }
    if (points_.size() < 4) throw ValidationError("center line needs at least 4 points, got " + std::to_string(points_.size()));
    if (widths_.size() != points_.size()) throw ValidationError("center line: width count does not match point count");
    for (std::size_t i = 0; i < widths_.size(); ++i) {
      if (!(widths_[i] > 0.0) || !std::isfinite(widths_[i])) {
        throw ValidationError("center line: width at point " + std::to_string(i) + " must be positive");
      }
    }
    arc_length_.reserve(points_.size());
    arc_length_.push_back(0.0);
    for (std::size_t i = 1; i < points_.size(); ++i) {
      const double seg = (points_[i] - points_[i - 1]).norm();
      if (!(seg > 0.0)) throw ValidationError("center line: points " + std::to_string(i - 1) + " and " + std::to_string(i) + " coincide");
      arc_length_.push_back(arc_length_.back() + seg);
    }
    total_length_ = arc_length_.back();
    if (closed_) {
      const double seg = (points_.front() - points_.back()).norm();
      total_length_ += seg;
    }
  }

  std::span<const Vec2> points() const { return points_; }
  std::span<const double> widths() const { return widths_; }
  std::span<const double> cumulative_arc_length() const { return arc_length_; }
  bool closed() const { return closed_; }
  std::size_t size() const { return points_.size(); }
  double total_length() const { return total_length_; }

  /// Track width at arc position `s`, linearly interpolated between points.
  double width_at(double s) const {
    if (closed_) {
      s = std::fmod(s, total_length_);
      if (s < 0.0) s += total_length_;
    } else {
      s = std::clamp(s, 0.0, total_length_);
    }
    const auto it = std::upper_bound(arc_length_.begin(), arc_length_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - arc_length_.begin()) - 1;
    const bool last = i + 1 == arc_length_.size();
    if (last && !closed_) return widths_.back();
    const double s1 = last ? total_length_ : arc_length_[i + 1];
    const double w1 = last ? widths_.front() : widths_[i + 1];
    const double f = (s - arc_length_[i]) / (s1 - arc_length_[i]);
    return (1.0 - f) * widths_[i] + f * w1;
  }

  /// Smooth interpolant of the center line; its parameter is the polyline arc length.
  CubicSpline2D spline() const { return CubicSpline2D(points_, closed_); }

 private:
  std::vector<Vec2> points_;
  std::vector<double> widths_;
  std::vector<double> arc_length_;
  bool closed_;
  double total_length_ = 0.0;
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_row(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_number(const std::string& cell, const std::string& source, std::size_t line) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(cell, &used);
  } catch (const std::exception&) {
    throw ParseError(source, line, "not a number: '" + cell + "'");
  }
  if (used != cell.size() || !std::isfinite(v)) throw ParseError(source, line, "not a number: '" + cell + "'");
  return v;
}

}  // namespace detail

/// Parses a track CSV: header row with `x_m`, `y_m` and either `width_m` or
/// `w_left_m`,`w_right_m`. Lines starting with `#` are comments.
///
/// Asymmetric widths are summed into the track width and the center point is
/// moved to the middle of the drivable strip.
inline CenterLine parse_track_csv(std::istream& in, bool closed, const std::string& source = "<track>") {
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::vector<std::string>> header;
  int ix = -1, iy = -1, iw = -1, il = -1, ir = -1;
  std::vector<Vec2> points;
  std::vector<double> widths, left, right;

  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto cells = detail::split_csv_row(line);
    if (!header) {
      header = cells;
      for (int c = 0; c < static_cast<int>(cells.size()); ++c) {
        const auto& name = cells[static_cast<std::size_t>(c)];
        if (name == "x_m") ix = c;
        else if (name == "y_m") iy = c;
        else if (name == "width_m") iw = c;
        else if (name == "w_left_m") il = c;
        else if (name == "w_right_m") ir = c;
      }
      if (ix < 0 || iy < 0) throw ParseError(source, line_no, "header must contain x_m and y_m");
      if (iw < 0 && (il < 0 || ir < 0)) {
        throw ParseError(source, line_no, "header must contain width_m or both w_left_m and w_right_m");
      }
      continue;
    }
    if (cells.size() != header->size()) {
      throw ParseError(source, line_no, "expected " + std::to_string(header->size()) + " columns, got " + std::to_string(cells.size()));
    }
    auto cell = [&](int c) { return detail::parse_number(cells[static_cast<std::size_t>(c)], source, line_no); };
    points.emplace_back(cell(ix), cell(iy));
    if (iw >= 0) {
      widths.push_back(cell(iw));
    } else {
      left.push_back(cell(il));
      right.push_back(cell(ir));
    }
  }
  if (!header) throw ParseError(source, 0, "missing header row");

  if (iw < 0) {
    // Left normal from the local polyline tangent.
    const std::size_t n = points.size();
    widths.resize(n);
    std::vector<Vec2> shifted(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t prev = i == 0 ? (closed ? n - 1 : 0) : i - 1;
      const std::size_t next = i + 1 == n ? (closed ? 0 : n - 1) : i + 1;
      Vec2 tangent = points[next] - points[prev];
      const double len = tangent.norm();
      const Vec2 normal = len > 0.0 ? Vec2(-tangent.y() / len, tangent.x() / len) : Vec2::Zero();
      widths[i] = left[i] + right[i];
      shifted[i] = points[i] + 0.5 * (left[i] - right[i]) * normal;
    }
    points = std::move(shifted);
  }
  return CenterLine(std::move(points), std::move(widths), closed);
}

inline CenterLine load_track(const std::filesystem::path& path, bool closed = true) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open track file");
  return parse_track_csv(in, closed, path.string());
}

// ---------------------------------------------------------------------------
// Nodes and offsets
// ---------------------------------------------------------------------------

/// Stations on the center line whose lateral offsets are the optimization variables.
struct NodeSet {
  std::vector<double> arc_positions;
  std::vector<Vec2> base_points;
  std::vector<Vec2> normals;  // unit, center-line tangent rotated +90 degrees
  std::vector<double> half_widths;
  bool closed = true;

  std::size_t size() const { return arc_positions.size(); }
};

struct NodePlacement {
  /// Weight of |curvature| * track length in the node density.
  double curvature_weight = 5.0;
  /// Resolution of the density integral.
  std::size_t density_samples = 4000;
  /// Lower bound on the density as a fraction of its mean, so straights keep some nodes.
  double density_floor = 0.5;
};

inline constexpr int kMinNodes = 4;
inline constexpr int kMaxNodes = 30;

/// Places `n` nodes by inverting the cumulative node density
/// 1 + beta * |kappa(s)| * L, so corners receive more nodes than straights.
/// Node 0 sits at arc position 0. Open center lines also get a node at the end.
inline NodeSet select_nodes(const CenterLine& center, int n, const NodePlacement& placement = {}) {
  if (n < kMinNodes || n > kMaxNodes) {
    throw ValidationError("node count must be in [" + std::to_string(kMinNodes) + ", " + std::to_string(kMaxNodes) + "], got " + std::to_string(n));
  }
  const CubicSpline2D spline = center.spline();
  const double length = center.total_length();
  const std::size_t m = std::max<std::size_t>(placement.density_samples, 10);

  std::vector<double> grid(m + 1), rho(m + 1), cdf(m + 1, 0.0);
  for (std::size_t j = 0; j <= m; ++j) {
    grid[j] = length * static_cast<double>(j) / static_cast<double>(m);
    rho[j] = 1.0 + placement.curvature_weight * std::abs(spline.curvature(grid[j])) * length;
  }
  double mean_rho = 0.0;
  for (std::size_t j = 1; j <= m; ++j) mean_rho += 0.5 * (rho[j] + rho[j - 1]) / static_cast<double>(m);
  for (double& r : rho) r = std::max(r, placement.density_floor * mean_rho);
  for (std::size_t j = 1; j <= m; ++j) cdf[j] = cdf[j - 1] + 0.5 * (rho[j] + rho[j - 1]) * (grid[j] - grid[j - 1]);
  const double total = cdf.back();

  NodeSet nodes;
  nodes.closed = center.closed();
  const double denom = center.closed() ? n : n - 1;
  for (int i = 0; i < n; ++i) {
    const double target = total * i / denom;
    double s = 0.0;
    if (i == 0) {
      s = 0.0;
    } else if (!center.closed() && i == n - 1) {
      s = length;
    } else {
      const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
      const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), 1, m);
      const double f = (target - cdf[j - 1]) / (cdf[j] - cdf[j - 1]);
      s = grid[j - 1] + f * (grid[j] - grid[j - 1]);
    }
    const Vec2 tangent = spline.first_derivative(s).normalized();
    nodes.arc_positions.push_back(s);
    nodes.base_points.push_back(spline.position(s));
    nodes.normals.emplace_back(-tangent.y(), tangent.x());
    nodes.half_widths.push_back(0.5 * center.width_at(s));
  }
  return nodes;
}

/// Lateral displacement of each node from the center line (meters), positive
/// along the node normal.
struct OffsetVector {
  std::vector<double> values;

  OffsetVector() = default;
  explicit OffsetVector(std::vector<double> v) : values(std::move(v)) {}
  static OffsetVector zeros(std::size_t n) { return OffsetVector(std::vector<double>(n, 0.0)); }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  bool operator==(const OffsetVector&) const = default;
};

inline void check_offsets(const NodeSet& nodes, const OffsetVector& w) {
  if (w.size() != nodes.size()) {
    throw ValidationError("offset vector has " + std::to_string(w.size()) + " values, expected " + std::to_string(nodes.size()));
  }
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i]) || std::abs(w[i]) > nodes.half_widths[i]) {
      throw BoundsError("offset " + std::to_string(i) + " = " + std::to_string(w[i]) + " outside [-" +
                        std::to_string(nodes.half_widths[i]) + ", " + std::to_string(nodes.half_widths[i]) + "]");
    }
  }
}

inline std::vector<Vec2> offsets_to_waypoints(const NodeSet& nodes, const OffsetVector& w) {
  check_offsets(nodes, w);
  std::vector<Vec2> out(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = nodes.base_points[i] + w[i] * nodes.normals[i];
  return out;
}

// ---------------------------------------------------------------------------
// Resampled path
// ---------------------------------------------------------------------------

/// Smooth trajectory resampled at K stations approximately uniform in arc length.
///
/// `segment_lengths[k]` is the spline arc length from station k to k+1; a
/// closed path has K segments, the last one returning to station 0.
struct SampledPath {
  std::vector<Vec2> points;
  std::vector<double> tangent_angles;
  std::vector<double> curvature;
  std::vector<double> segment_lengths;
  bool closed = true;

  std::size_t size() const { return points.size(); }
  double total_length() const {
    double s = 0.0;
    for (double d : segment_lengths) s += d;
    return s;
  }
};

inline constexpr int kMinResample = 50;

/// Resamples an existing spline at `k` stations.
inline SampledPath resample(const CubicSpline2D& spline, int k) {
  if (k < kMinResample) throw ValidationError("resample count must be >= " + std::to_string(kMinResample) + ", got " + std::to_string(k));
  const auto knots = spline.knots();
  constexpr int kSub = 8;

  // Arc-length table over the parameter.
  std::vector<double> params{knots.front()}, arcs{0.0};
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double h = (knots[i + 1] - knots[i]) / kSub;
    for (int j = 0; j < kSub; ++j) {
      const double a = knots[i] + j * h;
      const double b = j + 1 == kSub ? knots[i + 1] : a + h;
      arcs.push_back(arcs.back() + spline.arc_length(a, b, 1));
      params.push_back(b);
    }
  }
  const double total = arcs.back();
  const bool closed = spline.closed();
  const double spacing = total / (closed ? k : k - 1);

  std::vector<double> t(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double target = spacing * i;
    if (i == 0) {
      t[0] = params.front();
      continue;
    }
    if (!closed && i == k - 1) {
      t[static_cast<std::size_t>(i)] = params.back();
      continue;
    }
    const auto it = std::upper_bound(arcs.begin(), arcs.end(), target);
    const std::size_t j = std::clamp<std::size_t>(static_cast<std::size_t>(it - arcs.begin()), 1, arcs.size() - 1);
    const double f = (target - arcs[j - 1]) / (arcs[j] - arcs[j - 1]);
    double ti = params[j - 1] + f * (params[j] - params[j - 1]);
    // One Newton correction on the local arc length.
    const double err = arcs[j - 1] + spline.arc_length(params[j - 1], ti, 1) - target;
    ti -= err / spline.first_derivative(ti).norm();
    t[static_cast<std::size_t>(i)] = std::clamp(ti, params[j - 1], params[j]);
  }

  SampledPath path;
  path.closed = closed;
  const std::size_t kk = t.size();
  for (std::size_t i = 0; i < kk; ++i) {
    path.points.push_back(spline.position(t[i]));
    path.tangent_angles.push_back(spline.heading(t[i]));
    path.curvature.push_back(spline.curvature(t[i]));
  }
  const std::size_t segments = closed ? kk : kk - 1;
  for (std::size_t i = 0; i < segments; ++i) {
    const double a = t[i];
    const double b = i + 1 < kk ? t[i + 1] : spline.length();
    const double len = spline.arc_length(a, b);
    if (!(len > 0.0)) throw ValidationError("resampled path has a zero-length segment");
    path.segment_lengths.push_back(len);
  }
  return path;
}

/// Joins the waypoints with a chord-length cubic spline (periodic if closed,
/// natural otherwise) and resamples it at `k` stations.
inline SampledPath fit_and_resample(std::span<const Vec2> waypoints, bool closed, int k = 100) {
  if (k < kMinResample) throw ValidationError("resample count must be >= " + std::to_string(kMinResample) + ", got " + std::to_string(k));
  return resample(CubicSpline2D(waypoints, closed), k);
}

// ---------------------------------------------------------------------------
// Geometry queries
// ---------------------------------------------------------------------------

struct PolylineProjection {
  double distance = 0.0;  // unsigned distance to the polyline
  double arc_position = 0.0;
};

inline PolylineProjection project_onto(const CenterLine& center, const Vec2& p) {
  const auto pts = center.points();
  const auto arcs = center.cumulative_arc_length();
  const std::size_t n = pts.size();
  const std::size_t segments = center.closed() ? n : n - 1;
  PolylineProjection best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t i = 0; i < segments; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    const Vec2 ab = b - a;
    const double f = std::clamp((p - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
    const double d = (a + f * ab - p).norm();
    if (d < best.distance) best = {d, arcs[i] + f * ab.norm()};
  }
  return best;
}

/// Largest amount by which any path point lies outside the track strip,
/// i.e. max(distance to center line - w_T/2). Negative when fully inside.
inline double boundary_excess(const CenterLine& center, const SampledPath& path) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const Vec2& p : path.points) {
    const PolylineProjection proj = project_onto(center, p);
    worst = std::max(worst, proj.distance - 0.5 * center.width_at(proj.arc_position));
  }
  return worst;
}

}  // namespace raceline

#endif  // RACELINE_TRACK_HPP
