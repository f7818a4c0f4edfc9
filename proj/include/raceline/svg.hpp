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

#ifndef RACELINE_SVG_HPP
#define RACELINE_SVG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "raceline/baseline.hpp"
#include "raceline/speed_profile.hpp"
#include "raceline/track.hpp"

namespace raceline {
namespace svg {

struct Rgb {
  int r = 0, g = 0, b = 0;
  std::string hex() const {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
  }
};

/// Piecewise-linear approximation of the viridis colormap, t in [0, 1].
inline Rgb viridis(double t) {
  static constexpr std::array<std::array<int, 3>, 9> stops{{{68, 1, 84},
                                                           {71, 44, 122},
                                                           {59, 81, 139},
                                                           {44, 113, 142},
                                                           {33, 144, 141},
                                                           {39, 173, 129},
                                                           {92, 200, 99},
                                                           {170, 220, 50},
                                                           {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0) * (stops.size() - 1);
  const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
  const double f = t - static_cast<double>(i);
  auto mix = [&](int c) { return static_cast<int>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c]))); };
  return {mix(0), mix(1), mix(2)};
}

inline const std::array<const char*, 6> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

/// Roughly `target` round tick values covering [lo, hi].
inline std::vector<double> ticks(double lo, double hi, int target = 6) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    step = m * mag;
    if (step >= raw) break;
  }
  std::vector<double> out;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) out.push_back(t);
  return out;
}

/// A plot area mapping data coordinates to pixels, with optional equal aspect.
class Canvas {
 public:
  Canvas(double width, double height, double x0, double x1, double y0, double y1, bool equal_aspect = false)
      : width_(width), height_(height) {
    if (!(x1 > x0)) x1 = x0 + 1.0;
    if (!(y1 > y0)) y1 = y0 + 1.0;
    const double pw = width_ - kLeft - kRight, ph = height_ - kTop - kBottom;
    sx_ = pw / (x1 - x0);
    sy_ = ph / (y1 - y0);
    if (equal_aspect) {
      const double s = std::min(sx_, sy_);
      const double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
      sx_ = sy_ = s;
      x0 = cx - 0.5 * pw / s;
      x1 = cx + 0.5 * pw / s;
      y0 = cy - 0.5 * ph / s;
      y1 = cy + 0.5 * ph / s;
    }
    x0_ = x0;
    x1_ = x1;
    y0_ = y0;
    y1_ = y1;
  }

  double px(double x) const { return kLeft + (x - x0_) * sx_; }
  double py(double y) const { return height_ - kBottom - (y - y0_) * sy_; }

  void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& stroke, double width = 1.5,
                const std::string& extra = "") {
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"" << width << "\" " << extra << " points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (!std::isfinite(xs[i]) || !std::isfinite(ys[i])) continue;
      os << num(px(xs[i])) << ',' << num(py(ys[i])) << ' ';
    }
    os << "\"/>";
    body_.push_back(os.str());
  }

  void polygon(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& fill, double opacity) {
    std::ostringstream os;
    os << "<polygon fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\" stroke=\"none\" points=\"";
    for (std::size_t i = 0; i < xs.size(); ++i) os << num(px(xs[i])) << ',' << num(py(ys[i])) << ' ';
    os << "\"/>";
    body_.push_back(os.str());
  }

  void segment(double xa, double ya, double xb, double yb, const std::string& stroke, double width) {
    body_.push_back("<line x1=\"" + num(px(xa)) + "\" y1=\"" + num(py(ya)) + "\" x2=\"" + num(px(xb)) + "\" y2=\"" + num(py(yb)) +
                    "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\" stroke-linecap=\"round\"/>");
  }

  void dot(double x, double y, double r, const std::string& fill, double opacity = 1.0) {
    body_.push_back("<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r) + "\" fill=\"" + fill +
                    "\" fill-opacity=\"" + num(opacity) + "\"/>");
  }

  /// Text at pixel coordinates.
  void text(double x, double y, const std::string& s, const std::string& anchor = "start", int size = 12) {
    body_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + std::to_string(size) + "\" text-anchor=\"" + anchor +
                    "\">" + s + "</text>");
  }

  void raw(std::string element) { body_.push_back(std::move(element)); }

  void axes(const std::string& xlabel, const std::string& ylabel, const std::string& title) {
    const double l = kLeft, r = width_ - kRight, t = kTop, b = height_ - kBottom;
    std::ostringstream os;
    os << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\"" << num(b - t)
       << "\" fill=\"none\" stroke=\"#444\"/>";
    axes_.push_back(os.str());
    for (double v : ticks(x0_, x1_)) {
      const double x = px(v);
      axes_.push_back("<line x1=\"" + num(x) + "\" y1=\"" + num(b) + "\" x2=\"" + num(x) + "\" y2=\"" + num(b + 5) + "\" stroke=\"#444\"/>");
      axes_.push_back("<text x=\"" + num(x) + "\" y=\"" + num(b + 18) + "\" font-size=\"11\" text-anchor=\"middle\">" + label(v) + "</text>");
    }
    for (double v : ticks(y0_, y1_)) {
      const double y = py(v);
      axes_.push_back("<line x1=\"" + num(l - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(l) + "\" y2=\"" + num(y) + "\" stroke=\"#444\"/>");
      axes_.push_back("<text x=\"" + num(l - 8) + "\" y=\"" + num(y + 4) + "\" font-size=\"11\" text-anchor=\"end\">" + label(v) + "</text>");
    }
    axes_.push_back("<text x=\"" + num(0.5 * (l + r)) + "\" y=\"" + num(height_ - 10) + "\" font-size=\"13\" text-anchor=\"middle\">" +
                    xlabel + "</text>");
    axes_.push_back("<text transform=\"translate(16," + num(0.5 * (t + b)) + ") rotate(-90)\" font-size=\"13\" text-anchor=\"middle\">" +
                    ylabel + "</text>");
    axes_.push_back("<text x=\"" + num(0.5 * (l + r)) + "\" y=\"20\" font-size=\"14\" text-anchor=\"middle\">" + title + "</text>");
  }

  /// Clips drawing to the plot area.
  void write(std::ostream& os) const {
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width_ << "\" height=\"" << height_ << "\" viewBox=\"0 0 " << width_
       << ' ' << height_ << "\" font-family=\"sans-serif\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<clipPath id=\"plot\"><rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(width_ - kLeft - kRight)
       << "\" height=\"" << num(height_ - kTop - kBottom) << "\"/></clipPath>\n";
    os << "<g clip-path=\"url(#plot)\">\n";
    for (const auto& e : body_) os << e << '\n';
    os << "</g>\n";
    for (const auto& e : axes_) os << e << '\n';
    for (const auto& e : overlay_) os << e << '\n';
    os << "</svg>\n";
  }

  /// Elements drawn outside the clip region (legends, color bars).
  void overlay(std::string element) { overlay_.push_back(std::move(element)); }

  double width() const { return width_; }
  double height() const { return height_; }
  static constexpr double kLeft = 70, kRight = 110, kTop = 35, kBottom = 50;

 private:
  double width_, height_;
  double x0_ = 0, x1_ = 1, y0_ = 0, y1_ = 1;
  double sx_ = 1, sy_ = 1;
  std::vector<std::string> body_, axes_, overlay_;
};

inline std::string overlay_text(double x, double y, const std::string& s, const std::string& anchor = "start") {
  return "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"11\" text-anchor=\"" + anchor + "\">" + s + "</text>";
}

}  // namespace svg

/// Track boundaries, center line, and the racing line colored by speed.
inline void write_raceline_svg(std::ostream& os, const CenterLine& center, const SpeedProfile& profile) {
  const SampledPath c = fit_and_resample(center.points(), center.closed(), std::max<int>(400, static_cast<int>(center.size())));
  std::vector<double> cx, cy, lx, ly, rx, ry;
  double s = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    const Vec2 p = c.points[k];
    const Vec2 n(-std::sin(c.tangent_angles[k]), std::cos(c.tangent_angles[k]));
    const double hw = 0.5 * center.width_at(s * center.total_length() / c.total_length());
    cx.push_back(p.x());
    cy.push_back(p.y());
    lx.push_back(p.x() + hw * n.x());
    ly.push_back(p.y() + hw * n.y());
    rx.push_back(p.x() - hw * n.x());
    ry.push_back(p.y() - hw * n.y());
    if (k < c.segment_lengths.size()) s += c.segment_lengths[k];
  }
  if (center.closed()) {
    for (auto* v : {&cx, &cy, &lx, &ly, &rx, &ry}) v->push_back(v->front());
  }
  auto lo = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
  };
  auto hi = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::max(*std::max_element(a.begin(), a.end()), *std::max_element(b.begin(), b.end()));
  };
  const double x0 = lo(lx, rx), x1 = hi(lx, rx), y0 = lo(ly, ry), y1 = hi(ly, ry);
  const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
  svg::Canvas cv(800, 640, x0 - pad, x1 + pad, y0 - pad, y1 + pad, true);
  cv.polyline(lx, ly, "#222", 1.5);
  cv.polyline(rx, ry, "#222", 1.5);
  cv.polyline(cx, cy, "#999", 1.0, "stroke-dasharray=\"6 4\"");

  const auto [vmin_it, vmax_it] = std::minmax_element(profile.speeds.begin(), profile.speeds.end());
  const double vmin = profile.speeds.empty() ? 0.0 : *vmin_it, vmax = profile.speeds.empty() ? 1.0 : *vmax_it;
  const double span = vmax > vmin ? vmax - vmin : 1.0;
  for (std::size_t k = 0; k + 1 < profile.size(); ++k) {
    const double v = 0.5 * (profile.speeds[k] + profile.speeds[k + 1]);
    cv.segment(profile.points[k].x(), profile.points[k].y(), profile.points[k + 1].x(), profile.points[k + 1].y(),
               svg::viridis((v - vmin) / span).hex(), 3.0);
  }
  if (!profile.points.empty()) cv.dot(profile.points[0].x(), profile.points[0].y(), 5.0, "#d62728");

  // Color bar.
  const double bx = cv.width() - svg::Canvas::kRight + 25, by = svg::Canvas::kTop + 20, bh = 300;
  for (int i = 0; i < 50; ++i) {
    const double t0 = i / 50.0;
    cv.overlay("<rect x=\"" + svg::num(bx) + "\" y=\"" + svg::num(by + (1.0 - t0 - 0.02) * bh) + "\" width=\"16\" height=\"" +
               svg::num(bh / 50.0 + 0.5) + "\" fill=\"" + svg::viridis(t0).hex() + "\"/>");
  }
  cv.overlay(svg::overlay_text(bx + 20, by + 4, svg::label(std::round(vmax * 100) / 100)));
  cv.overlay(svg::overlay_text(bx + 20, by + bh, svg::label(std::round(vmin * 100) / 100)));
  cv.overlay(svg::overlay_text(bx, by - 8, "speed (m/s)"));
  char title[96];
  std::snprintf(title, sizeof title, "racing line, lap time %.3f s", profile.lap_time);
  cv.axes("x (m)", "y (m)", title);
  cv.write(os);
}

/// Lateral versus longitudinal acceleration with the friction circle of radius mu_s g.
inline void write_gg_svg(std::ostream& os, const SpeedProfile& profile, const VehicleParams& params) {
  const double r = params.grip();
  svg::Canvas cv(680, 600, -1.15 * r, 1.15 * r, -1.15 * r, 1.15 * r, true);
  std::vector<double> xs, ys;
  for (int i = 0; i <= 360; ++i) {
    const double a = i * std::numbers::pi / 180.0;
    xs.push_back(r * std::cos(a));
    ys.push_back(r * std::sin(a));
  }
  cv.polyline(xs, ys, "#d62728", 1.5);
  const double cap = params.drive_fraction() * r;
  const double cx = std::sqrt(std::max(0.0, r * r - cap * cap));
  cv.segment(-cx, cap, cx, cap, "#ff7f0e", 1.0);
  cv.segment(-1.15 * r, 0.0, 1.15 * r, 0.0, "#bbb", 0.8);
  cv.segment(0.0, -1.15 * r, 0.0, 1.15 * r, "#bbb", 0.8);
  for (const auto& p : gg_points(profile)) cv.dot(p.lat_accel, p.long_accel, 2.5, "#1f77b4", 0.7);
  const double lx = cv.width() - svg::Canvas::kRight + 10;
  for (const auto& [row, color, text] : {std::tuple{0, "#d62728", "friction circle"}, std::tuple{1, "#ff7f0e", "drive cap"}}) {
    const double ly = svg::Canvas::kTop + 20 + 16 * row;
    cv.overlay("<line x1=\"" + svg::num(lx) + "\" y1=\"" + svg::num(ly - 4) + "\" x2=\"" + svg::num(lx + 16) + "\" y2=\"" +
               svg::num(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>");
    cv.overlay(svg::overlay_text(lx + 20, ly, text));
  }
  cv.axes("lateral acceleration (m/s^2)", "longitudinal acceleration (m/s^2)", "GG diagram");
  cv.write(os);
}

/// Best lap time versus evaluations, one mean curve with its 95% band per method.
inline void write_comparison_svg(std::ostream& os, const ComparisonReport& rep) {
  double y0 = std::numeric_limits<double>::infinity(), y1 = -y0;
  std::size_t len = 0;
  for (const auto& m : rep.methods) {
    for (std::size_t i = 0; i < m.mean.size(); ++i) {
      if (std::isfinite(m.lower[i])) y0 = std::min(y0, m.lower[i]);
      if (std::isfinite(m.upper[i])) y1 = std::max(y1, m.upper[i]);
    }
    len = std::max(len, m.mean.size());
  }
  if (!std::isfinite(y0)) y0 = 0.0, y1 = 1.0;
  const double pad = 0.05 * std::max(y1 - y0, 1e-9);
  svg::Canvas cv(800, 500, 1.0, std::max<double>(2.0, static_cast<double>(len)), y0 - pad, y1 + pad);
  for (std::size_t mi = 0; mi < rep.methods.size(); ++mi) {
    const auto& m = rep.methods[mi];
    const std::string color = svg::kPalette[mi % svg::kPalette.size()];
    std::vector<double> bx, by, mx, my;
    for (std::size_t i = 0; i < m.mean.size(); ++i) {
      bx.push_back(static_cast<double>(i + 1));
      by.push_back(m.upper[i]);
      mx.push_back(static_cast<double>(i + 1));
      my.push_back(m.mean[i]);
    }
    for (std::size_t i = m.mean.size(); i-- > 0;) {
      bx.push_back(static_cast<double>(i + 1));
      by.push_back(m.lower[i]);
    }
    cv.polygon(bx, by, color, 0.2);
    cv.polyline(mx, my, color, 2.0);
    const double ly = svg::Canvas::kTop + 20 + 18 * static_cast<double>(mi);
    const double lx = cv.width() - svg::Canvas::kRight + 10;
    cv.overlay("<line x1=\"" + svg::num(lx) + "\" y1=\"" + svg::num(ly - 4) + "\" x2=\"" + svg::num(lx + 20) + "\" y2=\"" + svg::num(ly - 4) +
               "\" stroke=\"" + color + "\" stroke-width=\"3\"/>");
    cv.overlay(svg::overlay_text(lx + 26, ly, m.label));
  }
  cv.axes("evaluations", "best lap time (s)", "best lap time, mean and 95% band over " + std::to_string(rep.n_runs) + " runs");
  cv.write(os);
}

}  // namespace raceline

#endif  // RACELINE_SVG_HPP
