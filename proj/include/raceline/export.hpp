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

#ifndef RACELINE_EXPORT_HPP
#define RACELINE_EXPORT_HPP

#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>

#include <json.hpp>

#include "raceline/baseline.hpp"
#include "raceline/bayesopt.hpp"
#include "raceline/errors.hpp"
#include "raceline/speed_profile.hpp"

namespace raceline {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_profile_csv(std::ostream& os, const SpeedProfile& p) {
  os << "s_m,x_m,y_m,v_mps,t_s,a_long_mps2,a_lat_mps2\n";
  for (std::size_t k = 0; k < p.size(); ++k) {
    os << format_double(p.arc_positions[k]) << ',' << format_double(p.points[k].x()) << ',' << format_double(p.points[k].y())
       << ',' << format_double(p.speeds[k]) << ',' << format_double(p.times[k]) << ',' << format_double(p.long_accel[k]) << ','
       << format_double(p.lat_accel[k]) << '\n';
  }
}

/// One row per evaluation. Initial samples have iter 0; BayesOpt steps count from 1.
inline void write_history_csv(std::ostream& os, const OptState& st) {
  const std::size_t n = st.evaluations.empty() ? 0 : st.evaluations.front().w.size();
  os << "iter,tau_s,tau_best_s,penalized";
  for (std::size_t i = 0; i < n; ++i) os << ",w_" << i;
  os << '\n';
  for (std::size_t e = 0; e < st.evaluations.size(); ++e) {
    const auto& r = st.evaluations[e];
    const long iter = static_cast<long>(e) - st.n_init + 1;
    os << (iter > 0 ? iter : 0) << ',' << format_double(r.tau) << ',' << format_double(r.tau_best) << ',' << (r.penalized ? 1 : 0);
    for (std::size_t i = 0; i < n; ++i) os << ',' << format_double(r.w[i]);
    os << '\n';
  }
}

inline void write_gg_csv(std::ostream& os, const SpeedProfile& p) {
  os << "s_m,a_lat_mps2,a_long_mps2\n";
  const auto pts = gg_points(p);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    os << format_double(p.arc_positions[k]) << ',' << format_double(pts[k].lat_accel) << ',' << format_double(pts[k].long_accel) << '\n';
  }
}

/// Per-evaluation rows per method: band statistics followed by every run's best-so-far value.
inline void write_comparison_csv(std::ostream& os, const ComparisonReport& rep) {
  std::size_t runs = 0;
  for (const auto& m : rep.methods) runs = std::max(runs, m.runs.size());
  os << "method,eval,mean_s,lower_s,upper_s";
  for (std::size_t r = 0; r < runs; ++r) os << ",run_" << r << "_s";
  os << '\n';
  for (const auto& m : rep.methods) {
    for (std::size_t i = 0; i < m.mean.size(); ++i) {
      os << m.label << ',' << i + 1 << ',' << format_double(m.mean[i]) << ',' << format_double(m.lower[i]) << ','
         << format_double(m.upper[i]);
      for (std::size_t r = 0; r < runs; ++r) {
        os << ',';
        if (r < m.runs.size()) os << format_double(m.runs[r].best_so_far[i]);
      }
      os << '\n';
    }
  }
}

inline nlohmann::json comparison_json(const ComparisonReport& rep) {
  nlohmann::json j;
  j["n_runs"] = rep.n_runs;
  j["evaluations"] = rep.evaluations;
  j["methods"] = nlohmann::json::array();
  for (const auto& m : rep.methods) {
    nlohmann::json mj;
    mj["label"] = m.label;
    mj["mean_s"] = m.mean;
    mj["lower_s"] = m.lower;
    mj["upper_s"] = m.upper;
    mj["final_mean_s"] = m.final_mean;
    mj["seeds"] = nlohmann::json::array();
    for (const auto& r : m.runs) mj["seeds"].push_back(r.seed);
    mj["failures"] = m.failures;
    j["methods"].push_back(std::move(mj));
  }
  return j;
}

/// Opens `path` for writing or throws with the path in the message.
inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot write " + path.string());
  return os;
}

template <typename Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  std::ofstream os = open_output(path);
  writer(os);
  os.flush();
  if (!os) throw ValidationError("error while writing " + path.string());
}

}  // namespace raceline

#endif  // RACELINE_EXPORT_HPP
