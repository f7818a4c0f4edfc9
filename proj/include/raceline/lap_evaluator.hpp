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

#ifndef RACELINE_LAP_EVALUATOR_HPP
#define RACELINE_LAP_EVALUATOR_HPP

#include <utility>
#include <vector>

#include "raceline/speed_profile.hpp"
#include "raceline/track.hpp"

namespace raceline {

/// Everything produced while evaluating one candidate trajectory.
struct TrajectoryEvaluation {
  OffsetVector offsets;
  std::vector<Vec2> waypoints;
  SampledPath path;
  SpeedProfile profile;

  double lap_time() const { return profile.lap_time; }
};

/// Minimum lap time of the trajectory described by an offset vector:
/// offsets -> waypoints -> cubic spline -> resampled path -> speed profile.
template <typename Solver = ForwardBackwardSolver>
class LapEvaluator {
 public:
  LapEvaluator(NodeSet nodes, VehicleParams params, int resample_count = 100, double v0 = 0.0, Solver solver = {})
      : nodes_(std::move(nodes)), params_(params), resample_count_(resample_count), v0_(v0), solver_(std::move(solver)) {
    params_.validate();
    if (resample_count_ < kMinResample) {
      throw ValidationError("resample count must be >= " + std::to_string(kMinResample));
    }
  }

  TrajectoryEvaluation evaluate(const OffsetVector& w) const {
    TrajectoryEvaluation out;
    out.offsets = w;
    out.waypoints = offsets_to_waypoints(nodes_, w);
    out.path = fit_and_resample(out.waypoints, nodes_.closed, resample_count_);
    out.profile = solver_(out.path, params_, v0_);
    return out;
  }

  double lap_time(const OffsetVector& w) const { return evaluate(w).lap_time(); }

  const NodeSet& nodes() const { return nodes_; }
  const VehicleParams& params() const { return params_; }
  std::size_t dimension() const { return nodes_.size(); }
  int resample_count() const { return resample_count_; }

 private:
  NodeSet nodes_;
  VehicleParams params_;
  int resample_count_;
  double v0_;
  Solver solver_;
};

}  // namespace raceline

#endif  // RACELINE_LAP_EVALUATOR_HPP
