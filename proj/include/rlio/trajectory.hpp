// Copyright 2026, the rlio project contributors
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

#pragma once

#include <vector>

#include "rlio/geometry.hpp"

namespace rlio {

/// One timestamped pose + velocity sample of a true or estimated trajectory.
struct TrajectorySample {
  double timestamp = 0.0;  // s
  Pose pose;               // world_T_body
  Vec3 velocity = Vec3::Zero();  // m/s, world frame
};

using TrajectoryRecord = std::vector<TrajectorySample>;

/// Body-frame velocity component along the given axis (0 = forward).
inline double body_velocity_axis(const TrajectorySample& s, int axis) {
  return (s.pose.R.transpose() * s.velocity)[axis];
}

}  // namespace rlio
