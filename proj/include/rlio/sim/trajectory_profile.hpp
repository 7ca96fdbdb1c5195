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

/**
 * \file trajectory_profile.hpp
 * \brief Closed-form planar ground-vehicle trajectories from motion segments.
 *
 * Segments chain continuously in position, heading and speed: still/cruise
 * (constant speed), accelerate (constant along-track acceleration) and turn
 * (constant yaw rate at constant speed). The body x axis points along the
 * heading, so body-frame velocity is [speed, 0, 0].
 */

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlio/trajectory.hpp"

namespace rlio {

struct TrajectorySegment {
  enum class Type { kCruise, kAccelerate, kTurn };
  Type type = Type::kCruise;
  double duration = 0.0;  // s
  double value = 0.0;     // accel m/s^2 (kAccelerate) or yaw rate rad/s (kTurn)
};

/// Instantaneous kinematic state along the profile.
struct MotionSample {
  Vec3 position = Vec3::Zero();
  double heading = 0.0;       // rad
  double speed = 0.0;         // m/s along track
  double along_accel = 0.0;   // m/s^2 along track
  double yaw_rate = 0.0;      // rad/s
};

class TrajectoryProfile {
 public:
  explicit TrajectoryProfile(std::vector<TrajectorySegment> segments)
      : segments_(std::move(segments)) {
    double t = 0.0;
    Boundary b;  // starts at origin, heading 0, standstill
    boundaries_.push_back(b);
    for (const auto& seg : segments_) {
      if (seg.duration <= 0.0)
        throw std::invalid_argument("trajectory: segment duration <= 0");
      b = advance(b, seg, seg.duration);
      t += seg.duration;
      b.t = t;
      boundaries_.push_back(b);
    }
    total_duration_ = t;
  }

  double total_duration() const { return total_duration_; }

  MotionSample sample(double t) const {
    if (t < 0.0) t = 0.0;
    if (t > total_duration_) t = total_duration_;
    // right-continuous: a boundary sample belongs to the segment it starts
    std::size_t k = 0;
    while (k + 1 < segments_.size() && t >= boundaries_[k + 1].t) ++k;
    const auto& seg = segments_.empty() ? kStillSegment : segments_[k];
    const Boundary b = segments_.empty() ? boundaries_[0] : boundaries_[k];
    const double tau = t - b.t;

    MotionSample out;
    switch (seg.type) {
      case TrajectorySegment::Type::kCruise: {
        out.position = b.p + direction(b.heading) * (b.speed * tau);
        out.heading = b.heading;
        out.speed = b.speed;
        break;
      }
      case TrajectorySegment::Type::kAccelerate: {
        out.position = b.p + direction(b.heading) *
                                 (b.speed * tau + 0.5 * seg.value * tau * tau);
        out.heading = b.heading;
        out.speed = b.speed + seg.value * tau;
        out.along_accel = seg.value;
        break;
      }
      case TrajectorySegment::Type::kTurn: {
        const double w = seg.value;
        out.heading = b.heading + w * tau;
        out.speed = b.speed;
        out.yaw_rate = w;
        if (std::abs(w) < 1e-12) {
          out.position = b.p + direction(b.heading) * (b.speed * tau);
        } else {
          out.position =
              b.p + (b.speed / w) * Vec3(std::sin(out.heading) - std::sin(b.heading),
                                         -(std::cos(out.heading) - std::cos(b.heading)),
                                         0.0);
        }
        break;
      }
    }
    return out;
  }

  Pose pose_at(double t) const {
    const MotionSample m = sample(t);
    return Pose(so3_exp(Vec3(0.0, 0.0, m.heading)), m.position);
  }

  Vec3 velocity_at(double t) const {
    const MotionSample m = sample(t);
    return m.speed * direction(m.heading);
  }

  /// World-frame acceleration of the body origin.
  Vec3 acceleration_at(double t) const {
    const MotionSample m = sample(t);
    return m.along_accel * direction(m.heading) +
           m.speed * m.yaw_rate * Vec3(-std::sin(m.heading), std::cos(m.heading), 0.0);
  }

  Vec3 angular_rate_at(double t) const {
    return Vec3(0.0, 0.0, sample(t).yaw_rate);
  }

 private:
  struct Boundary {
    double t = 0.0;
    Vec3 p = Vec3::Zero();
    double heading = 0.0;
    double speed = 0.0;
  };

  static Vec3 direction(double heading) {
    return Vec3(std::cos(heading), std::sin(heading), 0.0);
  }

  static Boundary advance(const Boundary& b, const TrajectorySegment& seg,
                          double tau) {
    Boundary out = b;
    switch (seg.type) {
      case TrajectorySegment::Type::kCruise:
        out.p = b.p + direction(b.heading) * (b.speed * tau);
        break;
      case TrajectorySegment::Type::kAccelerate:
        out.p = b.p + direction(b.heading) *
                          (b.speed * tau + 0.5 * seg.value * tau * tau);
        out.speed = b.speed + seg.value * tau;
        break;
      case TrajectorySegment::Type::kTurn: {
        const double w = seg.value;
        const double heading = b.heading + w * tau;
        if (std::abs(w) < 1e-12) {
          out.p = b.p + direction(b.heading) * (b.speed * tau);
        } else {
          out.p = b.p + (b.speed / w) * Vec3(std::sin(heading) - std::sin(b.heading),
                                             -(std::cos(heading) - std::cos(b.heading)),
                                             0.0);
        }
        out.heading = heading;
        break;
      }
    }
    return out;
  }

  static inline const TrajectorySegment kStillSegment{};

  std::vector<TrajectorySegment> segments_;
  std::vector<Boundary> boundaries_;
  double total_duration_ = 0.0;
};

/// Samples the profile at a fixed rate into a trajectory record.
inline TrajectoryRecord generate_truth(const TrajectoryProfile& profile,
                                       double rate_hz) {
  if (rate_hz <= 0.0) throw std::invalid_argument("generate_truth: rate <= 0");
  TrajectoryRecord out;
  const long n = static_cast<long>(std::floor(profile.total_duration() * rate_hz));
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    out.push_back({t, profile.pose_at(t), profile.velocity_at(t)});
  }
  return out;
}

/// Parses a compact profile description, e.g.
/// "still:2,accel:2:5,cruise:8,turn:0.25:12". Turn rates are rad/s.
inline TrajectoryProfile parse_trajectory_profile(const std::string& text) {
  std::vector<TrajectorySegment> segments;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const std::string item = text.substr(pos, end - pos);
    pos = end + 1;
    if (item.empty()) continue;

    std::vector<std::string> parts;
    std::size_t p = 0;
    while (p <= item.size()) {
      std::size_t q = item.find(':', p);
      if (q == std::string::npos) q = item.size();
      parts.push_back(item.substr(p, q - p));
      p = q + 1;
    }
    TrajectorySegment seg;
    const std::string& kind = parts[0];
    try {
      if (kind == "still" || kind == "cruise") {
        if (parts.size() != 2) throw std::invalid_argument("arity");
        seg.type = TrajectorySegment::Type::kCruise;
        seg.duration = std::stod(parts[1]);
      } else if (kind == "accel") {
        if (parts.size() != 3) throw std::invalid_argument("arity");
        seg.type = TrajectorySegment::Type::kAccelerate;
        seg.value = std::stod(parts[1]);
        seg.duration = std::stod(parts[2]);
      } else if (kind == "turn") {
        if (parts.size() != 3) throw std::invalid_argument("arity");
        seg.type = TrajectorySegment::Type::kTurn;
        seg.value = std::stod(parts[1]);
        seg.duration = std::stod(parts[2]);
      } else {
        throw std::invalid_argument("kind");
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("trajectory: cannot parse segment '" + item +
                                  "'");
    }
    segments.push_back(seg);
  }
  if (segments.empty())
    throw std::invalid_argument("trajectory: no segments given");
  return TrajectoryProfile(std::move(segments));
}

}  // namespace rlio
