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

#include "rlio/geometry.hpp"

namespace rlio {

/// Per-node estimated state: world-from-IMU pose, world-frame velocity and
/// IMU biases.
///
/// The local parameterization is 15-dimensional, ordered
/// [d_rot(3), d_trans(3), d_vel(3), d_accel_bias(3), d_gyro_bias(3)];
/// the pose block retracts with the SE(3) exponential on the right.
struct NavState {
  Pose pose;                       // world_T_imu
  Vec3 velocity = Vec3::Zero();    // m/s, world frame
  Vec3 accel_bias = Vec3::Zero();  // m/s^2
  Vec3 gyro_bias = Vec3::Zero();   // rad/s
  double timestamp = 0.0;          // s

  static constexpr int kDof = 15;

  Vec6 bias() const {
    Vec6 b;
    b << accel_bias, gyro_bias;
    return b;
  }

  /// Applies a 15-dim local update.
  NavState retract(const Eigen::Matrix<double, 15, 1>& delta) const {
    NavState out = *this;
    out.pose = compose(pose, se3_exp(delta.head<6>()));
    out.velocity += delta.segment<3>(6);
    out.accel_bias += delta.segment<3>(9);
    out.gyro_bias += delta.segment<3>(12);
    return out;
  }

  /// Local difference such that a.local_minus(b) == delta when a == b.retract(delta)
  /// up to the manifold nonlinearity of the pose block.
  Eigen::Matrix<double, 15, 1> local_minus(const NavState& other) const {
    Eigen::Matrix<double, 15, 1> d;
    d.head<6>() = se3_log(compose(inverse(other.pose), pose));
    d.segment<3>(6) = velocity - other.velocity;
    d.segment<3>(9) = accel_bias - other.accel_bias;
    d.segment<3>(12) = gyro_bias - other.gyro_bias;
    return d;
  }
};

/// Fixed rigid transforms between the sensor frames.
struct Extrinsics {
  Rotation imu_to_radar_rotation = Rotation::Identity();  // radar_R_imu
  Vec3 radar_position_in_imu = Vec3::Zero();              // imu_p_radar, m
  Pose lidar_to_imu;                                      // imu_T_lidar
};

}  // namespace rlio
