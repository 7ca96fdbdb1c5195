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
 * \file preintegration.hpp
 * \brief On-manifold IMU preintegration between two graph nodes.
 *
 * Accumulates bias-corrected rotation/velocity/position deltas with a
 * zero-order-hold integration scheme, propagates the 9x9 covariance
 * (block order: rotation, velocity, position) and tracks first-order
 * Jacobians of the deltas with respect to the accelerometer and gyroscope
 * biases. Bias vectors are ordered [accelerometer; gyroscope].
 */

#pragma once

#include <stdexcept>
#include <vector>

#include "rlio/geometry.hpp"

namespace rlio {

using Vec9 = Eigen::Matrix<double, 9, 1>;
using Mat9 = Eigen::Matrix<double, 9, 9>;
using Mat96 = Eigen::Matrix<double, 9, 6>;

/// Raw gyroscope + accelerometer sample.
struct ImuMeasurement {
  Vec3 angular_velocity = Vec3::Zero();  // rad/s, body frame
  Vec3 specific_force = Vec3::Zero();    // m/s^2, body frame
  double timestamp = 0.0;                // s
};

/// Continuous-time IMU noise densities.
struct ImuNoise {
  double gyro_noise_density = 1e-3;       // rad/s/sqrt(Hz)
  double accel_noise_density = 1e-2;      // m/s^2/sqrt(Hz)
  double gyro_bias_random_walk = 1e-4;    // rad/s^2/sqrt(Hz)
  double accel_bias_random_walk = 1e-3;   // m/s^3/sqrt(Hz)
};

/// Accumulated IMU deltas between two nodes, with covariance and the
/// first-order bias Jacobians, all expressed at a fixed linearization bias.
struct PreintegratedImuDelta {
  Rotation delta_rotation = Rotation::Identity();
  Vec3 delta_velocity = Vec3::Zero();
  Vec3 delta_position = Vec3::Zero();
  double duration = 0.0;

  Mat9 covariance = Mat9::Zero();    // (rot, vel, pos)
  Mat96 bias_jacobians = Mat96::Zero();  // d(rot,vel,pos)/d(b_a, b_g)
  Vec6 bias_linearization_point = Vec6::Zero();  // [b_a; b_g]

  Mat3 d_rot_d_bg() const { return bias_jacobians.block<3, 3>(0, 3); }
  Mat3 d_vel_d_ba() const { return bias_jacobians.block<3, 3>(3, 0); }
  Mat3 d_vel_d_bg() const { return bias_jacobians.block<3, 3>(3, 3); }
  Mat3 d_pos_d_ba() const { return bias_jacobians.block<3, 3>(6, 0); }
  Mat3 d_pos_d_bg() const { return bias_jacobians.block<3, 3>(6, 3); }
};

/// Integrates the measurements over [t_i, t_j]. Each sample is held from its
/// own timestamp to the next one; the final sample is held until end_time.
inline PreintegratedImuDelta preintegrate(
    const std::vector<ImuMeasurement>& measurements, const Vec6& bias,
    double end_time, const ImuNoise& noise = ImuNoise{}) {
  if (measurements.empty())
    throw std::invalid_argument("preintegrate: empty measurement interval");

  PreintegratedImuDelta out;
  out.bias_linearization_point = bias;
  const Vec3 ba = bias.head<3>();
  const Vec3 bg = bias.tail<3>();

  const double sg2 = noise.gyro_noise_density * noise.gyro_noise_density;
  const double sa2 = noise.accel_noise_density * noise.accel_noise_density;

  for (std::size_t k = 0; k < measurements.size(); ++k) {
    const double t0 = measurements[k].timestamp;
    const double t1 =
        (k + 1 < measurements.size()) ? measurements[k + 1].timestamp : end_time;
    const double dt = t1 - t0;
    if (dt < 0.0)
      throw std::invalid_argument("preintegrate: non-monotone timestamps");
    if (dt == 0.0) continue;

    const Vec3 w = measurements[k].angular_velocity - bg;
    const Vec3 a = measurements[k].specific_force - ba;

    const Rotation dR = so3_exp(w * dt);
    const Mat3 Jr = so3_right_jacobian(w * dt);
    const Mat3 R = out.delta_rotation;
    const Mat3 A = skew(a);

    // Covariance propagation, error state (d_rot, d_vel, d_pos).
    Mat9 F = Mat9::Identity();
    F.block<3, 3>(0, 0) = dR.transpose();
    F.block<3, 3>(3, 0) = -R * A * dt;
    F.block<3, 3>(6, 0) = -0.5 * R * A * dt * dt;
    F.block<3, 3>(6, 3) = Mat3::Identity() * dt;

    Eigen::Matrix<double, 9, 6> G = Eigen::Matrix<double, 9, 6>::Zero();
    G.block<3, 3>(0, 0) = Jr * dt;
    G.block<3, 3>(3, 3) = R * dt;
    G.block<3, 3>(6, 3) = 0.5 * R * dt * dt;

    Vec6 noise_diag;
    noise_diag << sg2 / dt, sg2 / dt, sg2 / dt, sa2 / dt, sa2 / dt, sa2 / dt;
    out.covariance = F * out.covariance * F.transpose() +
                     G * noise_diag.asDiagonal() * G.transpose();

    // First-order bias Jacobians (recursion before updating the deltas).
    Mat3 JRg = out.d_rot_d_bg();
    Mat3 Jva = out.d_vel_d_ba();
    Mat3 Jvg = out.d_vel_d_bg();
    Mat3 Jpa = out.d_pos_d_ba();
    Mat3 Jpg = out.d_pos_d_bg();

    out.bias_jacobians.block<3, 3>(6, 0) =
        Jpa + Jva * dt - 0.5 * R * dt * dt;                    // d_pos/d_ba
    out.bias_jacobians.block<3, 3>(6, 3) =
        Jpg + Jvg * dt - 0.5 * R * A * JRg * dt * dt;          // d_pos/d_bg
    out.bias_jacobians.block<3, 3>(3, 0) = Jva - R * dt;       // d_vel/d_ba
    out.bias_jacobians.block<3, 3>(3, 3) =
        Jvg - R * A * JRg * dt;                                // d_vel/d_bg
    out.bias_jacobians.block<3, 3>(0, 3) =
        dR.transpose() * JRg - Jr * dt;                        // d_rot/d_bg

    // Delta updates.
    out.delta_position += out.delta_velocity * dt + 0.5 * R * a * dt * dt;
    out.delta_velocity += R * a * dt;
    out.delta_rotation = R * dR;
    out.duration += dt;
  }

  if (out.duration <= 0.0)
    throw std::invalid_argument("preintegrate: empty integration interval");
  return out;
}

/// Result of the static initialization window.
struct StaticInitResult {
  Rotation world_from_imu = Rotation::Identity();  // roll/pitch only, yaw = 0
  double gravity_magnitude = 9.81;                 // m/s^2
  Vec3 gyro_bias = Vec3::Zero();                   // rad/s
};

/// Estimates initial attitude (roll/pitch), gravity magnitude and gyroscope
/// bias from a static IMU buffer. Throws if the buffer is too short or the
/// platform shows more excitation than variance_gate allows.
inline StaticInitResult static_initialize(
    const std::vector<ImuMeasurement>& buffer, double duration = 1.0,
    double variance_gate = 0.5) {
  if (buffer.size() < 2)
    throw std::invalid_argument("static_initialize: buffer too small");
  const double span = buffer.back().timestamp - buffer.front().timestamp;
  if (span < duration)
    throw std::invalid_argument("static_initialize: buffer spans less than "
                                "the requested duration");

  Vec3 mean_w = Vec3::Zero(), mean_f = Vec3::Zero();
  for (const auto& m : buffer) {
    mean_w += m.angular_velocity;
    mean_f += m.specific_force;
  }
  mean_w /= static_cast<double>(buffer.size());
  mean_f /= static_cast<double>(buffer.size());

  double var = 0.0;
  for (const auto& m : buffer)
    var += (m.specific_force - mean_f).squaredNorm();
  var /= static_cast<double>(buffer.size());
  if (var > variance_gate)
    throw std::runtime_error("static_initialize: platform is not static");

  StaticInitResult out;
  out.gyro_bias = mean_w;
  out.gravity_magnitude = mean_f.norm();
  if (out.gravity_magnitude < 1e-6)
    throw std::runtime_error("static_initialize: degenerate specific force");

  // World R IMU such that R * mean_f points along +z, with zero yaw: rotate
  // about the axis orthogonal to both.
  const Vec3 f = mean_f / out.gravity_magnitude;
  const Vec3 z = Vec3::UnitZ();
  const Vec3 axis = f.cross(z);
  const double s = axis.norm();
  const double c = f.dot(z);
  if (s < 1e-12) {
    out.world_from_imu =
        c > 0.0 ? Rotation(Mat3::Identity()) : so3_exp(Vec3(M_PI, 0.0, 0.0));
  } else {
    out.world_from_imu = so3_exp(axis / s * std::atan2(s, c));
  }
  return out;
}

}  // namespace rlio
