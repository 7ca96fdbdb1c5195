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
 * \file factors.hpp
 * \brief Measurement residuals and their analytic Jacobians.
 *
 * Jacobians are taken with respect to the 15-dim local parameterization of
 * NavState (see state.hpp). Residual-block and bias orderings follow the
 * conventions fixed in preintegration.hpp.
 */

#pragma once

#include <optional>
#include <stdexcept>

#include "rlio/estimator/state.hpp"
#include "rlio/imu/preintegration.hpp"

namespace rlio {

using Mat915 = Eigen::Matrix<double, 9, 15>;
using Mat615 = Eigen::Matrix<double, 6, 15>;
using Vec15 = Eigen::Matrix<double, 15, 1>;

/// Relative pose between two LiDAR epochs, already mapped into the IMU frame.
struct LidarRelativePose {
  Pose relative_transform;         // imu_{j-1}_T_imu_j
  Mat6 covariance = Mat6::Identity();  // on the se(3) tangent, (rot, trans)
  double t_prev = 0.0;
  double t_cur = 0.0;
};

/// Forward-velocity observation derived from one radar beam.
struct RadarVelocityFactorInput {
  double forward_velocity = 0.0;           // m/s, radar-frame x axis
  double variance = 0.169 * 0.169;         // (m/s)^2
  Vec3 angular_velocity_at_node = Vec3::Zero();  // rad/s, raw gyro sample
  double timestamp = 0.0;
};

/// Preintegrated IMU factor residual (rotation, velocity, position blocks)
/// with Jacobians w.r.t. the two attached states.
inline Vec9 imu_residual(const PreintegratedImuDelta& delta,
                         const NavState& state_i, const NavState& state_j,
                         const Vec3& gravity, Mat915* jac_i = nullptr,
                         Mat915* jac_j = nullptr) {
  const double dt = delta.duration;
  const Rotation& Ri = state_i.pose.R;
  const Rotation& Rj = state_j.pose.R;

  const Vec6 db = state_i.bias() - delta.bias_linearization_point;
  const Vec3 dba = db.head<3>();
  const Vec3 dbg = db.tail<3>();

  const Vec3 rot_corr = delta.d_rot_d_bg() * dbg;
  const Rotation corrected_rot = delta.delta_rotation * so3_exp(rot_corr);
  const Vec3 corrected_vel =
      delta.delta_velocity + delta.d_vel_d_ba() * dba + delta.d_vel_d_bg() * dbg;
  const Vec3 corrected_pos =
      delta.delta_position + delta.d_pos_d_ba() * dba + delta.d_pos_d_bg() * dbg;

  const Vec3 vel_term = state_j.velocity - state_i.velocity - gravity * dt;
  const Vec3 pos_term = state_j.pose.p - state_i.pose.p -
                        state_i.velocity * dt - 0.5 * gravity * dt * dt;

  Vec9 r;
  r.head<3>() = so3_log(corrected_rot.transpose() * Ri.transpose() * Rj);
  r.segment<3>(3) = Ri.transpose() * vel_term - corrected_vel;
  r.tail<3>() = Ri.transpose() * pos_term - corrected_pos;

  if (jac_i) {
    const Mat3 jr_inv = so3_right_jacobian_inv(r.head<3>());
    jac_i->setZero();
    jac_i->block<3, 3>(0, 0) = -jr_inv * Rj.transpose() * Ri;
    jac_i->block<3, 3>(0, 12) = -so3_left_jacobian_inv(r.head<3>()) *
                                so3_right_jacobian(rot_corr) *
                                delta.d_rot_d_bg();
    jac_i->block<3, 3>(3, 0) = skew(Ri.transpose() * vel_term);
    jac_i->block<3, 3>(3, 6) = -Ri.transpose();
    jac_i->block<3, 3>(3, 9) = -delta.d_vel_d_ba();
    jac_i->block<3, 3>(3, 12) = -delta.d_vel_d_bg();
    jac_i->block<3, 3>(6, 0) = skew(Ri.transpose() * pos_term);
    jac_i->block<3, 3>(6, 3) = -Mat3::Identity();
    jac_i->block<3, 3>(6, 6) = -Ri.transpose() * dt;
    jac_i->block<3, 3>(6, 9) = -delta.d_pos_d_ba();
    jac_i->block<3, 3>(6, 12) = -delta.d_pos_d_bg();
  }
  if (jac_j) {
    jac_j->setZero();
    jac_j->block<3, 3>(0, 0) = so3_right_jacobian_inv(r.head<3>());
    jac_j->block<3, 3>(3, 6) = Ri.transpose();
    jac_j->block<3, 3>(6, 3) = Ri.transpose() * Rj;
  }
  return r;
}

/// Relative-pose residual e = log(meas^{-1} * T_prev^{-1} * T_cur).
inline Vec6 lidar_residual(const LidarRelativePose& meas,
                           const NavState& state_prev,
                           const NavState& state_cur,
                           Mat615* jac_prev = nullptr,
                           Mat615* jac_cur = nullptr) {
  const Pose rel = compose(inverse(state_prev.pose), state_cur.pose);
  const Pose err = compose(inverse(meas.relative_transform), rel);
  const Vec6 e = se3_log(err);

  if (jac_prev || jac_cur) {
    const Mat6 jr_inv = se3_right_jacobian_inv(e);
    if (jac_cur) {
      jac_cur->setZero();
      jac_cur->block<6, 6>(0, 0) = jr_inv;
    }
    if (jac_prev) {
      jac_prev->setZero();
      jac_prev->block<6, 6>(0, 0) = -jr_inv * se3_adjoint(inverse(rel));
    }
  }
  return e;
}

/// Forward-velocity residual
/// e = s^x R_RI (R_WI^T v + (w - b_g) x p_R) - v_meas.
inline double radar_residual(const RadarVelocityFactorInput& input,
                             const NavState& state, const Extrinsics& ext,
                             Eigen::Matrix<double, 1, 15>* jac = nullptr) {
  const Rotation& R_ri = ext.imu_to_radar_rotation;
  const Vec3& p_r = ext.radar_position_in_imu;
  const Vec3 v_imu = state.pose.R.transpose() * state.velocity;
  const Vec3 w = input.angular_velocity_at_node - state.gyro_bias;
  const Vec3 v_radar = R_ri * (v_imu + w.cross(p_r));
  const double e = v_radar.x() - input.forward_velocity;

  if (jac) {
    jac->setZero();
    const Eigen::Matrix<double, 1, 3> s_Rri = R_ri.row(0);
    jac->block<1, 3>(0, 0) = s_Rri * skew(v_imu);
    jac->block<1, 3>(0, 6) = s_Rri * state.pose.R.transpose();
    jac->block<1, 3>(0, 12) = s_Rri * skew(p_r);
  }
  return e;
}

/// Huber influence weight: 1 inside the core, delta/|r| beyond.
inline double huber_weight(double residual_norm, double delta) {
  if (delta <= 0.0) throw std::invalid_argument("huber_weight: delta <= 0");
  const double a = std::abs(residual_norm);
  return a <= delta ? 1.0 : delta / a;
}

/// Huber cost of a whitened residual norm (for monotonicity checks).
inline double huber_cost(double residual_norm, double delta) {
  const double a = std::abs(residual_norm);
  if (a <= delta) return 0.5 * a * a;
  return delta * (a - 0.5 * delta);
}

}  // namespace rlio
