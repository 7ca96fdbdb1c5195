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
 * \file geometry.hpp
 * \brief Minimal SO(3)/SE(3) toolkit: hat/vee, exp/log, Jacobians, pose algebra.
 *
 * Conventions used throughout the project:
 *  - SE(3) tangents are ordered [rotation; translation].
 *  - Small-angle branches switch to 2nd-order Taylor series below 1e-8 rad.
 *  - so3_log at angle pi returns the axis whose first nonzero component is
 *    positive.
 */

#pragma once

#include <Eigen/Dense>

#include <cmath>

namespace rlio {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using Rotation = Eigen::Matrix3d;

inline constexpr double kSmallAngle = 1e-8;

/// Skew-symmetric matrix such that skew(v) * w == v.cross(w).
inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),  //
      v.z(), 0.0, -v.x(),   //
      -v.y(), v.x(), 0.0;
  return m;
}

/// Inverse of skew for antisymmetric matrices.
inline Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

namespace detail {

// sin(t)/t with Taylor fallback.
inline double sinc(double t) {
  if (std::abs(t) < kSmallAngle) return 1.0 - t * t / 6.0;
  return std::sin(t) / t;
}

// (1 - cos(t)) / t^2
inline double cosc(double t) {
  if (std::abs(t) < kSmallAngle) return 0.5 - t * t / 24.0;
  return (1.0 - std::cos(t)) / (t * t);
}

// (t - sin(t)) / t^3
inline double sinc3(double t) {
  if (std::abs(t) < 1e-4) return 1.0 / 6.0 - t * t / 120.0;
  return (t - std::sin(t)) / (t * t * t);
}

// (1 - (t/2) cot(t/2)) / t^2, the coefficient of skew^2 in Jl^{-1}.
inline double jl_inv_coeff(double t) {
  if (std::abs(t) < 1e-4) return 1.0 / 12.0 + t * t / 720.0;
  const double half = 0.5 * t;
  return (1.0 - half * std::cos(half) / std::sin(half)) / (t * t);
}

}  // namespace detail

/// Rodrigues formula.
inline Rotation so3_exp(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  return Mat3::Identity() + detail::sinc(theta) * W +
         detail::cosc(theta) * W * W;
}

/// Logarithm of a rotation matrix; |result| <= pi.
inline Vec3 so3_log(const Rotation& R) {
  const double cos_theta =
      std::min(1.0, std::max(-1.0, (R.trace() - 1.0) * 0.5));
  const double theta = std::acos(cos_theta);
  const Vec3 half_vee = 0.5 * vee(R - R.transpose());  // == sin(theta) * axis

  if (theta < kSmallAngle) {
    return (1.0 + theta * theta / 6.0) * half_vee;
  }
  if (theta > M_PI - 1e-6) {
    // Near pi the antisymmetric part vanishes; recover the axis from R + I,
    // whose columns are proportional to the axis.
    const Mat3 B = R + Mat3::Identity();
    int k = 0;
    B.colwise().norm().maxCoeff(&k);
    Vec3 axis = B.col(k).normalized();
    if (half_vee.norm() > 1e-9) {
      if (axis.dot(half_vee) < 0.0) axis = -axis;
    } else {
      // Angle is pi up to noise: sign convention, first nonzero component
      // positive.
      for (int i = 0; i < 3; ++i) {
        if (std::abs(axis[i]) > 1e-12) {
          if (axis[i] < 0.0) axis = -axis;
          break;
        }
      }
    }
    return theta * axis;
  }
  return (theta / std::sin(theta)) * half_vee;
}

/// Left Jacobian of SO(3); equals the "V" matrix of the SE(3) exponential.
inline Mat3 so3_left_jacobian(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  return Mat3::Identity() + detail::cosc(theta) * W +
         detail::sinc3(theta) * W * W;
}

inline Mat3 so3_left_jacobian_inv(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 W = skew(w);
  return Mat3::Identity() - 0.5 * W + detail::jl_inv_coeff(theta) * W * W;
}

inline Mat3 so3_right_jacobian(const Vec3& w) { return so3_left_jacobian(-w); }

inline Mat3 so3_right_jacobian_inv(const Vec3& w) {
  return so3_left_jacobian_inv(-w);
}

/// Rigid transform: rotation plus translation, acting as x -> R x + p.
struct Pose {
  Rotation R = Rotation::Identity();
  Vec3 p = Vec3::Zero();

  Pose() = default;
  Pose(const Rotation& rotation, const Vec3& translation)
      : R(rotation), p(translation) {}

  static Pose Identity() { return Pose(); }

  Vec3 act(const Vec3& x) const { return R * x + p; }
};

inline Pose compose(const Pose& a, const Pose& b) {
  return Pose(a.R * b.R, a.p + a.R * b.p);
}

inline Pose inverse(const Pose& t) {
  return Pose(t.R.transpose(), -(t.R.transpose() * t.p));
}

/// SE(3) exponential; tangent ordered [rotation; translation].
inline Pose se3_exp(const Vec6& xi) {
  const Vec3 phi = xi.head<3>();
  const Vec3 rho = xi.tail<3>();
  return Pose(so3_exp(phi), so3_left_jacobian(phi) * rho);
}

inline Vec6 se3_log(const Pose& t) {
  Vec6 xi;
  const Vec3 phi = so3_log(t.R);
  xi.head<3>() = phi;
  xi.tail<3>() = so3_left_jacobian_inv(phi) * t.p;
  return xi;
}

/// Adjoint of SE(3) with [rotation; translation] ordering.
inline Mat6 se3_adjoint(const Pose& t) {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = t.R;
  ad.bottomRightCorner<3, 3>() = t.R;
  ad.bottomLeftCorner<3, 3>() = skew(t.p) * t.R;
  return ad;
}

namespace detail {

// Barfoot's Q matrix, the translation-rotation coupling block of the SE(3)
// left Jacobian.
inline Mat3 se3_q_matrix(const Vec3& phi, const Vec3& rho) {
  const double theta = phi.norm();
  const Mat3 P = skew(phi);
  const Mat3 Rho = skew(rho);
  const double t2 = theta * theta;

  double q1, q2, q3;
  if (theta < 1e-4) {
    q1 = 1.0 / 6.0 - t2 / 120.0;            // (t - sin t)/t^3
    q2 = -1.0 / 24.0 + t2 / 720.0;          // (1 - t^2/2 - cos t)/t^4
    q3 = -1.0 / 120.0 + t2 / 5040.0;        // (t - sin t - t^3/6)/t^5
  } else {
    const double t3 = t2 * theta;
    q1 = (theta - std::sin(theta)) / t3;
    q2 = (1.0 - 0.5 * t2 - std::cos(theta)) / (t3 * theta);
    q3 = (theta - std::sin(theta) - t3 / 6.0) / (t3 * t2);
  }

  const Mat3 PR = P * Rho;
  const Mat3 RP = Rho * P;
  const Mat3 PRP = PR * P;
  return 0.5 * Rho + q1 * (PR + RP + PRP) - q2 * (P * PR + RP * P - 3.0 * PRP) -
         0.5 * (q2 - 3.0 * q3) * (PRP * P + P * PRP);
}

}  // namespace detail

/// Inverse left Jacobian of SE(3): log(se3_exp(d) * se3_exp(xi)) ~=
/// xi + se3_left_jacobian_inv(xi) * d for small d.
inline Mat6 se3_left_jacobian_inv(const Vec6& xi) {
  const Vec3 phi = xi.head<3>();
  const Vec3 rho = xi.tail<3>();
  const Mat3 jli = so3_left_jacobian_inv(phi);
  const Mat3 q = detail::se3_q_matrix(phi, rho);
  Mat6 out = Mat6::Zero();
  out.topLeftCorner<3, 3>() = jli;
  out.bottomRightCorner<3, 3>() = jli;
  out.bottomLeftCorner<3, 3>() = -jli * q * jli;
  return out;
}

inline Mat6 se3_right_jacobian_inv(const Vec6& xi) {
  return se3_left_jacobian_inv(-xi);
}

/// Geodesic interpolation from a (s=0) to b (s=1).
inline Pose pose_interpolate(const Pose& a, const Pose& b, double s) {
  return compose(a, se3_exp(s * se3_log(compose(inverse(a), b))));
}

inline bool is_valid_rotation(const Rotation& R, double tol = 1e-9) {
  return (R.transpose() * R - Mat3::Identity()).cwiseAbs().maxCoeff() < tol &&
         std::abs(R.determinant() - 1.0) < tol;
}

}  // namespace rlio
