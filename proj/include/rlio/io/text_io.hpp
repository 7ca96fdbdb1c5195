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
 * \file text_io.hpp
 * \brief Delimited-text stream formats and the metric report format.
 *
 * All files are space-delimited with a single '#'-prefixed header naming the
 * columns; numbers are written with 17 significant digits so that re-reading
 * reproduces the doubles bit-exactly. Rotations are stored as unit
 * quaternions (qw qx qy qz, qw >= 0).
 */

#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rlio/estimator/factors.hpp"
#include "rlio/eval/metrics.hpp"
#include "rlio/imu/preintegration.hpp"
#include "rlio/radar/doppler.hpp"
#include "rlio/trajectory.hpp"

namespace rlio {

namespace detail {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return is;
}

inline Eigen::Vector4d quaternion_of(const Rotation& R) {
  Eigen::Quaterniond q(R);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;
  return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
}

inline Rotation rotation_of(double qw, double qx, double qy, double qz) {
  Eigen::Quaterniond q(qw, qx, qy, qz);
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// trajectories: t px py pz qw qx qy qz vx vy vz

inline void write_trajectory(const std::string& path,
                             const TrajectoryRecord& traj) {
  auto os = detail::open_out(path);
  os << "# t px py pz qw qx qy qz vx vy vz\n";
  for (const auto& s : traj) {
    const Eigen::Vector4d q = detail::quaternion_of(s.pose.R);
    os << detail::fmt(s.timestamp) << ' ' << detail::fmt(s.pose.p.x()) << ' '
       << detail::fmt(s.pose.p.y()) << ' ' << detail::fmt(s.pose.p.z()) << ' '
       << detail::fmt(q[0]) << ' ' << detail::fmt(q[1]) << ' '
       << detail::fmt(q[2]) << ' ' << detail::fmt(q[3]) << ' '
       << detail::fmt(s.velocity.x()) << ' ' << detail::fmt(s.velocity.y())
       << ' ' << detail::fmt(s.velocity.z()) << '\n';
  }
}

inline TrajectoryRecord read_trajectory(const std::string& path) {
  auto is = detail::open_in(path);
  TrajectoryRecord out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double t, px, py, pz, qw, qx, qy, qz, vx, vy, vz;
    if (!(ss >> t >> px >> py >> pz >> qw >> qx >> qy >> qz >> vx >> vy >> vz))
      throw std::runtime_error("trajectory file: bad line in " + path);
    TrajectorySample s;
    s.timestamp = t;
    s.pose = Pose(detail::rotation_of(qw, qx, qy, qz), Vec3(px, py, pz));
    s.velocity = Vec3(vx, vy, vz);
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// IMU: t wx wy wz ax ay az

inline void write_imu(const std::string& path,
                      const std::vector<ImuMeasurement>& stream) {
  auto os = detail::open_out(path);
  os << "# t wx wy wz ax ay az  (rad/s, m/s^2)\n";
  for (const auto& m : stream) {
    os << detail::fmt(m.timestamp);
    for (int i = 0; i < 3; ++i) os << ' ' << detail::fmt(m.angular_velocity[i]);
    for (int i = 0; i < 3; ++i) os << ' ' << detail::fmt(m.specific_force[i]);
    os << '\n';
  }
}

inline std::vector<ImuMeasurement> read_imu(const std::string& path) {
  auto is = detail::open_in(path);
  std::vector<ImuMeasurement> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    ImuMeasurement m;
    if (!(ss >> m.timestamp >> m.angular_velocity.x() >>
          m.angular_velocity.y() >> m.angular_velocity.z() >>
          m.specific_force.x() >> m.specific_force.y() >>
          m.specific_force.z()))
      throw std::runtime_error("imu file: bad line in " + path);
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// LiDAR relative poses: t_prev t_cur px py pz qw qx qy qz sigma_rot sigma_trans

inline void write_lidar(const std::string& path,
                        const std::vector<LidarRelativePose>& stream) {
  auto os = detail::open_out(path);
  os << "# t_prev t_cur px py pz qw qx qy qz sigma_rot sigma_trans\n";
  for (const auto& m : stream) {
    const Eigen::Vector4d q = detail::quaternion_of(m.relative_transform.R);
    const double sr = std::sqrt(m.covariance(0, 0));
    const double st = std::sqrt(m.covariance(3, 3));
    os << detail::fmt(m.t_prev) << ' ' << detail::fmt(m.t_cur) << ' '
       << detail::fmt(m.relative_transform.p.x()) << ' '
       << detail::fmt(m.relative_transform.p.y()) << ' '
       << detail::fmt(m.relative_transform.p.z()) << ' ' << detail::fmt(q[0])
       << ' ' << detail::fmt(q[1]) << ' ' << detail::fmt(q[2]) << ' '
       << detail::fmt(q[3]) << ' ' << detail::fmt(sr) << ' '
       << detail::fmt(st) << '\n';
  }
}

inline std::vector<LidarRelativePose> read_lidar(const std::string& path) {
  auto is = detail::open_in(path);
  std::vector<LidarRelativePose> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double t0, t1, px, py, pz, qw, qx, qy, qz, sr, st;
    if (!(ss >> t0 >> t1 >> px >> py >> pz >> qw >> qx >> qy >> qz >> sr >> st))
      throw std::runtime_error("lidar file: bad line in " + path);
    LidarRelativePose m;
    m.t_prev = t0;
    m.t_cur = t1;
    m.relative_transform =
        Pose(detail::rotation_of(qw, qx, qy, qz), Vec3(px, py, pz));
    m.covariance = Mat6::Identity();
    m.covariance.topLeftCorner<3, 3>() *= sr * sr;
    m.covariance.bottomRightCorner<3, 3>() *= st * st;
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Doppler measurements: t azimuth elevation radial_speed n_votes forward_vel

inline void write_doppler(const std::string& path,
                          const std::vector<DopplerMeasurement>& stream) {
  auto os = detail::open_out(path);
  os << "# t azimuth_deg elevation_deg radial_speed_mps n_votes "
        "forward_velocity_mps\n";
  for (const auto& m : stream) {
    os << detail::fmt(m.timestamp) << ' ' << detail::fmt(m.azimuth) << ' '
       << detail::fmt(m.elevation) << ' ' << detail::fmt(m.radial_speed) << ' '
       << m.n_votes << ' ' << detail::fmt(doppler_to_forward_velocity(m))
       << '\n';
  }
}

// ---------------------------------------------------------------------------
// Per-sample error series: t error

inline void write_series(const std::string& path, const MetricSeries& series,
                         const std::string& value_name) {
  auto os = detail::open_out(path);
  os << "# t " << value_name << '\n';
  for (std::size_t i = 0; i < series.errors.size(); ++i)
    os << detail::fmt(series.timestamps[i]) << ' '
       << detail::fmt(series.errors[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Metric reports: "key: value" lines with fixed key names.

inline void write_metric_report(const std::string& path,
                                const MetricReport& r) {
  auto os = detail::open_out(path);
  os << "method: " << r.method << '\n';
  os << "rpe_rmse: " << detail::fmt(r.rpe_rmse) << '\n';
  os << "rpe_std: " << detail::fmt(r.rpe_std) << '\n';
  os << "vel_rmse: " << detail::fmt(r.vel_rmse) << '\n';
  os << "vel_std: " << detail::fmt(r.vel_std) << '\n';
  os << "rpe_samples: " << r.rpe_samples << '\n';
  os << "vel_samples: " << r.vel_samples << '\n';
}

inline MetricReport read_metric_report(const std::string& path) {
  auto is = detail::open_in(path);
  MetricReport r;
  std::string line;
  bool saw_any = false;
  while (std::getline(is, line)) {
    const auto colon = line.find(':');
    if (colon == std::string::npos) continue;
    const std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    value.erase(0, value.find_first_not_of(' '));
    saw_any = true;
    if (key == "method")
      r.method = value;
    else if (key == "rpe_rmse")
      r.rpe_rmse = std::stod(value);
    else if (key == "rpe_std")
      r.rpe_std = std::stod(value);
    else if (key == "vel_rmse")
      r.vel_rmse = std::stod(value);
    else if (key == "vel_std")
      r.vel_std = std::stod(value);
    else if (key == "rpe_samples")
      r.rpe_samples = static_cast<std::size_t>(std::stoull(value));
    else if (key == "vel_samples")
      r.vel_samples = static_cast<std::size_t>(std::stoull(value));
    else
      throw std::runtime_error("metric report: unknown key '" + key + "' in " +
                               path);
  }
  if (!saw_any) throw std::runtime_error("metric report: empty file " + path);
  return r;
}

}  // namespace rlio
