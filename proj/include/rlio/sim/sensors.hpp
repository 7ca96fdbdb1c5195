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
 * \file sensors.hpp
 * \brief Seed-deterministic synthetic IMU, LiDAR-odometry and radar beams.
 */

#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rlio/estimator/factors.hpp"
#include "rlio/imu/preintegration.hpp"
#include "rlio/radar/waveform.hpp"
#include "rlio/rng.hpp"
#include "rlio/sim/trajectory_profile.hpp"

namespace rlio {

/// LiDAR-withholding windows (start, end) in seconds.
struct DropoutSchedule {
  std::vector<std::pair<double, double>> windows;

  void validate(double duration) const {
    double last_end = -1.0;
    for (const auto& [start, end] : windows) {
      if (start >= end)
        throw std::invalid_argument("dropout: window start >= end");
      if (start < last_end)
        throw std::invalid_argument("dropout: windows overlap");
      if (end > duration)
        throw std::invalid_argument("dropout: window beyond duration");
      last_end = end;
    }
  }

  bool contains(double t) const {
    for (const auto& [start, end] : windows)
      if (t > start && t <= end) return true;
    return false;
  }
};

struct ImuSimParams {
  double rate_hz = 400.0;
  ImuNoise noise;                  // densities; zero for noise-free streams
  Vec3 accel_bias = Vec3::Zero();  // true biases baked into the stream
  Vec3 gyro_bias = Vec3::Zero();
  double gravity = 9.80665;
  bool add_noise = true;
};

/// Samples specific force / angular rate along the profile.
inline std::vector<ImuMeasurement> simulate_imu(const TrajectoryProfile& profile,
                                                const ImuSimParams& params,
                                                std::uint64_t seed) {
  Rng rng(Rng::derive(seed, 0x1347));
  const Vec3 gravity_w(0.0, 0.0, -params.gravity);
  const double dt = 1.0 / params.rate_hz;
  const double sg = params.noise.gyro_noise_density * std::sqrt(params.rate_hz);
  const double sa = params.noise.accel_noise_density * std::sqrt(params.rate_hz);

  std::vector<ImuMeasurement> out;
  const long n = static_cast<long>(std::floor(profile.total_duration() / dt));
  out.reserve(static_cast<std::size_t>(n) + 1);
  for (long k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt;
    const Rotation R = profile.pose_at(t).R;
    ImuMeasurement m;
    m.timestamp = t;
    m.angular_velocity = profile.angular_rate_at(t) + params.gyro_bias;
    m.specific_force =
        R.transpose() * (profile.acceleration_at(t) - gravity_w) +
        params.accel_bias;
    if (params.add_noise) {
      m.angular_velocity += sg * rng.normal3();
      m.specific_force += sa * rng.normal3();
    }
    out.push_back(m);
  }
  return out;
}

struct LidarSimParams {
  double rate_hz = 10.0;
  double sigma_rotation = 0.005;   // rad, per tangent axis
  double sigma_translation = 0.02; // m, per axis
};

/// Relative IMU-frame poses between consecutive samples, with tangent-space
/// Gaussian noise; measurements whose end time falls in a dropout window are
/// omitted.
inline std::vector<LidarRelativePose> simulate_lidar_odometry(
    const TrajectoryProfile& profile, const LidarSimParams& params,
    const DropoutSchedule& schedule, std::uint64_t seed) {
  schedule.validate(profile.total_duration());
  Rng rng(Rng::derive(seed, 0x71d4));
  const double dt = 1.0 / params.rate_hz;

  Mat6 cov = Mat6::Identity();
  cov.topLeftCorner<3, 3>() *= params.sigma_rotation * params.sigma_rotation;
  cov.bottomRightCorner<3, 3>() *=
      params.sigma_translation * params.sigma_translation;

  std::vector<LidarRelativePose> out;
  const long n = static_cast<long>(std::floor(profile.total_duration() / dt));
  for (long k = 1; k <= n; ++k) {
    const double t0 = static_cast<double>(k - 1) * dt;
    const double t1 = static_cast<double>(k) * dt;
    // Draw noise unconditionally to keep the stream seed-stable under
    // different dropout schedules.
    Vec6 eta;
    eta.head<3>() = params.sigma_rotation * rng.normal3();
    eta.tail<3>() = params.sigma_translation * rng.normal3();
    if (schedule.contains(t1)) continue;

    LidarRelativePose m;
    m.relative_transform = compose(
        compose(inverse(profile.pose_at(t0)), profile.pose_at(t1)),
        se3_exp(eta));
    m.covariance = cov;
    m.t_prev = t0;
    m.t_cur = t1;
    out.push_back(m);
  }
  return out;
}

/// Static world targets plus the interference level for RD-map synthesis.
struct SceneModel {
  std::vector<Vec3> target_positions;    // world frame
  std::vector<double> target_reflectivity;  // linear power deposited
  double noise_power = 1.0;              // exponential interference mean

  void validate() const {
    if (target_positions.size() != target_reflectivity.size())
      throw std::invalid_argument("scene: positions/reflectivity mismatch");
    for (double r : target_reflectivity)
      if (r <= 0.0) throw std::invalid_argument("scene: reflectivity <= 0");
  }

  void add_target(const Vec3& position, double reflectivity) {
    target_positions.push_back(position);
    target_reflectivity.push_back(reflectivity);
  }
};

/// Scatters low-height static returns over the region the trajectory sweeps,
/// emulating ground reflections and roadside objects.
inline SceneModel make_scattered_scene(const TrajectoryProfile& profile,
                                       int n_points, double margin,
                                       double z_min, double z_max,
                                       double reflectivity, double noise_power,
                                       std::uint64_t seed) {
  double x_min = 1e18, x_max = -1e18, y_min = 1e18, y_max = -1e18;
  for (double t = 0.0; t <= profile.total_duration(); t += 0.25) {
    const Vec3 p = profile.sample(t).position;
    x_min = std::min(x_min, p.x());
    x_max = std::max(x_max, p.x());
    y_min = std::min(y_min, p.y());
    y_max = std::max(y_max, p.y());
  }
  SceneModel scene;
  scene.noise_power = noise_power;
  Rng rng(Rng::derive(seed, 0x5cee));
  for (int k = 0; k < n_points; ++k) {
    scene.add_target(Vec3(rng.uniform(x_min - margin, x_max + margin),
                          rng.uniform(y_min - margin, y_max + margin),
                          rng.uniform(z_min, z_max)),
                     reflectivity);
  }
  return scene;
}

/// Ego state consumed by the radar simulator.
struct RadarEgoState {
  Pose world_from_imu;
  Vec3 velocity_world = Vec3::Zero();
  Vec3 angular_rate_body = Vec3::Zero();
};

/// Synthesizes the 12 range-doppler pixels of one beam. Every visible target
/// deposits power at its (range, doppler) cell with a one-bin spread, and
/// exponential interference is added everywhere.
inline BeamMeasurement simulate_radar_beam(const RadarEgoState& ego,
                                           const SceneModel& scene,
                                           const WaveformConfig& waveform,
                                           const Extrinsics& extrinsics,
                                           double center_az_deg,
                                           double center_el_deg, double t,
                                           Rng& rng) {
  scene.validate();
  waveform.validate();
  BeamMeasurement beam =
      BeamMeasurement::make(waveform, center_az_deg, center_el_deg, t);

  const Rotation& R_ri = extrinsics.imu_to_radar_rotation;
  const Vec3& p_r = extrinsics.radar_position_in_imu;
  const Rotation R_wi = ego.world_from_imu.R;
  const Vec3 v_radar =
      R_ri * (R_wi.transpose() * ego.velocity_world +
              ego.angular_rate_body.cross(p_r));

  constexpr double kDeg = M_PI / 180.0;
  const double az0 = center_az_deg - 2.0;   // beam spans 4 deg of azimuth
  const double el0 = center_el_deg - 3.75;  // and 7.5 deg of elevation

  for (std::size_t k = 0; k < scene.target_positions.size(); ++k) {
    const Vec3 q_imu =
        R_wi.transpose() * (scene.target_positions[k] - ego.world_from_imu.p);
    const Vec3 q = R_ri * (q_imu - p_r);
    const double range = q.norm();
    if (range < 1e-3 || range > waveform.max_range) continue;

    const double az = std::atan2(q.y(), q.x()) / kDeg;
    const double el = std::asin(q.z() / range) / kDeg;
    const int pixel_col = static_cast<int>(std::floor((az - az0) / 1.0));
    const int pixel_row = static_cast<int>(std::floor((el - el0) / 2.5));
    if (pixel_col < 0 || pixel_col >= BeamMeasurement::kPixelCols ||
        pixel_row < 0 || pixel_row >= BeamMeasurement::kPixelRows)
      continue;

    const double doppler = -(q / range).dot(v_radar);
    if (std::abs(doppler) > waveform.max_doppler) continue;

    const int row = range_to_bin(range, waveform);
    const int col = doppler_to_bin(doppler, waveform);
    RangeDopplerMap& px = beam.pixel(pixel_row, pixel_col);
    const double power = scene.target_reflectivity[k];
    const auto deposit = [&](int r, int c, double p) {
      if (r >= 0 && r < px.rows() && c >= 0 && c < px.cols()) px.at(r, c) += p;
    };
    deposit(row, col, power);
    deposit(row - 1, col, 0.5 * power);
    deposit(row + 1, col, 0.5 * power);
    deposit(row, col - 1, 0.5 * power);
    deposit(row, col + 1, 0.5 * power);
  }

  for (auto& px : beam.pixels)
    for (auto& cell : px.intensities) cell += rng.exponential(scene.noise_power);

  return beam;
}

/// Beam sweep pattern: azimuths cycled left to right at a fixed elevation.
struct SweepConfig {
  double az_min_deg = -40.0;
  double az_max_deg = 40.0;
  double az_step_deg = 10.0;
  double elevation_deg = -2.5;
  double beam_period = 0.0158;  // s between emitted beams
  double t_start = 0.0;
  double t_end = 0.0;  // <= t_start means "whole profile"

  std::vector<double> azimuths() const {
    std::vector<double> out;
    for (double az = az_min_deg; az <= az_max_deg + 1e-9; az += az_step_deg)
      out.push_back(az);
    return out;
  }
};

/// Emits beams at the sweep cadence over the profile; each beam carries its
/// own sample time and a seed derived from (seed, beam index).
inline std::vector<BeamMeasurement> sweep_beams(const TrajectoryProfile& profile,
                                                const SceneModel& scene,
                                                const WaveformConfig& waveform,
                                                const Extrinsics& extrinsics,
                                                const SweepConfig& sweep,
                                                std::uint64_t seed) {
  if (sweep.beam_period < waveform.beam_sampling_time - 1e-12)
    throw std::invalid_argument("sweep: beam period below beam sampling time");
  const double t_end =
      sweep.t_end > sweep.t_start ? sweep.t_end : profile.total_duration();
  const std::vector<double> azimuths = sweep.azimuths();

  std::vector<BeamMeasurement> out;
  std::size_t index = 0;
  while (true) {
    const double t =
        sweep.t_start + static_cast<double>(index) * sweep.beam_period;
    if (t > t_end + 1e-9) break;
    RadarEgoState ego;
    ego.world_from_imu = profile.pose_at(t);
    ego.velocity_world = profile.velocity_at(t);
    ego.angular_rate_body = profile.angular_rate_at(t);
    Rng rng(Rng::derive(seed, 0xbea0 + index));
    out.push_back(simulate_radar_beam(ego, scene, waveform, extrinsics,
                                      azimuths[index % azimuths.size()],
                                      sweep.elevation_deg, t, rng));
    ++index;
  }
  return out;
}

}  // namespace rlio
