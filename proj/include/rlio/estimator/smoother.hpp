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
 * \file smoother.hpp
 * \brief Fixed-lag smoother driving the factor-graph window from event
 * streams.
 *
 * Graph nodes are created from the IMU stream at the configured node rate;
 * LiDAR and radar measurements attach to the nearest node by time (ties
 * toward the earlier node) once the covering node exists. Measurements that
 * fall behind the window tail are rejected as stale. Estimates are emitted
 * for the newest node after every update, giving a causal output stream at
 * the node rate.
 */

#pragma once

#include <optional>

#include "rlio/estimator/window.hpp"
#include "rlio/trajectory.hpp"

namespace rlio {

struct SmootherConfig {
  double node_rate = 100.0;  // Hz
  double lag = 1.5;          // s
  int max_iterations = 50;
  double step_tolerance = 1e-8;
  double huber_delta = 1.345;
  ImuNoise imu_noise;
  Extrinsics extrinsics;

  // Initial prior: [rot_xy, rot_z(yaw), position, velocity, b_a, b_g]
  double prior_sigma_rot_xy = 0.02;
  double prior_sigma_yaw = 1e-4;
  double prior_sigma_position = 1e-4;
  double prior_sigma_velocity = 0.02;
  double prior_sigma_accel_bias = 0.2;
  double prior_sigma_gyro_bias = 0.01;

  bool keep_update_log = false;  // retain per-update OptimizeResults
};

/// Outcome of attaching a non-IMU measurement.
enum class AttachStatus { kAttached, kPending, kStale, kDegenerate };

class FixedLagSmoother {
 public:
  explicit FixedLagSmoother(const SmootherConfig& config)
      : config_(config), window_(make_window_config(config)) {}

  /// Seeds the graph with the static-initialization result at time t0.
  void initialize(const StaticInitResult& init, double t0) {
    if (initialized_) throw std::runtime_error("smoother: already initialized");
    gravity_ = Vec3(0.0, 0.0, -init.gravity_magnitude);
    window_.config().gravity = gravity_;

    NavState s;
    s.pose = Pose(init.world_from_imu, Vec3::Zero());
    s.velocity = Vec3::Zero();
    s.accel_bias = Vec3::Zero();
    s.gyro_bias = init.gyro_bias;
    s.timestamp = t0;
    const auto id = window_.add_node(s);

    Vec15 sigmas;
    sigmas << config_.prior_sigma_rot_xy, config_.prior_sigma_rot_xy,
        config_.prior_sigma_yaw, config_.prior_sigma_position,
        config_.prior_sigma_position, config_.prior_sigma_position,
        config_.prior_sigma_velocity, config_.prior_sigma_velocity,
        config_.prior_sigma_velocity, config_.prior_sigma_accel_bias,
        config_.prior_sigma_accel_bias, config_.prior_sigma_accel_bias,
        config_.prior_sigma_gyro_bias, config_.prior_sigma_gyro_bias,
        config_.prior_sigma_gyro_bias;
    window_.add_diagonal_prior(id, sigmas);

    last_imu_time_ = t0;
    next_node_time_ = t0 + 1.0 / config_.node_rate;
    initialized_ = true;
    estimates_.push_back({s.timestamp, s.pose, s.velocity});
  }

  bool initialized() const { return initialized_; }

  /// Feeds one IMU sample; creates a node (and runs an update) whenever the
  /// stream crosses the next node time.
  void add_imu(const ImuMeasurement& m) {
    require_initialized();
    if (m.timestamp <= last_imu_time_)
      throw std::invalid_argument("smoother: IMU stream not sorted");
    last_imu_time_ = m.timestamp;
    imu_buffer_.push_back(m);
    if (m.timestamp + 1e-12 >= next_node_time_) create_node(m.timestamp);
  }

  AttachStatus add_lidar(const LidarRelativePose& meas) {
    require_initialized();
    if (meas.t_prev >= meas.t_cur)
      throw std::invalid_argument("smoother: lidar interval not ordered");
    if (meas.t_cur > window_.newest().state.timestamp) {
      pending_lidar_.push_back(meas);
      return AttachStatus::kPending;
    }
    return attach_lidar(meas);
  }

  AttachStatus add_radar(const RadarVelocityFactorInput& meas) {
    require_initialized();
    if (meas.timestamp > window_.newest().state.timestamp) {
      pending_radar_.push_back(meas);
      return AttachStatus::kPending;
    }
    return attach_radar(meas);
  }

  /// Causal estimate stream: the newest node after each update.
  const TrajectoryRecord& estimates() const { return estimates_; }

  const FactorGraphWindow& window() const { return window_; }

  int stale_count() const { return n_stale_; }
  int degenerate_count() const { return n_degenerate_; }
  int not_converged_count() const { return n_not_converged_; }

  /// Per-update results; filled only when config.keep_update_log is set.
  const std::vector<OptimizeResult>& update_log() const { return update_log_; }

 private:
  static FactorGraphWindow::Config make_window_config(
      const SmootherConfig& c) {
    FactorGraphWindow::Config wc;
    wc.lag = c.lag;
    wc.huber_delta = c.huber_delta;
    wc.extrinsics = c.extrinsics;
    wc.max_iterations = c.max_iterations;
    wc.step_tolerance = c.step_tolerance;
    wc.imu_noise = c.imu_noise;
    return wc;
  }

  void require_initialized() const {
    if (!initialized_)
      throw std::runtime_error("smoother: initialize() must be called first");
  }

  void create_node(double t) {
    const auto& prev = window_.newest();
    const PreintegratedImuDelta delta = preintegrate(
        imu_buffer_, prev.state.bias(), t, config_.imu_noise);

    // IMU-predicted initial guess.
    const double dt = delta.duration;
    NavState s;
    s.pose.R = prev.state.pose.R * delta.delta_rotation;
    s.velocity =
        prev.state.velocity + gravity_ * dt + prev.state.pose.R * delta.delta_velocity;
    s.pose.p = prev.state.pose.p + prev.state.velocity * dt +
               0.5 * gravity_ * dt * dt + prev.state.pose.R * delta.delta_position;
    s.accel_bias = prev.state.accel_bias;
    s.gyro_bias = prev.state.gyro_bias;
    s.timestamp = t;

    const auto prev_id = prev.id;
    const auto id = window_.add_node(s);
    window_.add_imu_factor(prev_id, id, delta);

    // The sample at the node time opens the next integration interval.
    const ImuMeasurement last = imu_buffer_.back();
    imu_buffer_.clear();
    imu_buffer_.push_back(last);
    next_node_time_ += 1.0 / config_.node_rate;

    flush_pending();
    window_.marginalize_old();
    const OptimizeResult r = window_.optimize();
    if (!r.converged) ++n_not_converged_;
    if (config_.keep_update_log) update_log_.push_back(r);

    const auto& newest = window_.newest().state;
    estimates_.push_back({newest.timestamp, newest.pose, newest.velocity});
  }

  void flush_pending() {
    const double newest_t = window_.newest().state.timestamp;
    for (auto it = pending_lidar_.begin(); it != pending_lidar_.end();) {
      if (it->t_cur <= newest_t) {
        attach_lidar(*it);
        it = pending_lidar_.erase(it);
      } else {
        ++it;
      }
    }
    for (auto it = pending_radar_.begin(); it != pending_radar_.end();) {
      if (it->timestamp <= newest_t) {
        attach_radar(*it);
        it = pending_radar_.erase(it);
      } else {
        ++it;
      }
    }
  }

  AttachStatus attach_lidar(const LidarRelativePose& meas) {
    if (meas.t_prev < window_.oldest().state.timestamp) {
      ++n_stale_;
      return AttachStatus::kStale;
    }
    const auto id_prev = window_.nearest_node(meas.t_prev);
    const auto id_cur = window_.nearest_node(meas.t_cur);
    if (id_prev == id_cur) {
      ++n_degenerate_;
      return AttachStatus::kDegenerate;
    }
    window_.add_lidar_factor(id_prev, id_cur, meas);
    return AttachStatus::kAttached;
  }

  AttachStatus attach_radar(const RadarVelocityFactorInput& meas) {
    if (meas.timestamp < window_.oldest().state.timestamp) {
      ++n_stale_;
      return AttachStatus::kStale;
    }
    window_.add_radar_factor(window_.nearest_node(meas.timestamp), meas);
    return AttachStatus::kAttached;
  }

  SmootherConfig config_;
  FactorGraphWindow window_;
  Vec3 gravity_ = Vec3(0.0, 0.0, -9.80665);
  bool initialized_ = false;
  double last_imu_time_ = 0.0;
  double next_node_time_ = 0.0;
  std::vector<ImuMeasurement> imu_buffer_;
  std::vector<LidarRelativePose> pending_lidar_;
  std::vector<RadarVelocityFactorInput> pending_radar_;
  TrajectoryRecord estimates_;
  std::vector<OptimizeResult> update_log_;
  int n_stale_ = 0;
  int n_degenerate_ = 0;
  int n_not_converged_ = 0;
};

/// Initialization parameters for an ingest run. Modalities are selected by
/// what the caller feeds in; an empty stream disables that sensor.
struct IngestOptions {
  double init_duration = 1.0;       // s of static IMU data consumed at start
  double init_variance_gate = 0.5;  // accel variance threshold
};

struct IngestResult {
  TrajectoryRecord estimates;
  int n_stale = 0;
  int n_degenerate = 0;
  int n_not_converged = 0;
  StaticInitResult init;
};

namespace detail {

template <typename T, typename F>
void check_sorted(const std::vector<T>& v, F time_of, const char* name) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (time_of(v[i]) <= time_of(v[i - 1]))
      throw std::invalid_argument(std::string("ingest: unsorted ") + name +
                                  " stream");
}

}  // namespace detail

/// Deterministic replay of event-ordered sensor streams through the
/// fixed-lag smoother. Equal-timestamp events are processed IMU first,
/// then LiDAR, then radar.
inline IngestResult ingest(const std::vector<ImuMeasurement>& imu,
                           const std::vector<LidarRelativePose>& lidar,
                           const std::vector<RadarVelocityFactorInput>& radar,
                           const SmootherConfig& config,
                           const IngestOptions& options = IngestOptions{}) {
  detail::check_sorted(imu, [](const auto& m) { return m.timestamp; }, "IMU");
  detail::check_sorted(lidar, [](const auto& m) { return m.t_cur; }, "LiDAR");
  detail::check_sorted(radar, [](const auto& m) { return m.timestamp; },
                       "radar");
  if (imu.empty()) throw std::invalid_argument("ingest: empty IMU stream");

  // Static initialization window.
  const double t_begin = imu.front().timestamp;
  std::vector<ImuMeasurement> init_buffer;
  std::size_t imu_start = 0;
  while (imu_start < imu.size() &&
         imu[imu_start].timestamp <= t_begin + options.init_duration)
    init_buffer.push_back(imu[imu_start++]);
  const StaticInitResult init = static_initialize(
      init_buffer, options.init_duration, options.init_variance_gate);

  FixedLagSmoother smoother(config);
  const double t0 = init_buffer.back().timestamp;
  smoother.initialize(init, t0);

  std::size_t li = 0, ri = 0;
  // Skip measurements that end before the first node.
  while (li < lidar.size() && lidar[li].t_cur <= t0) ++li;
  while (ri < radar.size() && radar[ri].timestamp <= t0) ++ri;

  for (std::size_t k = imu_start; k < imu.size(); ++k) {
    const double t = imu[k].timestamp;
    while (li < lidar.size() && lidar[li].t_cur < t)
      smoother.add_lidar(lidar[li++]);
    while (ri < radar.size() && radar[ri].timestamp < t)
      smoother.add_radar(radar[ri++]);
    smoother.add_imu(imu[k]);
  }
  while (li < lidar.size()) smoother.add_lidar(lidar[li++]);
  while (ri < radar.size()) smoother.add_radar(radar[ri++]);

  IngestResult out;
  out.estimates = smoother.estimates();
  out.n_stale = smoother.stale_count();
  out.n_degenerate = smoother.degenerate_count();
  out.n_not_converged = smoother.not_converged_count();
  out.init = init;
  return out;
}

}  // namespace rlio
