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
 * \file metrics.hpp
 * \brief Trajectory metrics: relative pose error over a path-length delta and
 * body-frame velocity error.
 *
 * The RPE entry for index i pairs it with the first sample at least `delta`
 * meters further along the ground-truth path; the error is the full SE(3)
 * log-norm of the discrepancy between the true and estimated relative
 * transforms (mixed rad + m, reported unitless). Estimates are resampled
 * onto the ground-truth timestamps first (pose: tangent-space linear,
 * velocity: linear).
 */

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "rlio/trajectory.hpp"

namespace rlio {

/// Summary statistics plus the per-sample error series.
struct MetricSeries {
  double rmse = 0.0;
  double stddev = 0.0;  // population standard deviation of the errors
  std::vector<double> timestamps;
  std::vector<double> errors;
  std::size_t count() const { return errors.size(); }
};

namespace detail {

inline void finalize_stats(MetricSeries* s) {
  if (s->errors.empty()) return;
  double sum = 0.0, sum_sq = 0.0;
  for (double e : s->errors) {
    sum += e;
    sum_sq += e * e;
  }
  const double n = static_cast<double>(s->errors.size());
  const double mean = sum / n;
  s->rmse = std::sqrt(sum_sq / n);
  s->stddev = std::sqrt(std::max(0.0, sum_sq / n - mean * mean));
}

}  // namespace detail

/// Resamples `traj` at time t; nullopt outside the record's span.
inline std::optional<TrajectorySample> interpolate_at(
    const TrajectoryRecord& traj, double t) {
  if (traj.empty() || t < traj.front().timestamp - 1e-9 ||
      t > traj.back().timestamp + 1e-9)
    return std::nullopt;
  std::size_t lo = 0, hi = traj.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (traj[mid].timestamp < t)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == 0) return traj.front();
  if (lo == traj.size()) return traj.back();
  const auto& a = traj[lo - 1];
  const auto& b = traj[lo];
  const double s = (t - a.timestamp) / (b.timestamp - a.timestamp);
  TrajectorySample out;
  out.timestamp = t;
  out.pose = pose_interpolate(a.pose, b.pose, s);
  out.velocity = (1.0 - s) * a.velocity + s * b.velocity;
  return out;
}

/// Estimate resampled onto the ground-truth timestamps (overlap only).
inline std::pair<TrajectoryRecord, TrajectoryRecord> align_trajectories(
    const TrajectoryRecord& est, const TrajectoryRecord& gt) {
  TrajectoryRecord est_out, gt_out;
  for (const auto& g : gt) {
    if (auto e = interpolate_at(est, g.timestamp)) {
      est_out.push_back(*e);
      gt_out.push_back(g);
    }
  }
  return {est_out, gt_out};
}

/// Relative pose error with a path-length delta (meters). Returns nullopt
/// when the overlapping trajectory is shorter than delta.
inline std::optional<MetricSeries> rpe(const TrajectoryRecord& est,
                                       const TrajectoryRecord& gt,
                                       double delta = 10.0) {
  const auto [est_a, gt_a] = align_trajectories(est, gt);
  if (gt_a.size() < 2) return std::nullopt;

  std::vector<double> path(gt_a.size(), 0.0);
  for (std::size_t i = 1; i < gt_a.size(); ++i)
    path[i] = path[i - 1] + (gt_a[i].pose.p - gt_a[i - 1].pose.p).norm();
  if (path.back() < delta) return std::nullopt;

  MetricSeries series;
  std::size_t j = 0;
  for (std::size_t i = 0; i < gt_a.size(); ++i) {
    if (j < i) j = i;
    while (j < gt_a.size() && path[j] < path[i] + delta) ++j;
    if (j >= gt_a.size()) break;
    const Pose gt_rel = compose(inverse(gt_a[i].pose), gt_a[j].pose);
    const Pose est_rel = compose(inverse(est_a[i].pose), est_a[j].pose);
    const Vec6 err = se3_log(compose(inverse(gt_rel), est_rel));
    series.timestamps.push_back(gt_a[i].timestamp);
    series.errors.push_back(err.norm());
  }
  if (series.errors.empty()) return std::nullopt;
  detail::finalize_stats(&series);
  return series;
}

/// Body-frame velocity error along the given body axis (0 = forward).
/// Each record uses its own pose to map velocity into the body frame.
inline std::optional<MetricSeries> velocity_error(const TrajectoryRecord& est,
                                                  const TrajectoryRecord& gt,
                                                  int axis = 0) {
  const auto [est_a, gt_a] = align_trajectories(est, gt);
  if (est_a.empty()) return std::nullopt;
  MetricSeries series;
  for (std::size_t i = 0; i < gt_a.size(); ++i) {
    series.timestamps.push_back(gt_a[i].timestamp);
    series.errors.push_back(body_velocity_axis(est_a[i], axis) -
                            body_velocity_axis(gt_a[i], axis));
  }
  detail::finalize_stats(&series);
  return series;
}

/// The metric bundle reported per experiment run.
struct MetricReport {
  std::string method;  // e.g. "li", "ri", "lri"
  double rpe_rmse = 0.0;
  double rpe_std = 0.0;
  double vel_rmse = 0.0;
  double vel_std = 0.0;
  std::size_t rpe_samples = 0;
  std::size_t vel_samples = 0;
};

inline MetricReport make_report(const std::string& method,
                                const MetricSeries& rpe_series,
                                const MetricSeries& vel_series) {
  MetricReport r;
  r.method = method;
  r.rpe_rmse = rpe_series.rmse;
  r.rpe_std = rpe_series.stddev;
  r.vel_rmse = vel_series.rmse;
  r.vel_std = vel_series.stddev;
  r.rpe_samples = rpe_series.count();
  r.vel_samples = vel_series.count();
  return r;
}

}  // namespace rlio
