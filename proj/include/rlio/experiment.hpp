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
 * \file experiment.hpp
 * \brief End-to-end experiment runs: simulate -> process radar -> estimate
 * per modality -> evaluate -> write artifacts.
 */

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rlio/eval/metrics.hpp"
#include "rlio/io/beam_io.hpp"
#include "rlio/io/config.hpp"
#include "rlio/io/text_io.hpp"
#include "rlio/plot/svg.hpp"

namespace rlio {

/// Everything simulated for one experiment seed.
struct SimulatedStreams {
  TrajectoryRecord truth;
  std::vector<ImuMeasurement> imu;
  std::vector<LidarRelativePose> lidar;
  std::vector<BeamMeasurement> beams;
  std::vector<DopplerMeasurement> doppler;            // processed beams
  std::vector<RadarVelocityFactorInput> radar_inputs; // estimator-ready
  double duration = 0.0;
};

inline Extrinsics extrinsics_from(const ExperimentConfig& cfg) {
  Extrinsics ext;
  ext.radar_position_in_imu = cfg.radar_lever_arm;
  return ext;
}

inline SmootherConfig smoother_config_from(const ExperimentConfig& cfg) {
  SmootherConfig sc;
  sc.node_rate = cfg.node_rate_hz;
  sc.lag = cfg.lag_s;
  sc.max_iterations = cfg.max_iterations;
  sc.huber_delta = cfg.huber_delta;
  sc.imu_noise.gyro_noise_density = cfg.imu_gyro_noise_density;
  sc.imu_noise.accel_noise_density = cfg.imu_accel_noise_density;
  sc.imu_noise.gyro_bias_random_walk = cfg.imu_gyro_bias_rw;
  sc.imu_noise.accel_bias_random_walk = cfg.imu_accel_bias_rw;
  sc.extrinsics = extrinsics_from(cfg);
  return sc;
}

/// Simulates all enabled sensor streams for the configured trajectory. Radar
/// beams are synthesized and immediately condensed to doppler measurements.
inline SimulatedStreams simulate_streams(const ExperimentConfig& cfg,
                                         bool force_radar = false,
                                         bool force_lidar = false) {
  cfg.validate();
  const TrajectoryProfile profile = parse_trajectory_profile(cfg.trajectory);
  DropoutSchedule schedule;
  schedule.windows = cfg.dropout;
  schedule.validate(profile.total_duration());

  SimulatedStreams out;
  out.duration = profile.total_duration();
  out.truth = generate_truth(profile, cfg.truth_rate_hz);

  ImuSimParams imu_params;
  imu_params.rate_hz = cfg.imu_rate_hz;
  imu_params.noise.gyro_noise_density = cfg.imu_gyro_noise_density;
  imu_params.noise.accel_noise_density = cfg.imu_accel_noise_density;
  imu_params.gyro_bias = cfg.imu_gyro_bias;
  imu_params.accel_bias = cfg.imu_accel_bias;
  out.imu = simulate_imu(profile, imu_params, cfg.seed);

  if (cfg.uses_lidar() || force_lidar) {
    LidarSimParams lidar_params;
    lidar_params.rate_hz = cfg.lidar_rate_hz;
    lidar_params.sigma_rotation = cfg.lidar_sigma_rotation;
    lidar_params.sigma_translation = cfg.lidar_sigma_translation;
    out.lidar = simulate_lidar_odometry(profile, lidar_params, schedule, cfg.seed);
  }

  if (cfg.uses_radar() || force_radar) {
    const SceneModel scene = make_scattered_scene(
        profile, cfg.scene_points, cfg.scene_margin, cfg.scene_z_min,
        cfg.scene_z_max, cfg.scene_reflectivity, cfg.scene_noise_power,
        cfg.seed);
    SweepConfig sweep;
    sweep.az_min_deg = cfg.sweep_az_min_deg;
    sweep.az_max_deg = cfg.sweep_az_max_deg;
    sweep.az_step_deg = cfg.sweep_az_step_deg;
    sweep.elevation_deg = cfg.sweep_elevation_deg;
    sweep.beam_period = cfg.beam_period_s;
    out.beams = sweep_beams(profile, scene, cfg.waveform, extrinsics_from(cfg),
                            sweep, cfg.seed);

    for (const auto& beam : out.beams) {
      const auto m = process_beam(beam, cfg.cfar, cfg.trim, cfg.min_votes);
      if (!m) continue;
      out.doppler.push_back(*m);

      RadarVelocityFactorInput in;
      in.forward_velocity = doppler_to_forward_velocity(*m);
      in.variance = cfg.radar_sigma * cfg.radar_sigma;
      in.timestamp = m->timestamp;
      // Angular rate from the nearest (noisy) IMU sample, like the vehicle.
      const auto it = std::lower_bound(
          out.imu.begin(), out.imu.end(), m->timestamp,
          [](const ImuMeasurement& a, double t) { return a.timestamp < t; });
      const ImuMeasurement& nearest =
          (it == out.imu.begin())
              ? *it
              : ((it == out.imu.end() ||
                  (m->timestamp - std::prev(it)->timestamp <
                   it->timestamp - m->timestamp))
                     ? *std::prev(it)
                     : *it);
      in.angular_velocity_at_node = nearest.angular_velocity;
      out.radar_inputs.push_back(in);
    }
  }
  return out;
}

/// One modality's outcome.
struct ModalityResult {
  std::string name;
  TrajectoryRecord estimate;
  MetricReport report;
  MetricSeries rpe_series;
  MetricSeries vel_series;
  int n_not_converged = 0;
  int n_stale = 0;
};

struct ExperimentResult {
  SimulatedStreams streams;
  std::vector<ModalityResult> modalities;
  std::uint64_t config_hash = 0;
};

/// Runs one modality over already-simulated streams.
inline ModalityResult run_modality(const std::string& name,
                                   const SimulatedStreams& streams,
                                   const ExperimentConfig& cfg) {
  const bool with_lidar = (name == "li" || name == "lri");
  const bool with_radar = (name == "ri" || name == "lri");

  IngestOptions opts;
  opts.init_duration = cfg.init_duration_s;
  opts.init_variance_gate = cfg.init_variance_gate;

  static const std::vector<LidarRelativePose> no_lidar;
  static const std::vector<RadarVelocityFactorInput> no_radar;
  const IngestResult r =
      ingest(streams.imu, with_lidar ? streams.lidar : no_lidar,
             with_radar ? streams.radar_inputs : no_radar,
             smoother_config_from(cfg), opts);

  ModalityResult out;
  out.name = name;
  out.estimate = r.estimates;
  out.n_not_converged = r.n_not_converged;
  out.n_stale = r.n_stale;

  const auto rpe_series = rpe(out.estimate, streams.truth, 10.0);
  const auto vel_series = velocity_error(out.estimate, streams.truth, 0);
  if (rpe_series) out.rpe_series = *rpe_series;
  if (vel_series) out.vel_series = *vel_series;
  out.report = make_report(name, out.rpe_series, out.vel_series);
  return out;
}

namespace detail {

inline void write_manifest(const std::string& path,
                           const ExperimentConfig& cfg,
                           const ExperimentResult& result) {
  auto os = open_out(path);
  char hash_buf[32];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(result.config_hash));
  os << "tool: rlio 0.1.0\n";
  os << "config_hash: " << hash_buf << '\n';
  os << "seed: " << cfg.seed << '\n';
  {
    std::string m;
    for (std::size_t i = 0; i < cfg.modalities.size(); ++i)
      m += (i ? "," : "") + cfg.modalities[i];
    os << "modalities: " << m << '\n';
  }
  {
    std::string d;
    for (std::size_t i = 0; i < cfg.dropout.size(); ++i)
      d += (i ? "," : "") +
           (fmt(cfg.dropout[i].first) + ":" + fmt(cfg.dropout[i].second));
    os << "dropout: " << (d.empty() ? "none" : d) << '\n';
  }
  os << "duration_s: " << fmt(result.streams.duration) << '\n';
  os << "imu_samples: " << result.streams.imu.size() << '\n';
  os << "lidar_measurements: " << result.streams.lidar.size() << '\n';
  os << "radar_beams: " << result.streams.beams.size() << '\n';
  os << "radar_measurements: " << result.streams.doppler.size() << '\n';
  int not_converged = 0;
  for (const auto& m : result.modalities) not_converged += m.n_not_converged;
  os << "updates_not_converged: " << not_converged << '\n';
  os << "config:\n";
  for (const auto& [k, v] : cfg.to_key_values())
    os << "  " << k << " = " << v << '\n';
}

inline void write_plots(const std::filesystem::path& dir,
                        const ExperimentResult& result) {
  // XY path: truth plus every modality.
  std::vector<PlotSeries> path_series;
  {
    PlotSeries s;
    s.label = "truth";
    s.color = plot_palette(0);
    for (const auto& p : result.streams.truth) {
      s.x.push_back(p.pose.p.x());
      s.y.push_back(p.pose.p.y());
    }
    path_series.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < result.modalities.size(); ++i) {
    PlotSeries s;
    s.label = result.modalities[i].name;
    s.color = plot_palette(i + 1);
    for (const auto& p : result.modalities[i].estimate) {
      s.x.push_back(p.pose.p.x());
      s.y.push_back(p.pose.p.y());
    }
    path_series.push_back(std::move(s));
  }
  write_svg_plot((dir / "path.svg").string(), "XY path", "x [m]", "y [m]",
                 path_series);

  // Forward velocity vs time.
  std::vector<PlotSeries> vel_series;
  {
    PlotSeries s;
    s.label = "truth";
    s.color = plot_palette(0);
    for (const auto& p : result.streams.truth) {
      s.x.push_back(p.timestamp);
      s.y.push_back(body_velocity_axis(p, 0));
    }
    vel_series.push_back(std::move(s));
  }
  for (std::size_t i = 0; i < result.modalities.size(); ++i) {
    PlotSeries s;
    s.label = result.modalities[i].name;
    s.color = plot_palette(i + 1);
    for (const auto& p : result.modalities[i].estimate) {
      s.x.push_back(p.timestamp);
      s.y.push_back(body_velocity_axis(p, 0));
    }
    vel_series.push_back(std::move(s));
  }
  write_svg_plot((dir / "vel_forward.svg").string(), "Forward velocity",
                 "t [s]", "v_x [m/s]", vel_series);

  // Squared forward-velocity error vs time.
  std::vector<PlotSeries> err_series;
  for (std::size_t i = 0; i < result.modalities.size(); ++i) {
    PlotSeries s;
    s.label = result.modalities[i].name;
    s.color = plot_palette(i + 1);
    const auto& v = result.modalities[i].vel_series;
    for (std::size_t k = 0; k < v.errors.size(); ++k) {
      s.x.push_back(v.timestamps[k]);
      s.y.push_back(v.errors[k] * v.errors[k]);
    }
    err_series.push_back(std::move(s));
  }
  write_svg_plot((dir / "vel_error_sq.svg").string(),
                 "Squared forward-velocity error", "t [s]",
                 "error^2 [(m/s)^2]", err_series);
}

}  // namespace detail

/// Full experiment: simulate, run every configured modality, evaluate and
/// write all artifacts under cfg.out_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       bool write_artifacts = true) {
  cfg.validate();
  ExperimentResult result;
  result.config_hash = cfg.hash();
  result.streams = simulate_streams(cfg);
  for (const auto& name : cfg.modalities)
    result.modalities.push_back(run_modality(name, result.streams, cfg));

  if (write_artifacts) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    write_trajectory((dir / "truth.csv").string(), result.streams.truth);
    if (!result.streams.doppler.empty())
      write_doppler((dir / "doppler.csv").string(), result.streams.doppler);
    for (const auto& m : result.modalities) {
      const auto mdir = dir / m.name;
      std::filesystem::create_directories(mdir);
      write_trajectory((mdir / "estimate.csv").string(), m.estimate);
      write_metric_report((mdir / "metrics.txt").string(), m.report);
      write_series((mdir / "vel_error.csv").string(), m.vel_series,
                   "forward_velocity_error_mps");
      write_series((mdir / "rpe_error.csv").string(), m.rpe_series,
                   "rpe_10m");
    }
    detail::write_manifest((dir / "manifest.txt").string(), cfg, result);
    detail::write_plots(dir, result);
  }
  return result;
}

}  // namespace rlio
