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
 * \file config.hpp
 * \brief Experiment configuration: flat key = value text with '#' comments.
 *
 * Unknown keys are rejected by name. RLIO_SEED and RLIO_OUT environment
 * variables override the seed and output directory; command-line flags
 * override both. The config hash covers the normalized serialization after
 * all overrides, so a manifest pins the exact run.
 */

#pragma once

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "rlio/estimator/smoother.hpp"
#include "rlio/radar/cfar.hpp"
#include "rlio/radar/doppler.hpp"
#include "rlio/radar/waveform.hpp"
#include "rlio/sim/sensors.hpp"

namespace rlio {

struct ExperimentConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::vector<std::string> modalities = {"li", "lri"};  // of {li, ri, lri}

  // Trajectory / truth sampling
  std::string trajectory =
      "still:2,accel:2:6,cruise:8,turn:0.25:12,cruise:6,turn:-0.3:10,cruise:12";
  double truth_rate_hz = 100.0;

  // IMU simulation + estimator noise model
  double imu_rate_hz = 400.0;
  double imu_gyro_noise_density = 1e-3;    // rad/s/sqrt(Hz)
  double imu_accel_noise_density = 1e-2;   // m/s^2/sqrt(Hz)
  double imu_gyro_bias_rw = 1e-4;          // rad/s^2/sqrt(Hz)
  double imu_accel_bias_rw = 1e-3;         // m/s^3/sqrt(Hz)
  Vec3 imu_gyro_bias = Vec3(0.002, -0.001, 0.0015);   // true bias, rad/s
  Vec3 imu_accel_bias = Vec3(0.05, -0.08, 0.03);      // true bias, m/s^2

  // LiDAR odometry simulation
  double lidar_rate_hz = 10.0;
  double lidar_sigma_rotation = 0.005;     // rad
  double lidar_sigma_translation = 0.02;   // m
  std::vector<std::pair<double, double>> dropout;  // (start,end) seconds

  // Radar waveform (desk-scale default; Table-style chirps configurable)
  WaveformConfig waveform = desk_waveform();

  // Beam sweep
  double sweep_az_min_deg = -40.0;
  double sweep_az_max_deg = 40.0;
  double sweep_az_step_deg = 10.0;
  double sweep_elevation_deg = -2.5;
  double beam_period_s = 0.1;

  // Scene
  int scene_points = 6000;
  double scene_margin = 60.0;
  double scene_z_min = -3.0;
  double scene_z_max = 0.5;
  double scene_reflectivity = 150.0;
  double scene_noise_power = 1.0;

  // Radar DSP
  CfarConfig cfar;
  TrimBounds trim;
  int min_votes = 4;
  double radar_sigma = 0.169;  // m/s, estimator measurement noise

  // Estimator
  double node_rate_hz = 100.0;
  double lag_s = 1.5;
  double huber_delta = 1.345;
  int max_iterations = 50;
  double init_duration_s = 1.0;
  double init_variance_gate = 0.5;
  Vec3 radar_lever_arm = Vec3(0.1, 0.0, -0.2);  // imu_p_radar, m

  static WaveformConfig desk_waveform() {
    WaveformConfig w;
    w.n_range_bins = 96;
    w.range_resolution = 0.49;
    w.max_range = 47.0;
    w.n_doppler_bins = 192;
    w.doppler_resolution = 0.169;
    w.max_doppler = 0.169 * 96.0;  // axis symmetric about zero
    w.beam_sampling_time = 0.0158;
    return w;
  }

  bool uses_lidar() const {
    for (const auto& m : modalities)
      if (m == "li" || m == "lri") return true;
    return false;
  }
  bool uses_radar() const {
    for (const auto& m : modalities)
      if (m == "ri" || m == "lri") return true;
    return false;
  }

  void validate() const {
    if (modalities.empty())
      throw std::invalid_argument("config: modalities must be non-empty");
    for (const auto& m : modalities)
      if (m != "li" && m != "ri" && m != "lri")
        throw std::invalid_argument("config: unknown modality '" + m + "'");
    if (truth_rate_hz <= 0.0 || imu_rate_hz <= 0.0 || lidar_rate_hz <= 0.0 ||
        node_rate_hz <= 0.0)
      throw std::invalid_argument("config: rates must be positive");
    if (lag_s <= 0.0) throw std::invalid_argument("config: lag_s must be > 0");
    if (radar_sigma <= 0.0)
      throw std::invalid_argument("config: radar_sigma must be > 0");
    if (min_votes < 1)
      throw std::invalid_argument("config: min_votes must be >= 1");
    waveform.validate();
    cfar.validate();
    trim.validate();
  }

  /// Normalized key/value serialization; key order is fixed.
  std::vector<std::pair<std::string, std::string>> to_key_values() const;

  std::string serialize() const {
    std::ostringstream os;
    for (const auto& [k, v] : to_key_values()) os << k << " = " << v << '\n';
    return os.str();
  }

  /// FNV-1a hash of the normalized serialization.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : serialize()) {
      h ^= static_cast<unsigned char>(c);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

namespace detail {

inline std::string trim_ws(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t end = s.find(sep, pos);
    if (end == std::string::npos) end = s.size();
    const std::string item = trim_ws(s.substr(pos, end - pos));
    if (!item.empty()) out.push_back(item);
    pos = end + 1;
  }
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for key '" + key +
                                "': " + v);
  }
}

inline Vec3 parse_vec3(const std::string& key, const std::string& v) {
  const auto parts = split(v, ',');
  if (parts.size() != 3)
    throw std::invalid_argument("config: key '" + key + "' needs 3 values");
  return Vec3(parse_double(key, parts[0]), parse_double(key, parts[1]),
              parse_double(key, parts[2]));
}

inline std::vector<std::pair<double, double>> parse_windows(
    const std::string& key, const std::string& v) {
  std::vector<std::pair<double, double>> out;
  for (const auto& item : split(v, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2)
      throw std::invalid_argument("config: key '" + key +
                                  "' wants start:end windows");
    out.emplace_back(parse_double(key, parts[0]), parse_double(key, parts[1]));
  }
  return out;
}

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>>
ExperimentConfig::to_key_values() const {
  using detail::fmt_num;
  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("seed", std::to_string(seed));
  kv.emplace_back("out_dir", out_dir);
  {
    std::string m;
    for (std::size_t i = 0; i < modalities.size(); ++i)
      m += (i ? "," : "") + modalities[i];
    kv.emplace_back("modalities", m);
  }
  kv.emplace_back("trajectory", trajectory);
  kv.emplace_back("truth_rate_hz", fmt_num(truth_rate_hz));
  kv.emplace_back("imu_rate_hz", fmt_num(imu_rate_hz));
  kv.emplace_back("imu_gyro_noise_density", fmt_num(imu_gyro_noise_density));
  kv.emplace_back("imu_accel_noise_density", fmt_num(imu_accel_noise_density));
  kv.emplace_back("imu_gyro_bias_rw", fmt_num(imu_gyro_bias_rw));
  kv.emplace_back("imu_accel_bias_rw", fmt_num(imu_accel_bias_rw));
  kv.emplace_back("imu_gyro_bias", fmt_num(imu_gyro_bias.x()) + "," +
                                       fmt_num(imu_gyro_bias.y()) + "," +
                                       fmt_num(imu_gyro_bias.z()));
  kv.emplace_back("imu_accel_bias", fmt_num(imu_accel_bias.x()) + "," +
                                        fmt_num(imu_accel_bias.y()) + "," +
                                        fmt_num(imu_accel_bias.z()));
  kv.emplace_back("lidar_rate_hz", fmt_num(lidar_rate_hz));
  kv.emplace_back("lidar_sigma_rotation", fmt_num(lidar_sigma_rotation));
  kv.emplace_back("lidar_sigma_translation", fmt_num(lidar_sigma_translation));
  {
    std::string d;
    for (std::size_t i = 0; i < dropout.size(); ++i)
      d += (i ? "," : "") + (fmt_num(dropout[i].first) + ":" +
                             fmt_num(dropout[i].second));
    kv.emplace_back("dropout", d);
  }
  kv.emplace_back("waveform_n_range_bins", std::to_string(waveform.n_range_bins));
  kv.emplace_back("waveform_n_doppler_bins",
                  std::to_string(waveform.n_doppler_bins));
  kv.emplace_back("waveform_range_resolution",
                  fmt_num(waveform.range_resolution));
  kv.emplace_back("waveform_max_range", fmt_num(waveform.max_range));
  kv.emplace_back("waveform_doppler_resolution",
                  fmt_num(waveform.doppler_resolution));
  kv.emplace_back("waveform_max_doppler", fmt_num(waveform.max_doppler));
  kv.emplace_back("waveform_beam_sampling_time",
                  fmt_num(waveform.beam_sampling_time));
  kv.emplace_back("sweep_az_min_deg", fmt_num(sweep_az_min_deg));
  kv.emplace_back("sweep_az_max_deg", fmt_num(sweep_az_max_deg));
  kv.emplace_back("sweep_az_step_deg", fmt_num(sweep_az_step_deg));
  kv.emplace_back("sweep_elevation_deg", fmt_num(sweep_elevation_deg));
  kv.emplace_back("beam_period_s", fmt_num(beam_period_s));
  kv.emplace_back("scene_points", std::to_string(scene_points));
  kv.emplace_back("scene_margin", fmt_num(scene_margin));
  kv.emplace_back("scene_z_min", fmt_num(scene_z_min));
  kv.emplace_back("scene_z_max", fmt_num(scene_z_max));
  kv.emplace_back("scene_reflectivity", fmt_num(scene_reflectivity));
  kv.emplace_back("scene_noise_power", fmt_num(scene_noise_power));
  kv.emplace_back("cfar_guard_range", std::to_string(cfar.guard_cells_range));
  kv.emplace_back("cfar_guard_doppler",
                  std::to_string(cfar.guard_cells_doppler));
  kv.emplace_back("cfar_ref_range",
                  std::to_string(cfar.reference_cells_range));
  kv.emplace_back("cfar_ref_doppler",
                  std::to_string(cfar.reference_cells_doppler));
  kv.emplace_back("cfar_p_fa", fmt_num(cfar.p_fa));
  kv.emplace_back("trim_range_min", fmt_num(trim.range_min));
  kv.emplace_back("trim_range_max", fmt_num(trim.range_max));
  kv.emplace_back("trim_doppler_min", fmt_num(trim.doppler_min));
  kv.emplace_back("trim_doppler_max", fmt_num(trim.doppler_max));
  kv.emplace_back("min_votes", std::to_string(min_votes));
  kv.emplace_back("radar_sigma", fmt_num(radar_sigma));
  kv.emplace_back("node_rate_hz", fmt_num(node_rate_hz));
  kv.emplace_back("lag_s", fmt_num(lag_s));
  kv.emplace_back("huber_delta", fmt_num(huber_delta));
  kv.emplace_back("max_iterations", std::to_string(max_iterations));
  kv.emplace_back("init_duration_s", fmt_num(init_duration_s));
  kv.emplace_back("init_variance_gate", fmt_num(init_variance_gate));
  kv.emplace_back("radar_lever_arm", fmt_num(radar_lever_arm.x()) + "," +
                                         fmt_num(radar_lever_arm.y()) + "," +
                                         fmt_num(radar_lever_arm.z()));
  return kv;
}

/// Parses config text; unknown keys are rejected by name.
inline ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream is(text);
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = detail::trim_ws(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                  " is not 'key = value'");
    const std::string key = detail::trim_ws(line.substr(0, eq));
    const std::string value = detail::trim_ws(line.substr(eq + 1));

    using detail::parse_double;
    if (key == "seed")
      cfg.seed = std::stoull(value);
    else if (key == "out_dir")
      cfg.out_dir = value;
    else if (key == "modalities")
      cfg.modalities = detail::split(value, ',');
    else if (key == "trajectory")
      cfg.trajectory = value;
    else if (key == "truth_rate_hz")
      cfg.truth_rate_hz = parse_double(key, value);
    else if (key == "imu_rate_hz")
      cfg.imu_rate_hz = parse_double(key, value);
    else if (key == "imu_gyro_noise_density")
      cfg.imu_gyro_noise_density = parse_double(key, value);
    else if (key == "imu_accel_noise_density")
      cfg.imu_accel_noise_density = parse_double(key, value);
    else if (key == "imu_gyro_bias_rw")
      cfg.imu_gyro_bias_rw = parse_double(key, value);
    else if (key == "imu_accel_bias_rw")
      cfg.imu_accel_bias_rw = parse_double(key, value);
    else if (key == "imu_gyro_bias")
      cfg.imu_gyro_bias = detail::parse_vec3(key, value);
    else if (key == "imu_accel_bias")
      cfg.imu_accel_bias = detail::parse_vec3(key, value);
    else if (key == "lidar_rate_hz")
      cfg.lidar_rate_hz = parse_double(key, value);
    else if (key == "lidar_sigma_rotation")
      cfg.lidar_sigma_rotation = parse_double(key, value);
    else if (key == "lidar_sigma_translation")
      cfg.lidar_sigma_translation = parse_double(key, value);
    else if (key == "dropout")
      cfg.dropout = detail::parse_windows(key, value);
    else if (key == "waveform_n_range_bins")
      cfg.waveform.n_range_bins = static_cast<int>(parse_double(key, value));
    else if (key == "waveform_n_doppler_bins")
      cfg.waveform.n_doppler_bins = static_cast<int>(parse_double(key, value));
    else if (key == "waveform_range_resolution")
      cfg.waveform.range_resolution = parse_double(key, value);
    else if (key == "waveform_max_range")
      cfg.waveform.max_range = parse_double(key, value);
    else if (key == "waveform_doppler_resolution")
      cfg.waveform.doppler_resolution = parse_double(key, value);
    else if (key == "waveform_max_doppler")
      cfg.waveform.max_doppler = parse_double(key, value);
    else if (key == "waveform_beam_sampling_time")
      cfg.waveform.beam_sampling_time = parse_double(key, value);
    else if (key == "sweep_az_min_deg")
      cfg.sweep_az_min_deg = parse_double(key, value);
    else if (key == "sweep_az_max_deg")
      cfg.sweep_az_max_deg = parse_double(key, value);
    else if (key == "sweep_az_step_deg")
      cfg.sweep_az_step_deg = parse_double(key, value);
    else if (key == "sweep_elevation_deg")
      cfg.sweep_elevation_deg = parse_double(key, value);
    else if (key == "beam_period_s")
      cfg.beam_period_s = parse_double(key, value);
    else if (key == "scene_points")
      cfg.scene_points = static_cast<int>(parse_double(key, value));
    else if (key == "scene_margin")
      cfg.scene_margin = parse_double(key, value);
    else if (key == "scene_z_min")
      cfg.scene_z_min = parse_double(key, value);
    else if (key == "scene_z_max")
      cfg.scene_z_max = parse_double(key, value);
    else if (key == "scene_reflectivity")
      cfg.scene_reflectivity = parse_double(key, value);
    else if (key == "scene_noise_power")
      cfg.scene_noise_power = parse_double(key, value);
    else if (key == "cfar_guard_range")
      cfg.cfar.guard_cells_range = static_cast<int>(parse_double(key, value));
    else if (key == "cfar_guard_doppler")
      cfg.cfar.guard_cells_doppler = static_cast<int>(parse_double(key, value));
    else if (key == "cfar_ref_range")
      cfg.cfar.reference_cells_range =
          static_cast<int>(parse_double(key, value));
    else if (key == "cfar_ref_doppler")
      cfg.cfar.reference_cells_doppler =
          static_cast<int>(parse_double(key, value));
    else if (key == "cfar_p_fa")
      cfg.cfar.p_fa = parse_double(key, value);
    else if (key == "trim_range_min")
      cfg.trim.range_min = parse_double(key, value);
    else if (key == "trim_range_max")
      cfg.trim.range_max = parse_double(key, value);
    else if (key == "trim_doppler_min")
      cfg.trim.doppler_min = parse_double(key, value);
    else if (key == "trim_doppler_max")
      cfg.trim.doppler_max = parse_double(key, value);
    else if (key == "min_votes")
      cfg.min_votes = static_cast<int>(parse_double(key, value));
    else if (key == "radar_sigma")
      cfg.radar_sigma = parse_double(key, value);
    else if (key == "node_rate_hz")
      cfg.node_rate_hz = parse_double(key, value);
    else if (key == "lag_s")
      cfg.lag_s = parse_double(key, value);
    else if (key == "huber_delta")
      cfg.huber_delta = parse_double(key, value);
    else if (key == "max_iterations")
      cfg.max_iterations = static_cast<int>(parse_double(key, value));
    else if (key == "init_duration_s")
      cfg.init_duration_s = parse_double(key, value);
    else if (key == "init_variance_gate")
      cfg.init_variance_gate = parse_double(key, value);
    else if (key == "radar_lever_arm")
      cfg.radar_lever_arm = detail::parse_vec3(key, value);
    else
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

/// Applies RLIO_SEED / RLIO_OUT environment overrides.
inline void apply_env_overrides(ExperimentConfig* cfg) {
  if (const char* s = std::getenv("RLIO_SEED")) cfg->seed = std::stoull(s);
  if (const char* s = std::getenv("RLIO_OUT")) cfg->out_dir = s;
}

}  // namespace rlio
