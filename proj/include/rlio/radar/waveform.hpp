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
 * \file waveform.hpp
 * \brief Range-doppler map containers and the bin <-> physical-unit mapping.
 *
 * Axis convention (fixed here, configurable nowhere): doppler column 0 maps
 * to -max_doppler and columns ascend by doppler_resolution; range row r maps
 * to r * range_resolution.
 */

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rlio {

/// Radar chirp/beam parameters describing one range-doppler map geometry.
struct WaveformConfig {
  double max_range = 100.0;            // m
  double range_resolution = 0.49;      // m per row
  double max_doppler = 43.178;         // m/s
  double doppler_resolution = 0.169;   // m/s per column
  double beam_sampling_time = 0.0158;  // s per beam
  int n_range_bins = 256;
  int n_doppler_bins = 512;

  void validate() const {
    if (range_resolution <= 0.0 || doppler_resolution <= 0.0)
      throw std::invalid_argument("waveform: resolutions must be positive");
    if (n_range_bins <= 0 || n_doppler_bins <= 0)
      throw std::invalid_argument("waveform: bin counts must be positive");
    if (max_range <= 0.0 || max_doppler <= 0.0)
      throw std::invalid_argument("waveform: axis extents must be positive");
  }
};

/// Doppler value at a column center.
inline double bin_to_doppler(int column, const WaveformConfig& w) {
  if (column < 0 || column >= w.n_doppler_bins)
    throw std::out_of_range("bin_to_doppler: column out of range");
  return -w.max_doppler + column * w.doppler_resolution;
}

/// Range value at a row center.
inline double bin_to_range(int row, const WaveformConfig& w) {
  if (row < 0 || row >= w.n_range_bins)
    throw std::out_of_range("bin_to_range: row out of range");
  return row * w.range_resolution;
}

/// Nearest column for a doppler value; may fall outside the grid.
inline int doppler_to_bin(double doppler, const WaveformConfig& w) {
  return static_cast<int>(
      std::lround((doppler + w.max_doppler) / w.doppler_resolution));
}

inline int range_to_bin(double range, const WaveformConfig& w) {
  return static_cast<int>(std::lround(range / w.range_resolution));
}

/// 2D grid of linear signal power, rows = range bins, columns = doppler bins.
struct RangeDopplerMap {
  WaveformConfig waveform;
  std::vector<double> intensities;  // row-major, n_range x n_doppler

  RangeDopplerMap() = default;
  explicit RangeDopplerMap(const WaveformConfig& w)
      : waveform(w),
        intensities(static_cast<std::size_t>(w.n_range_bins) * w.n_doppler_bins,
                    0.0) {}

  int rows() const { return waveform.n_range_bins; }
  int cols() const { return waveform.n_doppler_bins; }

  double& at(int r, int c) {
    return intensities[static_cast<std::size_t>(r) * cols() + c];
  }
  double at(int r, int c) const {
    return intensities[static_cast<std::size_t>(r) * cols() + c];
  }
};

/// One radar measurement: 12 range-doppler pixels in 3 rows x 4 columns,
/// 1 deg wide and 2.5 deg tall, centered on the beam pointing direction.
struct BeamMeasurement {
  static constexpr int kPixelRows = 3;
  static constexpr int kPixelCols = 4;
  static constexpr int kNumPixels = kPixelRows * kPixelCols;

  std::vector<RangeDopplerMap> pixels;   // row-major, kNumPixels entries
  std::array<double, 4> pixel_azimuths;  // deg, per pixel column
  std::array<double, 3> pixel_elevations;  // deg, per pixel row
  double beam_center_azimuth = 0.0;         // deg
  double beam_center_elevation = 0.0;       // deg
  double timestamp = 0.0;                   // s

  static BeamMeasurement make(const WaveformConfig& w, double center_az_deg,
                              double center_el_deg, double t) {
    BeamMeasurement b;
    b.pixels.assign(kNumPixels, RangeDopplerMap(w));
    for (int c = 0; c < kPixelCols; ++c)
      b.pixel_azimuths[c] = center_az_deg + (c - 1.5) * 1.0;
    for (int r = 0; r < kPixelRows; ++r)
      b.pixel_elevations[r] = center_el_deg + (r - 1.0) * 2.5;
    b.beam_center_azimuth = center_az_deg;
    b.beam_center_elevation = center_el_deg;
    b.timestamp = t;
    return b;
  }

  const RangeDopplerMap& pixel(int r, int c) const {
    return pixels[static_cast<std::size_t>(r) * kPixelCols + c];
  }
  RangeDopplerMap& pixel(int r, int c) {
    return pixels[static_cast<std::size_t>(r) * kPixelCols + c];
  }
};

}  // namespace rlio
