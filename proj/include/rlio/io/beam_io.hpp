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
 * \file beam_io.hpp
 * \brief Binary container for recorded/simulated radar beams ("RDB1").
 *
 * Little-endian layout:
 *   bytes 0..3   magic "RDB1"
 *   u32          version (1)
 *   f64 x5       max_range, range_resolution, max_doppler,
 *                doppler_resolution, beam_sampling_time
 *   u32 x2       n_range_bins, n_doppler_bins
 *   u32          n_beams
 *   per beam:
 *     f64 x3     timestamp, center_azimuth_deg, center_elevation_deg
 *     f64 x4     pixel azimuths (deg, by pixel column)
 *     f64 x3     pixel elevations (deg, by pixel row)
 *     12 pixels, row-major: f64 x (n_range_bins * n_doppler_bins),
 *                intensities row-major (range rows, doppler columns)
 */

#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rlio/radar/waveform.hpp"

namespace rlio {

namespace detail {

template <typename T>
void write_raw(std::ostream& os, const T& value) {
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_raw(std::istream& is) {
  T value;
  is.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!is) throw std::runtime_error("beam file: truncated");
  return value;
}

}  // namespace detail

inline void write_beams(const std::string& path, const WaveformConfig& waveform,
                        const std::vector<BeamMeasurement>& beams) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os.write("RDB1", 4);
  detail::write_raw<std::uint32_t>(os, 1);
  detail::write_raw<double>(os, waveform.max_range);
  detail::write_raw<double>(os, waveform.range_resolution);
  detail::write_raw<double>(os, waveform.max_doppler);
  detail::write_raw<double>(os, waveform.doppler_resolution);
  detail::write_raw<double>(os, waveform.beam_sampling_time);
  detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(waveform.n_range_bins));
  detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(waveform.n_doppler_bins));
  detail::write_raw<std::uint32_t>(os, static_cast<std::uint32_t>(beams.size()));
  for (const auto& b : beams) {
    detail::write_raw<double>(os, b.timestamp);
    detail::write_raw<double>(os, b.beam_center_azimuth);
    detail::write_raw<double>(os, b.beam_center_elevation);
    for (double az : b.pixel_azimuths) detail::write_raw<double>(os, az);
    for (double el : b.pixel_elevations) detail::write_raw<double>(os, el);
    for (const auto& px : b.pixels)
      os.write(reinterpret_cast<const char*>(px.intensities.data()),
               static_cast<std::streamsize>(px.intensities.size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("write failed: " + path);
}

struct BeamFile {
  WaveformConfig waveform;
  std::vector<BeamMeasurement> beams;
};

inline BeamFile read_beams(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "RDB1", 4) != 0)
    throw std::runtime_error("not an RDB1 beam file: " + path);
  const auto version = detail::read_raw<std::uint32_t>(is);
  if (version != 1)
    throw std::runtime_error("unsupported beam file version " +
                             std::to_string(version));

  BeamFile out;
  out.waveform.max_range = detail::read_raw<double>(is);
  out.waveform.range_resolution = detail::read_raw<double>(is);
  out.waveform.max_doppler = detail::read_raw<double>(is);
  out.waveform.doppler_resolution = detail::read_raw<double>(is);
  out.waveform.beam_sampling_time = detail::read_raw<double>(is);
  out.waveform.n_range_bins =
      static_cast<int>(detail::read_raw<std::uint32_t>(is));
  out.waveform.n_doppler_bins =
      static_cast<int>(detail::read_raw<std::uint32_t>(is));
  out.waveform.validate();

  const auto n_beams = detail::read_raw<std::uint32_t>(is);
  out.beams.reserve(n_beams);
  for (std::uint32_t k = 0; k < n_beams; ++k) {
    const double t = detail::read_raw<double>(is);
    const double az = detail::read_raw<double>(is);
    const double el = detail::read_raw<double>(is);
    BeamMeasurement b = BeamMeasurement::make(out.waveform, az, el, t);
    for (auto& v : b.pixel_azimuths) v = detail::read_raw<double>(is);
    for (auto& v : b.pixel_elevations) v = detail::read_raw<double>(is);
    for (auto& px : b.pixels) {
      is.read(reinterpret_cast<char*>(px.intensities.data()),
              static_cast<std::streamsize>(px.intensities.size() * sizeof(double)));
      if (!is) throw std::runtime_error("beam file: truncated pixel data");
    }
    out.beams.push_back(std::move(b));
  }
  return out;
}

}  // namespace rlio
