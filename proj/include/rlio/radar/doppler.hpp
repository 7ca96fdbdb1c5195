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
 * \file doppler.hpp
 * \brief Condenses a 12-pixel radar beam into one radial-speed measurement.
 *
 * Pipeline per beam: CA-CFAR each pixel, trim the mask to the configured
 * range/doppler envelope, vote for the densest doppler column per pixel,
 * then take the mode over pixels with a minimum vote count. All ties break
 * toward the smaller |doppler| (stationary-world prior), then toward the
 * smaller column index.
 */

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <optional>
#include <vector>

#include "rlio/radar/cfar.hpp"
#include "rlio/radar/waveform.hpp"

namespace rlio {

/// Physical-unit bounds applied to detection masks before voting.
struct TrimBounds {
  double range_min = 2.0;      // m
  double range_max = 100.0;    // m
  double doppler_min = -15.0;  // m/s
  double doppler_max = 15.0;   // m/s

  void validate() const {
    if (range_min > range_max)
      throw std::invalid_argument("trim: inverted range bounds");
    if (doppler_min > doppler_max)
      throw std::invalid_argument("trim: inverted doppler bounds");
  }
};

/// Single radial-speed measurement condensed from one beam.
struct DopplerMeasurement {
  double radial_speed = 0.0;  // m/s, v_d
  double azimuth = 0.0;       // deg, beam center
  double elevation = 0.0;     // deg, beam center
  double timestamp = 0.0;     // s
  int n_votes = 0;
};

/// Clears detections whose bin centers fall outside the given bounds.
inline DetectionMask trim_mask(const DetectionMask& mask,
                               const TrimBounds& bounds) {
  bounds.validate();
  DetectionMask out = mask;
  std::vector<std::uint8_t> row_keep(mask.n_rows), col_keep(mask.n_cols);
  for (int r = 0; r < mask.n_rows; ++r) {
    const double range = bin_to_range(r, mask.waveform);
    row_keep[r] = (range >= bounds.range_min && range <= bounds.range_max);
  }
  for (int c = 0; c < mask.n_cols; ++c) {
    const double d = bin_to_doppler(c, mask.waveform);
    col_keep[c] = (d >= bounds.doppler_min && d <= bounds.doppler_max);
  }
  for (int r = 0; r < mask.n_rows; ++r)
    for (int c = 0; c < mask.n_cols; ++c)
      if (out.at(r, c) && (!row_keep[r] || !col_keep[c])) out.set(r, c, false);
  return out;
}

namespace detail {

// tie-break: prefer smaller |doppler|, then smaller column index
inline bool column_preferred(int cand, int incumbent,
                             const WaveformConfig& w) {
  const double a = std::abs(bin_to_doppler(cand, w));
  const double b = std::abs(bin_to_doppler(incumbent, w));
  if (a != b) return a < b;
  return cand < incumbent;
}

}  // namespace detail

/// Column with the most detections, or nothing for an empty mask.
inline std::optional<int> pixel_doppler_vote(const DetectionMask& mask) {
  std::vector<int> counts(mask.n_cols, 0);
  for (int r = 0; r < mask.n_rows; ++r)
    for (int c = 0; c < mask.n_cols; ++c)
      if (mask.at(r, c)) ++counts[c];

  int best = -1, best_count = 0;
  for (int c = 0; c < mask.n_cols; ++c) {
    if (counts[c] == 0) continue;
    if (counts[c] > best_count ||
        (counts[c] == best_count &&
         detail::column_preferred(c, best, mask.waveform))) {
      best = c;
      best_count = counts[c];
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

/// Mode of the per-pixel votes; absent when the mode multiplicity is below
/// min_votes.
inline std::optional<int> beam_consensus(const std::vector<int>& votes,
                                         int min_votes,
                                         const WaveformConfig& waveform) {
  std::map<int, int> multiplicity;
  for (int v : votes) ++multiplicity[v];

  int best = -1, best_count = 0;
  for (const auto& [col, count] : multiplicity) {
    if (count > best_count ||
        (count == best_count && detail::column_preferred(col, best, waveform))) {
      best = col;
      best_count = count;
    }
  }
  if (best < 0 || best_count < min_votes) return std::nullopt;
  return best;
}

/// Full beam pipeline; absent when no column reaches consensus.
inline std::optional<DopplerMeasurement> process_beam(
    const BeamMeasurement& beam, const CfarConfig& cfar,
    const TrimBounds& bounds, int min_votes) {
  std::vector<int> votes;
  votes.reserve(beam.pixels.size());
  for (const auto& px : beam.pixels) {
    const DetectionMask trimmed = trim_mask(ca_cfar_2d(px, cfar), bounds);
    if (auto v = pixel_doppler_vote(trimmed)) votes.push_back(*v);
  }
  if (votes.empty()) return std::nullopt;

  const auto& waveform = beam.pixels.front().waveform;
  const auto col = beam_consensus(votes, min_votes, waveform);
  if (!col) return std::nullopt;

  DopplerMeasurement m;
  m.radial_speed = bin_to_doppler(*col, waveform);
  m.azimuth = beam.beam_center_azimuth;
  m.elevation = beam.beam_center_elevation;
  m.timestamp = beam.timestamp;
  m.n_votes = static_cast<int>(std::count(votes.begin(), votes.end(), *col));
  return m;
}

/// v_x = -v_d / cos(azimuth), assuming zero lateral speed and elevation.
inline double doppler_to_forward_velocity(const DopplerMeasurement& m) {
  const double az_rad = m.azimuth * M_PI / 180.0;
  if (std::abs(m.azimuth) >= 90.0)
    throw std::domain_error("doppler_to_forward_velocity: |azimuth| >= 90 deg");
  return -m.radial_speed / std::cos(az_rad);
}

}  // namespace rlio
