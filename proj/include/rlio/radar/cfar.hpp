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
 * \file cfar.hpp
 * \brief Cell-averaging CFAR detection on range-doppler maps.
 *
 * The test cell is classified as a target when its intensity exceeds
 * alpha * sigma_hat^2, where sigma_hat^2 is the mean of the reference cells
 * (the rectangular ring outside the guard region) and
 * alpha = N * (P_FA^(-1/N) - 1).
 *
 * Cells whose reference window is clipped by the map border use the cells
 * that remain, with alpha recomputed for the actual reference count, so the
 * configured false-alarm rate holds per cell. Sums are evaluated with a
 * summed-area table, keeping the cost independent of window size.
 */

#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "rlio/radar/waveform.hpp"

namespace rlio {

/// CA-CFAR window geometry (cells per side on each axis) and target P_FA.
struct CfarConfig {
  int guard_cells_range = 2;
  int guard_cells_doppler = 2;
  int reference_cells_range = 8;
  int reference_cells_doppler = 8;
  double p_fa = 1e-3;

  void validate() const {
    if (guard_cells_range < 0 || guard_cells_doppler < 0 ||
        reference_cells_range < 0 || reference_cells_doppler < 0)
      throw std::invalid_argument("cfar: cell counts must be non-negative");
    if (reference_cells_range + reference_cells_doppler < 1)
      throw std::invalid_argument("cfar: need at least one reference cell");
    if (!(p_fa > 0.0 && p_fa < 1.0))
      throw std::invalid_argument("cfar: p_fa must be in (0, 1)");
  }
};

/// Threshold scaling alpha = N * (P_FA^(-1/N) - 1).
inline double cfar_threshold_scale(int n_reference, double p_fa) {
  if (n_reference < 1)
    throw std::invalid_argument("cfar_threshold_scale: N must be >= 1");
  if (!(p_fa > 0.0 && p_fa < 1.0))
    throw std::invalid_argument("cfar_threshold_scale: p_fa must be in (0,1)");
  const double n = static_cast<double>(n_reference);
  return n * (std::pow(p_fa, -1.0 / n) - 1.0);
}

/// Boolean detection grid with the waveform carried along so that masks can
/// be mapped back to physical units downstream.
struct DetectionMask {
  WaveformConfig waveform;
  int n_rows = 0;
  int n_cols = 0;
  std::vector<std::uint8_t> cells;  // row-major, 1 = detection

  DetectionMask() = default;
  explicit DetectionMask(const WaveformConfig& w)
      : waveform(w),
        n_rows(w.n_range_bins),
        n_cols(w.n_doppler_bins),
        cells(static_cast<std::size_t>(w.n_range_bins) * w.n_doppler_bins, 0) {}

  bool at(int r, int c) const {
    return cells[static_cast<std::size_t>(r) * n_cols + c] != 0;
  }
  void set(int r, int c, bool v) {
    cells[static_cast<std::size_t>(r) * n_cols + c] = v ? 1 : 0;
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (auto v : cells) n += v;
    return n;
  }
};

/// Classifies every cell of the map; true = H1 (target present).
inline DetectionMask ca_cfar_2d(const RangeDopplerMap& map,
                                const CfarConfig& cfg) {
  cfg.validate();
  const int rows = map.rows();
  const int cols = map.cols();
  DetectionMask mask(map.waveform);

  // Summed-area table, (rows+1) x (cols+1).
  std::vector<double> sat(static_cast<std::size_t>(rows + 1) * (cols + 1), 0.0);
  const auto sat_at = [&](int r, int c) -> double& {
    return sat[static_cast<std::size_t>(r) * (cols + 1) + c];
  };
  for (int r = 0; r < rows; ++r) {
    double row_sum = 0.0;
    for (int c = 0; c < cols; ++c) {
      row_sum += map.at(r, c);
      sat_at(r + 1, c + 1) = sat_at(r, c + 1) + row_sum;
    }
  }
  // Inclusive rectangle sum/area over clamped bounds.
  const auto rect_sum = [&](int r0, int r1, int c0, int c1) {
    return sat_at(r1 + 1, c1 + 1) - sat_at(r0, c1 + 1) - sat_at(r1 + 1, c0) +
           sat_at(r0, c0);
  };

  const int wr = cfg.guard_cells_range + cfg.reference_cells_range;
  const int wc = cfg.guard_cells_doppler + cfg.reference_cells_doppler;
  const int gr = cfg.guard_cells_range;
  const int gc = cfg.guard_cells_doppler;

  // alpha depends only on the reference-cell count; cache per count.
  const int max_n = (2 * wr + 1) * (2 * wc + 1);
  std::vector<double> alpha_by_n(static_cast<std::size_t>(max_n) + 1, -1.0);

  for (int r = 0; r < rows; ++r) {
    const int or0 = std::max(0, r - wr), or1 = std::min(rows - 1, r + wr);
    const int gr0 = std::max(0, r - gr), gr1 = std::min(rows - 1, r + gr);
    for (int c = 0; c < cols; ++c) {
      const int oc0 = std::max(0, c - wc), oc1 = std::min(cols - 1, c + wc);
      const int gc0 = std::max(0, c - gc), gc1 = std::min(cols - 1, c + gc);

      const int n_outer = (or1 - or0 + 1) * (oc1 - oc0 + 1);
      const int n_guard = (gr1 - gr0 + 1) * (gc1 - gc0 + 1);
      const int n_ref = n_outer - n_guard;
      if (n_ref <= 0) continue;  // nothing to estimate noise from

      double& alpha = alpha_by_n[n_ref];
      if (alpha < 0.0) alpha = cfar_threshold_scale(n_ref, cfg.p_fa);

      const double ref_sum =
          rect_sum(or0, or1, oc0, oc1) - rect_sum(gr0, gr1, gc0, gc1);
      if (map.at(r, c) * n_ref > alpha * ref_sum) mask.set(r, c, true);
    }
  }
  return mask;
}

}  // namespace rlio
