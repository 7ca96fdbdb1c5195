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

#include <catch2/catch_amalgamated.hpp>

#include "rlio/radar/cfar.hpp"
#include "rlio/rng.hpp"

using namespace rlio;

namespace {

WaveformConfig square_waveform(int rows, int cols) {
  WaveformConfig w;
  w.n_range_bins = rows;
  w.n_doppler_bins = cols;
  w.range_resolution = 0.5;
  w.max_range = rows * 0.5;
  w.doppler_resolution = 0.2;
  w.max_doppler = cols * 0.1;
  return w;
}

RangeDopplerMap exponential_map(int rows, int cols, double mean, Rng& rng) {
  RangeDopplerMap map(square_waveform(rows, cols));
  for (auto& v : map.intensities) v = rng.exponential(mean);
  return map;
}

}  // namespace

TEST_CASE("threshold scale formula") {
  // N * (pfa^{-1/N} - 1) against arbitrary-precision evaluations
  CHECK(cfar_threshold_scale(1, 0.1) == Catch::Approx(9.0).margin(1e-12));
  CHECK(cfar_threshold_scale(16, 0.01) ==
        Catch::Approx(5.33634291461318441).margin(1e-9));
  CHECK(cfar_threshold_scale(416, 1e-3) ==
        Catch::Approx(6.96542631264283487).margin(1e-9));
  CHECK(cfar_threshold_scale(32, 1e-3) ==
        Catch::Approx(7.71000834405502612).margin(1e-9));

  // strictly positive, monotonically decreasing in p_fa
  double prev = 1e300;
  for (double pfa : {1e-6, 1e-4, 1e-2, 0.1, 0.5, 0.9, 0.999999}) {
    const double a = cfar_threshold_scale(24, pfa);
    CHECK(a > 0.0);
    CHECK(a < prev);
    prev = a;
  }
  // p_fa -> 1 limit forces alpha -> 0
  CHECK(cfar_threshold_scale(24, 1.0 - 1e-12) < 1e-9);

  CHECK_THROWS_AS(cfar_threshold_scale(0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(cfar_threshold_scale(8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(cfar_threshold_scale(8, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cfar_threshold_scale(8, 1.5), std::invalid_argument);
}

TEST_CASE("all-zero map yields no detections") {
  RangeDopplerMap map(square_waveform(32, 48));
  CfarConfig cfg;
  CHECK(ca_cfar_2d(map, cfg).count() == 0);
}

TEST_CASE("single strong cell over a flat floor is the only detection") {
  // 1D window along range: N = 16 interior reference cells.
  CfarConfig cfg;
  cfg.guard_cells_range = 2;
  cfg.reference_cells_range = 8;
  cfg.guard_cells_doppler = 0;
  cfg.reference_cells_doppler = 0;
  cfg.p_fa = 0.01;

  RangeDopplerMap map(square_waveform(64, 64));
  for (auto& v : map.intensities) v = 1.0;
  map.at(32, 20) = 1000.0;  // 1000 > 5.336 * 1

  const DetectionMask mask = ca_cfar_2d(map, cfg);
  CHECK(mask.at(32, 20));
  CHECK(mask.count() == 1);
}

TEST_CASE("border cells shrink the window and rescale alpha") {
  // 3x3 map, guard 0, reference 1 per side per axis. Corner (0,0) keeps a
  // 2x2 clamped window: 3 reference cells.
  CfarConfig cfg;
  cfg.guard_cells_range = 0;
  cfg.guard_cells_doppler = 0;
  cfg.reference_cells_range = 1;
  cfg.reference_cells_doppler = 1;

  RangeDopplerMap map(square_waveform(3, 3));
  map.at(0, 0) = 4.0;
  map.at(0, 1) = 1.0;
  map.at(1, 0) = 1.0;
  map.at(1, 1) = 1.0;

  // alpha(3, 0.1) = 3*(0.1^{-1/3}-1) = 3.46331...; 4 > 3.463 * 1
  cfg.p_fa = 0.1;
  CHECK(ca_cfar_2d(map, cfg).at(0, 0));
  // alpha(3, 0.01) = 3*(0.01^{-1/3}-1) = 10.9249...; 4 < 10.92
  cfg.p_fa = 0.01;
  CHECK_FALSE(ca_cfar_2d(map, cfg).at(0, 0));
}

TEST_CASE("empirical false-alarm rate matches p_fa on exponential noise") {
  Rng rng(20240601);
  const RangeDopplerMap map = exponential_map(1000, 1000, 1.0, rng);
  CfarConfig cfg;  // default 2 guard + 8 reference per side per axis

  for (double pfa : {1e-2, 1e-3}) {
    cfg.p_fa = pfa;
    const DetectionMask mask = ca_cfar_2d(map, cfg);
    const double fraction =
        static_cast<double>(mask.count()) / (1000.0 * 1000.0);
    INFO("p_fa " << pfa << " empirical " << fraction);
    CHECK(fraction > 0.8 * pfa);
    CHECK(fraction < 1.2 * pfa);
  }
}

TEST_CASE("detection mask is scale invariant") {
  Rng rng(77);
  const RangeDopplerMap map = exponential_map(128, 96, 2.5, rng);
  CfarConfig cfg;
  cfg.p_fa = 1e-2;
  const DetectionMask base = ca_cfar_2d(map, cfg);
  REQUIRE(base.count() > 0);

  for (double scale : {4.0, 3.7, 0.015625}) {
    RangeDopplerMap scaled = map;
    for (auto& v : scaled.intensities) v *= scale;
    const DetectionMask mask = ca_cfar_2d(scaled, cfg);
    CHECK(mask.cells == base.cells);
  }
}

TEST_CASE("raising p_fa never removes a detection") {
  Rng rng(91);
  const RangeDopplerMap map = exponential_map(96, 96, 1.0, rng);
  CfarConfig cfg;
  cfg.p_fa = 1e-3;
  const DetectionMask strict = ca_cfar_2d(map, cfg);
  cfg.p_fa = 1e-2;
  const DetectionMask loose = ca_cfar_2d(map, cfg);
  REQUIRE(loose.count() >= strict.count());
  for (std::size_t i = 0; i < strict.cells.size(); ++i)
    if (strict.cells[i]) REQUIRE(loose.cells[i]);
}

TEST_CASE("degenerate configs are rejected") {
  RangeDopplerMap map(square_waveform(8, 8));
  CfarConfig cfg;
  cfg.reference_cells_range = 0;
  cfg.reference_cells_doppler = 0;
  CHECK_THROWS_AS(ca_cfar_2d(map, cfg), std::invalid_argument);

  cfg.reference_cells_range = 4;
  cfg.p_fa = 0.0;
  CHECK_THROWS_AS(ca_cfar_2d(map, cfg), std::invalid_argument);
  cfg.p_fa = 1e-3;
  cfg.guard_cells_range = -1;
  CHECK_THROWS_AS(ca_cfar_2d(map, cfg), std::invalid_argument);
}
