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

#include "rlio/sim/sensors.hpp"
#include "rlio/sim/trajectory_profile.hpp"

using namespace rlio;

TEST_CASE("zero-motion profile is constant") {
  const auto profile = parse_trajectory_profile("still:5");
  const TrajectoryRecord truth = generate_truth(profile, 50.0);
  REQUIRE(truth.size() == 251);
  for (const auto& s : truth) {
    CHECK(s.pose.p.norm() == 0.0);
    CHECK(s.velocity.norm() == 0.0);
    CHECK((s.pose.R - Mat3::Identity()).norm() == 0.0);
  }
}

TEST_CASE("constant acceleration follows the kinematic closed form") {
  const auto profile = parse_trajectory_profile("accel:2:6");
  const MotionSample end = profile.sample(6.0);
  CHECK(end.speed == Catch::Approx(12.0).margin(1e-12));
  CHECK(end.position.x() == Catch::Approx(36.0).margin(1e-12));
  CHECK(end.position.y() == 0.0);
  CHECK(profile.velocity_at(3.0).x() == Catch::Approx(6.0).margin(1e-12));
}

TEST_CASE("constant-rate circle closes after one lap") {
  // speed 4 m/s, rate 0.4 rad/s -> radius 10 m, lap time 2*pi/0.4
  const double speed = 4.0, rate = 0.4;
  const double lap = 2.0 * M_PI / rate;
  TrajectorySegment accel{TrajectorySegment::Type::kAccelerate, 1.0, speed};
  TrajectorySegment turn{TrajectorySegment::Type::kTurn, lap, rate};
  const TrajectoryProfile profile({accel, turn});

  const Vec3 start = profile.sample(1.0).position;
  const Vec3 end = profile.sample(1.0 + lap).position;
  CHECK((end - start).norm() < 1e-9);

  // circumference = speed * lap = 2 pi R
  const double radius = speed / rate;
  CHECK(speed * lap == Catch::Approx(2.0 * M_PI * radius).margin(1e-12));
}

TEST_CASE("truth is kinematically consistent") {
  const auto profile = parse_trajectory_profile(
      "still:1,accel:2:4,cruise:2,turn:0.4:5,accel:-1:2,cruise:2");
  const double rate = 400.0, dt = 1.0 / rate;
  for (double t = dt; t < profile.total_duration() - dt; t += 0.37) {
    const Vec3 fd_vel =
        (profile.sample(t + dt).position - profile.sample(t - dt).position) /
        (2.0 * dt);
    CHECK((fd_vel - profile.velocity_at(t)).norm() < 1e-4);
    const Vec3 fd_acc =
        (profile.velocity_at(t + dt) - profile.velocity_at(t - dt)) /
        (2.0 * dt);
    CHECK((fd_acc - profile.acceleration_at(t)).norm() < 2e-3);
  }
}

TEST_CASE("profile parser rejects malformed segments") {
  CHECK_THROWS_AS(parse_trajectory_profile(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_trajectory_profile("fly:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trajectory_profile("accel:2"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trajectory_profile("cruise:abc"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_trajectory_profile("cruise:-1"),
                  std::invalid_argument);
}

TEST_CASE("static IMU stream is gravity plus bias") {
  const auto profile = parse_trajectory_profile("still:2");
  ImuSimParams params;
  params.add_noise = false;
  params.gravity = 9.81;
  params.accel_bias = Vec3(0.01, 0.0, -0.02);
  params.gyro_bias = Vec3(0.001, 0.002, 0.003);
  const auto stream = simulate_imu(profile, params, 1);
  REQUIRE(stream.size() == 801);
  for (const auto& m : stream) {
    CHECK((m.specific_force - (Vec3(0, 0, 9.81) + params.accel_bias)).norm() <
          1e-12);
    CHECK((m.angular_velocity - params.gyro_bias).norm() < 1e-12);
  }
}

TEST_CASE("re-integrating a noise-free stream reproduces the truth") {
  // straight profile: zero-order-hold integration is exact on it
  const auto profile = parse_trajectory_profile("still:1,accel:1:5,cruise:4");
  ImuSimParams params;
  params.add_noise = false;
  const auto stream = simulate_imu(profile, params, 1);

  Vec3 v = Vec3::Zero(), p = Vec3::Zero();
  Rotation R = Rotation::Identity();
  const Vec3 g(0, 0, -params.gravity);
  for (std::size_t k = 0; k + 1 < stream.size(); ++k) {
    const double dt = stream[k + 1].timestamp - stream[k].timestamp;
    const Vec3 a = R * stream[k].specific_force + g;
    p += v * dt + 0.5 * a * dt * dt;
    v += a * dt;
    R = R * so3_exp(stream[k].angular_velocity * dt);
  }
  const double t_end = stream.back().timestamp;
  CHECK((v - profile.velocity_at(t_end)).norm() < 1e-6);
  CHECK((p - profile.sample(t_end).position).norm() < 1e-5);
}

TEST_CASE("imu stream is seed-deterministic") {
  const auto profile = parse_trajectory_profile("accel:2:3");
  ImuSimParams params;
  const auto a = simulate_imu(profile, params, 99);
  const auto b = simulate_imu(profile, params, 99);
  const auto c = simulate_imu(profile, params, 100);
  REQUIRE(a.size() == b.size());
  bool identical = true, differs_from_c = false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    identical = identical &&
                (a[k].specific_force - b[k].specific_force).norm() == 0.0 &&
                (a[k].angular_velocity - b[k].angular_velocity).norm() == 0.0;
    differs_from_c =
        differs_from_c ||
        (a[k].specific_force - c[k].specific_force).norm() > 0.0;
  }
  CHECK(identical);
  CHECK(differs_from_c);
}

TEST_CASE("noise-free lidar odometry is exactly consistent") {
  const auto profile = parse_trajectory_profile("accel:1:3,turn:0.3:4");
  LidarSimParams params;
  params.sigma_rotation = 0.0;
  params.sigma_translation = 0.0;
  const auto stream = simulate_lidar_odometry(profile, params, {}, 1);
  REQUIRE(!stream.empty());
  for (const auto& m : stream) {
    const Pose expected = compose(inverse(profile.pose_at(m.t_prev)),
                                  profile.pose_at(m.t_cur));
    CHECK((m.relative_transform.R - expected.R).norm() < 1e-14);
    CHECK((m.relative_transform.p - expected.p).norm() < 1e-14);
  }
}

TEST_CASE("dropout removes exactly the covered measurements") {
  const auto profile = parse_trajectory_profile("cruise:10");
  LidarSimParams params;
  DropoutSchedule schedule;
  schedule.windows = {{5.0, 8.0}};
  const auto with = simulate_lidar_odometry(profile, params, schedule, 1);
  const auto without = simulate_lidar_odometry(profile, params, {}, 1);
  CHECK(without.size() - with.size() == 30);  // 30 samples at 10 Hz in (5, 8]
  for (const auto& m : with) {
    CHECK(!(m.t_cur > 5.0 && m.t_cur <= 8.0));
  }
}

TEST_CASE("dropout schedule validation") {
  DropoutSchedule s;
  s.windows = {{5.0, 4.0}};
  CHECK_THROWS_AS(s.validate(10.0), std::invalid_argument);
  s.windows = {{1.0, 3.0}, {2.0, 4.0}};
  CHECK_THROWS_AS(s.validate(10.0), std::invalid_argument);
  s.windows = {{1.0, 3.0}, {4.0, 12.0}};
  CHECK_THROWS_AS(s.validate(10.0), std::invalid_argument);
  s.windows = {{1.0, 3.0}, {4.0, 9.0}};
  CHECK_NOTHROW(s.validate(10.0));
}

TEST_CASE("lidar noise vanishes continuously with sigma") {
  const auto profile = parse_trajectory_profile("accel:1:4");
  LidarSimParams tiny;
  tiny.sigma_rotation = 1e-9;
  tiny.sigma_translation = 1e-9;
  const auto noisy = simulate_lidar_odometry(profile, tiny, {}, 7);
  for (const auto& m : noisy) {
    const Pose expected = compose(inverse(profile.pose_at(m.t_prev)),
                                  profile.pose_at(m.t_cur));
    CHECK(se3_log(compose(inverse(expected), m.relative_transform)).norm() <
          1e-7);
  }
}

TEST_CASE("radar beam places target energy at the doppler of -r.v") {
  WaveformConfig w;
  w.n_range_bins = 64;
  w.range_resolution = 0.5;
  w.max_range = 32.0;
  w.n_doppler_bins = 128;
  w.doppler_resolution = 0.25;
  w.max_doppler = 16.0;

  SceneModel scene;
  scene.noise_power = 0.0;  // deposits only
  scene.add_target(Vec3(20.0, 0.0, 0.0), 50.0);
  const Extrinsics ext;

  SECTION("static ego: energy in the zero-doppler column") {
    RadarEgoState ego;
    Rng rng(1);
    const auto beam = simulate_radar_beam(ego, scene, w, ext, 0, 0, 0, rng);
    const int col0 = doppler_to_bin(0.0, w);
    double on_axis = 0.0, total = 0.0;
    for (const auto& px : beam.pixels)
      for (int r = 0; r < px.rows(); ++r)
        for (int c = 0; c < px.cols(); ++c) {
          total += px.at(r, c);
          if (std::abs(c - col0) <= 1) on_axis += px.at(r, c);
        }
    REQUIRE(total > 0.0);
    CHECK(on_axis == Catch::Approx(total));
  }

  SECTION("forward ego motion lands at -speed") {
    RadarEgoState ego;
    ego.velocity_world = Vec3(10.0, 0.0, 0.0);
    Rng rng(2);
    const auto beam = simulate_radar_beam(ego, scene, w, ext, 0, 0, 0, rng);
    const int expect_col = doppler_to_bin(-10.0, w);
    const int expect_row = range_to_bin(20.0, w);
    // target ahead at elevation 0 sits in pixel row 1, column 2
    const auto& px = beam.pixel(1, 2);
    CHECK(px.at(expect_row, expect_col) > 0.0);
    // nothing deposited at positive doppler
    double positive = 0.0;
    for (int r = 0; r < px.rows(); ++r)
      for (int c = doppler_to_bin(1.0, w); c < px.cols(); ++c)
        positive += px.at(r, c);
    CHECK(positive == 0.0);
  }

  SECTION("targets beyond max range deposit nothing") {
    SceneModel far_scene;
    far_scene.noise_power = 0.0;
    far_scene.add_target(Vec3(150.0, 0.0, 0.0), 50.0);
    WaveformConfig chirp;  // defaults: table-style, max range 100 m
    RadarEgoState ego;
    Rng rng(3);
    const auto beam =
        simulate_radar_beam(ego, far_scene, chirp, ext, 0, 0, 0, rng);
    double total = 0.0;
    for (const auto& px : beam.pixels)
      for (double v : px.intensities) total += v;
    CHECK(total == 0.0);
  }
}

TEST_CASE("beam sweep cadence and pattern") {
  const auto profile = parse_trajectory_profile("still:1,accel:2:2");
  SceneModel scene;
  scene.noise_power = 0.1;
  scene.add_target(Vec3(15, 0, 0), 10.0);

  WaveformConfig w;
  w.n_range_bins = 32;
  w.range_resolution = 1.0;
  w.max_range = 32.0;
  w.n_doppler_bins = 64;
  w.doppler_resolution = 0.5;
  w.max_doppler = 16.0;
  w.beam_sampling_time = 0.0158;

  SweepConfig sweep;
  sweep.az_min_deg = -35.0;
  sweep.az_max_deg = 35.0;
  sweep.az_step_deg = 10.0;  // 8 azimuths
  sweep.elevation_deg = -2.5;
  sweep.beam_period = 0.0158;

  const auto beams =
      sweep_beams(profile, scene, w, Extrinsics{}, sweep, 11);
  REQUIRE(beams.size() >= 16);

  // azimuth pattern repeats with period 8; elevation fixed at -2.5
  for (std::size_t k = 0; k < beams.size(); ++k) {
    CHECK(beams[k].beam_center_elevation == -2.5);
    if (k >= 8)
      CHECK(beams[k].beam_center_azimuth == beams[k - 8].beam_center_azimuth);
    if (k > 0)
      CHECK(beams[k].timestamp > beams[k - 1].timestamp);
  }
  CHECK(beams[1].timestamp - beams[0].timestamp ==
        Catch::Approx(0.0158).margin(1e-12));

  // seed determinism, bitwise
  const auto again =
      sweep_beams(profile, scene, w, Extrinsics{}, sweep, 11);
  REQUIRE(again.size() == beams.size());
  CHECK(again[5].pixels[7].intensities == beams[5].pixels[7].intensities);
}
