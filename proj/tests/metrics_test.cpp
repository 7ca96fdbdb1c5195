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

#include "rlio/eval/metrics.hpp"
#include "rlio/rng.hpp"
#include "rlio/sim/trajectory_profile.hpp"

using namespace rlio;

namespace {

TrajectoryRecord straight_line(double length_m, double step_m) {
  TrajectoryRecord out;
  double path = 0.0;
  int k = 0;
  while (path <= length_m + 1e-9) {
    TrajectorySample s;
    s.timestamp = k;
    s.pose = Pose(Mat3::Identity(), Vec3(path, 0, 0));
    s.velocity = Vec3(step_m, 0, 0);  // 1 step per second
    out.push_back(s);
    path += step_m;
    ++k;
  }
  return out;
}

TrajectoryRecord transform_left(const TrajectoryRecord& traj, const Pose& g) {
  TrajectoryRecord out = traj;
  for (auto& s : out) {
    s.pose = compose(g, s.pose);
    s.velocity = g.R * s.velocity;
  }
  return out;
}

}  // namespace

TEST_CASE("rpe of a trajectory against itself is zero") {
  const auto profile =
      parse_trajectory_profile("accel:2:5,turn:0.3:6,cruise:5");
  const TrajectoryRecord gt = generate_truth(profile, 20.0);
  const auto m = rpe(gt, gt, 10.0);
  REQUIRE(m.has_value());
  CHECK(m->rmse < 1e-12);
  CHECK(m->stddev < 1e-12);
  CHECK(m->count() > 10);
}

TEST_CASE("rpe is invariant to rigid transforms of either input") {
  const auto profile = parse_trajectory_profile("accel:2:5,turn:0.25:8");
  const TrajectoryRecord gt = generate_truth(profile, 20.0);
  const Pose g(so3_exp(Vec3(0.2, -0.1, 0.7)), Vec3(100, -50, 3));

  // both transformed
  auto m = rpe(transform_left(gt, g), transform_left(gt, g), 10.0);
  REQUIRE(m.has_value());
  CHECK(m->rmse < 1e-10);

  // estimate alone transformed: relative-pose construction cancels it
  m = rpe(transform_left(gt, g), gt, 10.0);
  REQUIRE(m.has_value());
  CHECK(m->rmse < 1e-10);
}

TEST_CASE("rpe of a one-percent scale error on a straight line") {
  const TrajectoryRecord gt = straight_line(100.0, 1.0);
  TrajectoryRecord est = gt;
  for (auto& s : est) s.pose.p *= 1.01;

  const auto m = rpe(est, gt, 10.0);
  REQUIRE(m.has_value());
  // every 10 m pair carries exactly 0.1 m of translational error
  CHECK(m->rmse == Catch::Approx(0.1).margin(1e-9));
  CHECK(m->stddev < 1e-9);
}

TEST_CASE("rpe signals trajectories shorter than the delta") {
  const TrajectoryRecord gt = straight_line(5.0, 0.5);
  CHECK_FALSE(rpe(gt, gt, 10.0).has_value());
}

TEST_CASE("velocity error basics") {
  const auto profile = parse_trajectory_profile("accel:1:5,cruise:5");
  const TrajectoryRecord gt = generate_truth(profile, 50.0);

  SECTION("self comparison is zero") {
    const auto m = velocity_error(gt, gt, 0);
    REQUIRE(m.has_value());
    CHECK(m->rmse == 0.0);
    CHECK(m->stddev == 0.0);
  }

  SECTION("constant forward offset shows as pure bias") {
    TrajectoryRecord est = gt;
    for (auto& s : est) s.velocity += s.pose.R * Vec3(0.1, 0, 0);
    const auto m = velocity_error(est, gt, 0);
    REQUIRE(m.has_value());
    CHECK(m->rmse == Catch::Approx(0.1).margin(1e-12));
    CHECK(m->stddev < 1e-12);
  }

  SECTION("zero-mean gaussian error reproduces its sigma") {
    Rng rng(31);
    TrajectoryRecord gt_long;
    for (int k = 0; k < 10000; ++k) {
      TrajectorySample s;
      s.timestamp = 0.01 * k;
      s.pose = Pose(Mat3::Identity(), Vec3(0.05 * k, 0, 0));
      s.velocity = Vec3(5, 0, 0);
      gt_long.push_back(s);
    }
    TrajectoryRecord est = gt_long;
    for (auto& s : est) s.velocity.x() += 0.16 * rng.normal();
    const auto m = velocity_error(est, gt_long, 0);
    REQUIRE(m.has_value());
    CHECK(m->rmse > 0.9 * 0.16);
    CHECK(m->rmse < 1.1 * 0.16);
  }
}

TEST_CASE("velocity error uses each record's own body frame") {
  // estimate with a yaw error: world velocities equal, body-forward differs
  TrajectoryRecord gt = straight_line(20.0, 1.0);
  TrajectoryRecord est = gt;
  const double yaw = 0.2;
  for (auto& s : est) s.pose.R = so3_exp(Vec3(0, 0, yaw));  // velocity kept

  const auto m = velocity_error(est, gt, 0);
  REQUIRE(m.has_value());
  CHECK(m->rmse == Catch::Approx(1.0 - std::cos(yaw)).margin(1e-9));

  const auto lat = velocity_error(est, gt, 1);
  REQUIRE(lat.has_value());
  CHECK(lat->rmse == Catch::Approx(std::sin(yaw)).margin(1e-9));
}

TEST_CASE("resampling interpolates the estimate onto truth timestamps") {
  const auto profile = parse_trajectory_profile("accel:2:4,cruise:4");
  const TrajectoryRecord gt = generate_truth(profile, 40.0);
  const TrajectoryRecord est_sparse = generate_truth(profile, 7.0);

  const auto m = velocity_error(est_sparse, gt, 0);
  REQUIRE(m.has_value());
  CHECK(m->rmse < 0.02);  // interpolation error only

  // disjoint spans are signaled
  TrajectoryRecord late = gt;
  for (auto& s : late) s.timestamp += 1000.0;
  CHECK_FALSE(velocity_error(late, gt, 0).has_value());
}

TEST_CASE("metric report packaging") {
  MetricSeries r, v;
  r.rmse = 0.3;
  r.stddev = 0.2;
  r.errors = {0.1, 0.2};
  r.timestamps = {0, 1};
  v.rmse = 0.15;
  v.stddev = 0.14;
  v.errors = {0.1};
  v.timestamps = {0};
  const MetricReport rep = make_report("lri", r, v);
  CHECK(rep.method == "lri");
  CHECK(rep.rpe_rmse == 0.3);
  CHECK(rep.vel_rmse == 0.15);
  CHECK(rep.rpe_samples == 2);
  CHECK(rep.vel_samples == 1);
}
