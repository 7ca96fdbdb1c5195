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

#include "rlio/imu/preintegration.hpp"
#include "rlio/rng.hpp"

using namespace rlio;

namespace {

std::vector<ImuMeasurement> constant_stream(const Vec3& w, const Vec3& f,
                                            double duration, double rate) {
  std::vector<ImuMeasurement> out;
  const double dt = 1.0 / rate;
  for (double t = 0.0; t < duration - 0.5 * dt; t += dt)
    out.push_back({w, f, t});
  return out;
}

}  // namespace

TEST_CASE("zero rates integrate to the identity delta") {
  const auto d = preintegrate(
      constant_stream(Vec3::Zero(), Vec3::Zero(), 1.0, 100.0), Vec6::Zero(),
      1.0);
  CHECK((d.delta_rotation - Mat3::Identity()).norm() < 1e-14);
  CHECK(d.delta_velocity.norm() < 1e-14);
  CHECK(d.delta_position.norm() < 1e-14);
  CHECK(d.duration == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("constant rotation rate about one axis is exact") {
  const Vec3 w(0, 0, 1);
  const auto d =
      preintegrate(constant_stream(w, Vec3::Zero(), 1.0, 200.0), Vec6::Zero(),
                   1.0);
  CHECK((d.delta_rotation - so3_exp(w)).norm() < 1e-12);
}

TEST_CASE("constant force matches the kinematic closed form") {
  const Vec3 a(1, 0, 0);
  const auto d =
      preintegrate(constant_stream(Vec3::Zero(), a, 2.0, 100.0), Vec6::Zero(),
                   2.0);
  CHECK((d.delta_velocity - Vec3(2, 0, 0)).norm() < 1e-12);
  CHECK((d.delta_position - Vec3(2, 0, 0)).norm() < 1e-12);
}

TEST_CASE("bias correction is consistent with re-integration") {
  Rng rng(3);
  std::vector<ImuMeasurement> stream;
  for (int k = 0; k < 40; ++k)
    stream.push_back({0.4 * rng.normal3(), 2.0 * rng.normal3(), k * 0.005});
  const double end_time = 0.2;

  Vec6 bias;
  bias << 0.05, -0.02, 0.01, 0.004, -0.003, 0.002;
  const auto at_bias = preintegrate(stream, bias, end_time);

  // First-order correction from the linearization bias approximates the
  // delta integrated at a shifted bias.
  Vec6 shift;
  shift << 2e-3, -1e-3, 1.5e-3, 1e-4, 2e-4, -1e-4;
  const auto shifted = preintegrate(stream, bias + shift, end_time);

  const Vec3 corr_rot = at_bias.d_rot_d_bg() * shift.tail<3>();
  const Vec3 corr_vel = at_bias.delta_velocity +
                        at_bias.d_vel_d_ba() * shift.head<3>() +
                        at_bias.d_vel_d_bg() * shift.tail<3>();
  const Vec3 corr_pos = at_bias.delta_position +
                        at_bias.d_pos_d_ba() * shift.head<3>() +
                        at_bias.d_pos_d_bg() * shift.tail<3>();

  CHECK(so3_log(shifted.delta_rotation.transpose() * at_bias.delta_rotation *
                so3_exp(corr_rot))
            .norm() < 1e-6);
  CHECK((shifted.delta_velocity - corr_vel).norm() < 1e-6);
  CHECK((shifted.delta_position - corr_pos).norm() < 1e-6);
}

TEST_CASE("covariance is symmetric positive semi-definite and grows") {
  Rng rng(5);
  std::vector<ImuMeasurement> stream;
  for (int k = 0; k < 80; ++k)
    stream.push_back({0.2 * rng.normal3(), Vec3(0, 0, 9.81) + rng.normal3(),
                      k * 0.0025});
  const auto d = preintegrate(stream, Vec6::Zero(), 0.2);

  CHECK((d.covariance - d.covariance.transpose()).norm() < 1e-15);
  Eigen::SelfAdjointEigenSolver<Mat9> eig(d.covariance);
  CHECK(eig.eigenvalues().minCoeff() > -1e-15);

  const auto half = preintegrate(
      std::vector<ImuMeasurement>(stream.begin(), stream.begin() + 40),
      Vec6::Zero(), 0.1);
  CHECK(d.covariance.trace() > half.covariance.trace());
}

TEST_CASE("propagated covariance matches a Monte-Carlo estimate") {
  // Noise-free reference.
  const Vec3 w(0.3, -0.1, 0.5), f(0.4, 9.6, 1.0);
  const double rate = 200.0, duration = 0.1;
  const ImuNoise noise;  // defaults: gyro 1e-3, accel 1e-2
  const auto ref = preintegrate(constant_stream(w, f, duration, rate),
                                Vec6::Zero(), duration, noise);

  const double sg = noise.gyro_noise_density * std::sqrt(rate);
  const double sa = noise.accel_noise_density * std::sqrt(rate);

  Rng rng(8);
  const int n_trials = 4000;
  Mat9 sample_cov = Mat9::Zero();
  for (int trial = 0; trial < n_trials; ++trial) {
    auto stream = constant_stream(w, f, duration, rate);
    for (auto& m : stream) {
      m.angular_velocity += sg * rng.normal3();
      m.specific_force += sa * rng.normal3();
    }
    const auto d = preintegrate(stream, Vec6::Zero(), duration, noise);
    Vec9 err;
    err.head<3>() =
        so3_log(ref.delta_rotation.transpose() * d.delta_rotation);
    err.segment<3>(3) = d.delta_velocity - ref.delta_velocity;
    err.tail<3>() = d.delta_position - ref.delta_position;
    sample_cov += err * err.transpose();
  }
  sample_cov /= static_cast<double>(n_trials);

  for (int i = 0; i < 9; ++i) {
    const double expected = ref.covariance(i, i);
    const double got = sample_cov(i, i);
    INFO("diagonal " << i << " expected " << expected << " got " << got);
    CHECK(got > 0.6 * expected);
    CHECK(got < 1.5 * expected);
  }
}

TEST_CASE("empty and non-monotone intervals are rejected") {
  CHECK_THROWS_AS(preintegrate({}, Vec6::Zero(), 1.0), std::invalid_argument);
  std::vector<ImuMeasurement> bad = {{Vec3::Zero(), Vec3::Zero(), 0.1},
                                     {Vec3::Zero(), Vec3::Zero(), 0.05}};
  CHECK_THROWS_AS(preintegrate(bad, Vec6::Zero(), 0.2),
                  std::invalid_argument);
}

TEST_CASE("static initialization on a level platform") {
  std::vector<ImuMeasurement> buffer;
  for (int k = 0; k <= 400; ++k)
    buffer.push_back({Vec3::Zero(), Vec3(0, 0, 9.81), k * 0.0025});

  const auto init = static_initialize(buffer, 1.0);
  CHECK((init.world_from_imu - Mat3::Identity()).norm() < 1e-12);
  CHECK(init.gravity_magnitude == Catch::Approx(9.81).margin(1e-12));
  CHECK(init.gyro_bias.norm() < 1e-15);
}

TEST_CASE("static initialization recovers a constant gyro bias") {
  const Vec3 bias(0.01, -0.02, 0.005);
  std::vector<ImuMeasurement> buffer;
  for (int k = 0; k <= 400; ++k)
    buffer.push_back({bias, Vec3(0, 0, 9.81), k * 0.0025});
  const auto init = static_initialize(buffer, 1.0);
  CHECK((init.gyro_bias - bias).norm() < 1e-15);
}

TEST_CASE("static initialization recovers pitch") {
  const double pitch = 10.0 * M_PI / 180.0;
  const Rotation R = so3_exp(Vec3(0.0, pitch, 0.0));
  const Vec3 f = R.transpose() * Vec3(0, 0, 9.81);

  std::vector<ImuMeasurement> buffer;
  for (int k = 0; k <= 400; ++k) buffer.push_back({Vec3::Zero(), f, k * 0.0025});

  const auto init = static_initialize(buffer, 1.0);
  CHECK(so3_log(init.world_from_imu * R.transpose()).norm() < 1e-6);
  // the recovered attitude maps the mean force to the world vertical
  CHECK((init.world_from_imu * f - Vec3(0, 0, 9.81)).norm() < 1e-9);
}

TEST_CASE("static initialization rejects excited platforms") {
  Rng rng(9);
  std::vector<ImuMeasurement> buffer;
  for (int k = 0; k <= 400; ++k)
    buffer.push_back(
        {Vec3::Zero(), Vec3(0, 0, 9.81) + 3.0 * rng.normal3(), k * 0.0025});
  CHECK_THROWS_AS(static_initialize(buffer, 1.0, 0.5), std::runtime_error);
}

TEST_CASE("static initialization needs enough span") {
  std::vector<ImuMeasurement> buffer = {{Vec3::Zero(), Vec3(0, 0, 9.81), 0.0},
                                        {Vec3::Zero(), Vec3(0, 0, 9.81), 0.2}};
  CHECK_THROWS_AS(static_initialize(buffer, 1.0), std::invalid_argument);
}
