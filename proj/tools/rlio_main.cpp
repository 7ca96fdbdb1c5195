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
 * \file rlio_main.cpp
 * \brief Experiment CLI: run / compare / simulate-only / process-radar-only.
 */

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>

#include "rlio/experiment.hpp"
#include "rlio/io/beam_io.hpp"
#include "rlio/io/config.hpp"
#include "rlio/io/text_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNotConverged = 3;

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::string modalities;
  std::string dropout;
  std::int64_t seed = -1;
};

rlio::ExperimentConfig load_with_overrides(const CommonFlags& flags) {
  rlio::ExperimentConfig cfg = rlio::load_config(flags.config_path);
  rlio::apply_env_overrides(&cfg);
  if (flags.seed >= 0) cfg.seed = static_cast<std::uint64_t>(flags.seed);
  if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
  if (!flags.modalities.empty())
    cfg.modalities = rlio::detail::split(flags.modalities, ',');
  if (!flags.dropout.empty()) {
    if (flags.dropout == "none")
      cfg.dropout.clear();
    else
      cfg.dropout = rlio::detail::parse_windows("dropout", flags.dropout);
  }
  cfg.validate();
  return cfg;
}

int cmd_run(const CommonFlags& flags) {
  const rlio::ExperimentConfig cfg = load_with_overrides(flags);
  const rlio::ExperimentResult result = rlio::run_experiment(cfg);

  int not_converged = 0;
  for (const auto& m : result.modalities) {
    std::printf("%-4s rpe_rmse=%.6f rpe_std=%.6f vel_rmse=%.6f vel_std=%.6f\n",
                m.name.c_str(), m.report.rpe_rmse, m.report.rpe_std,
                m.report.vel_rmse, m.report.vel_std);
    not_converged += m.n_not_converged;
  }
  std::printf("artifacts written to %s\n", cfg.out_dir.c_str());
  if (not_converged > 0) {
    std::fprintf(stderr,
                 "warning: %d window updates did not converge; artifacts are "
                 "partial (see manifest.txt)\n",
                 not_converged);
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_compare(const std::vector<std::string>& report_paths) {
  if (report_paths.size() < 2) {
    std::fprintf(stderr, "compare: need at least two reports\n");
    return kExitUsage;
  }
  std::vector<rlio::MetricReport> reports;
  for (const auto& p : report_paths)
    reports.push_back(rlio::read_metric_report(p));

  const std::vector<std::pair<std::string, double rlio::MetricReport::*>> rows =
      {{"rpe_rmse", &rlio::MetricReport::rpe_rmse},
       {"rpe_std", &rlio::MetricReport::rpe_std},
       {"vel_rmse", &rlio::MetricReport::vel_rmse},
       {"vel_std", &rlio::MetricReport::vel_std}};

  std::printf("%-10s", "metric");
  for (const auto& r : reports) std::printf(" %14s", r.method.c_str());
  std::printf("\n");
  for (const auto& [name, member] : rows) {
    double best = reports.front().*member;
    for (const auto& r : reports) best = std::min(best, r.*member);
    int n_best = 0;
    for (const auto& r : reports)
      if (r.*member == best) ++n_best;
    std::printf("%-10s", name.c_str());
    for (const auto& r : reports) {
      const bool flag = (r.*member == best);
      char cell[32];
      std::snprintf(cell, sizeof(cell), "%.6f%s", r.*member,
                    flag ? (n_best > 1 ? " =" : " *") : "  ");
      std::printf(" %14s", cell);
    }
    std::printf("\n");
  }
  std::printf("(* best, = tie; lower is better)\n");
  return kExitOk;
}

int cmd_simulate_only(const CommonFlags& flags) {
  const rlio::ExperimentConfig cfg = load_with_overrides(flags);
  const rlio::SimulatedStreams streams =
      rlio::simulate_streams(cfg, /*force_radar=*/true, /*force_lidar=*/true);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  rlio::write_trajectory((dir / "truth.csv").string(), streams.truth);
  rlio::write_imu((dir / "imu.csv").string(), streams.imu);
  rlio::write_lidar((dir / "lidar.csv").string(), streams.lidar);
  rlio::write_beams((dir / "beams.rdb").string(), cfg.waveform, streams.beams);
  std::printf(
      "wrote %zu truth samples, %zu imu samples, %zu lidar measurements, "
      "%zu beams to %s\n",
      streams.truth.size(), streams.imu.size(), streams.lidar.size(),
      streams.beams.size(), cfg.out_dir.c_str());
  return kExitOk;
}

int cmd_process_radar_only(const std::string& input,
                           const std::string& config_path,
                           const std::string& out_dir) {
  rlio::ExperimentConfig cfg;
  if (!config_path.empty()) cfg = rlio::load_config(config_path);
  const rlio::BeamFile file = rlio::read_beams(input);

  std::vector<rlio::DopplerMeasurement> measurements;
  for (const auto& beam : file.beams)
    if (auto m = rlio::process_beam(beam, cfg.cfar, cfg.trim, cfg.min_votes))
      measurements.push_back(*m);

  const std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
  std::filesystem::create_directories(dir);
  rlio::write_doppler((dir / "doppler.csv").string(), measurements);
  std::printf("%zu of %zu beams produced a doppler measurement\n",
              measurements.size(), file.beams.size());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radar-velocity-aided LiDAR-inertial estimation experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::vector<std::string> report_paths;
  std::string radar_input;

  auto* run = app.add_subcommand("run", "simulate, estimate and evaluate");
  run->add_option("--config", flags.config_path, "experiment config file")
      ->required();
  run->add_option("--seed", flags.seed, "override seed");
  run->add_option("--out", flags.out_dir, "override output directory");
  run->add_option("--modalities", flags.modalities,
                  "override modalities, e.g. li,lri");
  run->add_option("--dropout", flags.dropout,
                  "override dropout windows, e.g. 20:35 (or 'none')");

  auto* compare =
      app.add_subcommand("compare", "tabulate metric reports side by side");
  compare->add_option("reports", report_paths, "metric report files");

  auto* sim = app.add_subcommand("simulate-only",
                                 "write sensor streams without estimating");
  sim->add_option("--config", flags.config_path, "experiment config file")
      ->required();
  sim->add_option("--seed", flags.seed, "override seed");
  sim->add_option("--out", flags.out_dir, "override output directory");

  auto* dsp = app.add_subcommand(
      "process-radar-only", "RD-map beam file -> doppler measurements");
  dsp->add_option("--input", radar_input, "RDB1 beam file")->required();
  dsp->add_option("--config", flags.config_path,
                  "config file for CFAR/trim/vote settings");
  dsp->add_option("--out", flags.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(flags);
    if (compare->parsed()) return cmd_compare(report_paths);
    if (sim->parsed()) return cmd_simulate_only(flags);
    if (dsp->parsed())
      return cmd_process_radar_only(radar_input, flags.config_path,
                                    flags.out_dir);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
