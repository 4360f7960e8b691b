// SPDX-License-Identifier: Apache-2.0
//
// mompkit - multidimensional sparse recovery, mmWave channel estimation and
// single-anchor indoor localization
// Copyright (C) 2026 mompkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MOMPKIT_EXPERIMENT_HPP
#define MOMPKIT_EXPERIMENT_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "mompkit/config.hpp"
#include "mompkit/locate.hpp"

namespace mompkit
{

// Per-position estimation and localization quality. Angular errors compare
// the strongest estimated path against the strongest true path; the delay
// error scores the best secondary match after anchoring to the true
// main-path delay; loc_error_m is NaN when no fix was produced.
struct MetricsRow
{
    Eigen::Index position_id = 0;
    Eigen::Vector3d true_user = Eigen::Vector3d::Zero();
    double doa_error_rad = 0.0;
    double dod_error_rad = 0.0;
    double nmse_db = 0.0;
    double delay2_error_s = 0.0;
    double loc_error_m = 0.0;
    bool detected = false;
    double tau0_est_s = 0.0;
    Eigen::Index n_wall = 0;
    Eigen::Index n_floor_ceiling = 0;
    Eigen::Index n_spurious = 0;
    bool omp_ran = false;
    double omp_doa_error_rad = 0.0;
    double solve_time_s = 0.0; // wall time; written to the timing file only
    double omp_time_s = 0.0;
};

struct SweepPoint
{
    std::string tag;
    double k_res = 0.0;
    double power_dbm = 0.0;
    Eigen::Index frames = 0;
    std::vector<MetricsRow> rows;
    std::vector<LocationFix> fixes;
};

struct ExperimentResult
{
    std::vector<SweepPoint> sweeps;
    std::vector<std::string> files; // everything written, relative to output_dir
};

// Runs the full pipeline for every sweep point (cartesian product of the
// configured k_res, power and frame-count lists) and position: trace or load
// the true paths, synthesize and whiten the training observations, build the
// measurement tensor and dictionaries, recover paths, localize, and score.
// Writes metrics_<tag>.csv, fixes_<tag>.csv and timing_<tag>.csv per sweep
// point plus a percentile summary.csv into output_dir. Except for the timing
// files, outputs depend only on the config and seed.
ExperimentResult run_experiment(const ExperimentConfig &config, std::ostream &log);

} // namespace mompkit

#endif
