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

#ifndef MOMPKIT_CONFIG_HPP
#define MOMPKIT_CONFIG_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mompkit/channel.hpp"
#include "mompkit/locate.hpp"
#include "mompkit/scenario.hpp"
#include "mompkit/solver.hpp"

namespace mompkit
{

// Full experiment description, filled from an INI-style key=value file.
// Power levels are configured in dBm and converted to watts on use.
struct ExperimentConfig
{
    // [scenario]
    Room room;
    Eigen::Vector3d anchor{3.0, 4.0, 1.5};
    std::vector<Eigen::Vector3d> positions; // explicit user positions
    Eigen::Vector3d user_start = Eigen::Vector3d::Zero();
    Eigen::Vector3d user_end = Eigen::Vector3d::Zero();
    Eigen::Index user_count = 0;            // line sweep when positions is empty
    double reflection_loss_db = 6.0;
    double carrier_ghz = 60.0;
    bool second_order = false;
    std::string paths_file;                 // non-empty: bypass room tracing
    Eigen::Vector3d paths_user = Eigen::Vector3d::Zero();
    double paths_tau0_s = 0.0;

    // [arrays]
    ArrayGeometry tx{2, 2};
    ArrayGeometry rx{4, 4};

    // [training]
    Eigen::Index rx_chains = 4;
    Eigen::Index symbols = 16;
    Eigen::Index taps = 8;
    double sampling_time_ns = 0.5;
    Eigen::Index pilot_active = -1;
    double power_dbm = 20.0;
    double noise_dbm = -std::numeric_limits<double>::infinity();

    // [solver]
    double k_res = 4.0;
    Eigen::Index sparsity = 3;
    Eigen::Index refinement_sweeps = 3;
    double coarse_init_factor = 1.0;
    InitCoefficientMode init_mode = InitCoefficientMode::full;
    double stop_tol = 0.0;

    // [locate]
    ClassifierThresholds thresholds;

    // [sweep] (empty list = single point at the base value)
    std::vector<double> sweep_k_res;
    std::vector<double> sweep_power_dbm;
    std::vector<Eigen::Index> sweep_frames;

    // [run]
    std::uint64_t seed = 1;
    std::string output_dir = "out";
    std::string omp_baseline = "auto"; // auto | on | off
    std::string tau0_mode = "los";     // los | fixed
    double tau0_s = 0.0;

    // Semantic checks beyond parsing; throws config_error.
    void validate() const;

    double transmit_power_w() const;
    double noise_variance_w() const;
    double sampling_time_s() const { return sampling_time_ns * 1e-9; }
    double wavelength_m() const { return speed_of_light / (carrier_ghz * 1e9); }

    // All user positions of one run, explicit or from the line sweep.
    std::vector<Eigen::Vector3d> resolved_positions() const;
};

// Parses INI-style text: [section] headers, key = value lines, '#' comments.
// Unknown sections or keys are rejected.
ExperimentConfig parse_config(const std::string &text);

ExperimentConfig load_config(const std::string &filename);

// Built-in configurations; listed by the CLI and loadable with --preset.
std::vector<std::string> preset_names();
std::string preset_text(const std::string &name);

} // namespace mompkit

#endif
