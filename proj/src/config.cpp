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

#include "mompkit/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace mompkit
{

namespace
{

std::string trim(const std::string &s)
{
    const std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string &value, const std::string &key)
{
    std::istringstream iss(value);
    std::vector<double> out;
    std::string tok;
    while (iss >> tok)
    {
        try
        {
            std::size_t used = 0;
            const double v = std::stod(tok, &used);
            if (used != tok.size())
                throw std::invalid_argument(tok);
            out.push_back(v);
        }
        catch (const std::exception &)
        {
            throw config_error("key '" + key + "': cannot parse number '" + tok + "'");
        }
    }
    return out;
}

double parse_scalar(const std::string &value, const std::string &key)
{
    const std::vector<double> v = parse_numbers(value, key);
    if (v.size() != 1)
        throw config_error("key '" + key + "' expects one number, got " + std::to_string(v.size()));
    return v[0];
}

Eigen::Index parse_integer(const std::string &value, const std::string &key)
{
    const double v = parse_scalar(value, key);
    const auto i = static_cast<Eigen::Index>(std::llround(v));
    if (static_cast<double>(i) != v)
        throw config_error("key '" + key + "' expects an integer, got " + value);
    return i;
}

Eigen::Vector3d parse_vec3(const std::string &value, const std::string &key)
{
    const std::vector<double> v = parse_numbers(value, key);
    if (v.size() != 3)
        throw config_error("key '" + key + "' expects three numbers, got " + std::to_string(v.size()));
    return {v[0], v[1], v[2]};
}

bool parse_bool(const std::string &value, const std::string &key)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw config_error("key '" + key + "' expects a boolean, got '" + value + "'");
}

std::vector<Eigen::Vector3d> parse_positions(const std::string &value, const std::string &key)
{
    std::vector<Eigen::Vector3d> out;
    std::istringstream iss(value);
    std::string group;
    while (std::getline(iss, group, ';'))
    {
        const std::string g = trim(group);
        if (g.empty())
            continue;
        out.push_back(parse_vec3(g, key));
    }
    return out;
}

} // namespace

void ExperimentConfig::validate() const
{
    if (!(room.lx > 0.0) || !(room.ly > 0.0) || !(room.lz > 0.0))
        throw config_error("room extents must be positive");
    if (tx.nx < 1 || tx.ny < 1 || rx.nx < 1 || rx.ny < 1)
        throw config_error("array extents must be at least 1");
    if (rx_chains < 1 || rx.size() % rx_chains != 0)
        throw config_error("rx_chains must divide the receive array size");
    if (symbols < 1 || taps < 1)
        throw config_error("symbols and taps must be at least 1");
    if (pilot_active >= 0 && pilot_active > symbols)
        throw config_error("pilot_active exceeds the frame length");
    if (!(sampling_time_ns > 0.0))
        throw config_error("sampling_time_ns must be positive");
    if (std::isnan(power_dbm) || std::isnan(noise_dbm))
        throw config_error("power_dbm and noise_dbm must be numbers");
    if (!(k_res > 0.0))
        throw config_error("k_res must be positive");
    if (sparsity < 1)
        throw config_error("sparsity must be at least 1");
    if (refinement_sweeps < 0)
        throw config_error("refinement_sweeps must be non-negative");
    if (!(coarse_init_factor > 0.0) || coarse_init_factor > 1.0)
        throw config_error("coarse_init_factor must lie in (0, 1]");
    if (std::isnan(stop_tol) || stop_tol < 0.0)
        throw config_error("stop_tol must be non-negative");
    if (!(thresholds.azimuth > 0.0) || !(thresholds.elevation > 0.0))
        throw config_error("classifier thresholds must be positive");
    if (omp_baseline != "auto" && omp_baseline != "on" && omp_baseline != "off")
        throw config_error("omp_baseline must be auto, on or off");
    if (tau0_mode != "los" && tau0_mode != "fixed")
        throw config_error("tau0_mode must be los or fixed");
    if (output_dir.empty())
        throw config_error("output_dir must not be empty");
    if (!(carrier_ghz > 0.0))
        throw config_error("carrier_ghz must be positive");
    if (reflection_loss_db < 0.0)
        throw config_error("reflection_loss_db must be non-negative");
    for (double k : sweep_k_res)
        if (!(k > 0.0))
            throw config_error("sweep k_res values must be positive");
    for (Eigen::Index f : sweep_frames)
        if (f < 1)
            throw config_error("sweep frame counts must be at least 1");

    if (paths_file.empty())
    {
        const auto inside = [&](const Eigen::Vector3d &p) {
            return p.x() > 0.0 && p.x() < room.lx && p.y() > 0.0 && p.y() < room.ly && p.z() > 0.0 &&
                   p.z() < room.lz;
        };
        if (!inside(anchor))
            throw config_error("anchor must lie strictly inside the room");
        if (positions.empty() && user_count < 1)
            throw config_error("no user positions: set positions or user_start/user_end/user_count");
        for (const Eigen::Vector3d &p : resolved_positions())
            if (!inside(p))
                throw config_error("a user position lies outside the room");
    }
    else if (std::isnan(paths_tau0_s))
        throw config_error("paths_tau0_s must be a number");
}

double ExperimentConfig::transmit_power_w() const
{
    return std::pow(10.0, (power_dbm - 30.0) / 10.0);
}

double ExperimentConfig::noise_variance_w() const
{
    if (std::isinf(noise_dbm) && noise_dbm < 0.0)
        return 0.0;
    return std::pow(10.0, (noise_dbm - 30.0) / 10.0);
}

std::vector<Eigen::Vector3d> ExperimentConfig::resolved_positions() const
{
    if (!positions.empty())
        return positions;
    std::vector<Eigen::Vector3d> out;
    out.reserve(static_cast<std::size_t>(std::max<Eigen::Index>(user_count, 0)));
    for (Eigen::Index i = 0; i < user_count; ++i)
    {
        const double t = user_count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(user_count - 1);
        out.push_back(user_start + t * (user_end - user_start));
    }
    return out;
}

ExperimentConfig parse_config(const std::string &text)
{
    ExperimentConfig cfg;
    std::istringstream iss(text);
    std::string line, section;
    std::size_t line_no = 0;

    while (std::getline(iss, line))
    {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;

        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "scenario" && section != "arrays" && section != "training" && section != "solver" &&
                section != "locate" && section != "sweep" && section != "run")
                throw config_error("line " + std::to_string(line_no) + ": unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw config_error("line " + std::to_string(line_no) + ": key '" + key +
                               "' appears before any [section] header");
        const std::string qual = section + "." + key;

        if (qual == "scenario.room")
        {
            const Eigen::Vector3d v = parse_vec3(value, qual);
            cfg.room = {v.x(), v.y(), v.z()};
        }
        else if (qual == "scenario.anchor")
            cfg.anchor = parse_vec3(value, qual);
        else if (qual == "scenario.positions")
            cfg.positions = parse_positions(value, qual);
        else if (qual == "scenario.user_start")
            cfg.user_start = parse_vec3(value, qual);
        else if (qual == "scenario.user_end")
            cfg.user_end = parse_vec3(value, qual);
        else if (qual == "scenario.user_count")
            cfg.user_count = parse_integer(value, qual);
        else if (qual == "scenario.reflection_loss_db")
            cfg.reflection_loss_db = parse_scalar(value, qual);
        else if (qual == "scenario.carrier_ghz")
            cfg.carrier_ghz = parse_scalar(value, qual);
        else if (qual == "scenario.second_order")
            cfg.second_order = parse_bool(value, qual);
        else if (qual == "scenario.paths_file")
            cfg.paths_file = value;
        else if (qual == "scenario.paths_user")
            cfg.paths_user = parse_vec3(value, qual);
        else if (qual == "scenario.paths_tau0_s")
            cfg.paths_tau0_s = parse_scalar(value, qual);
        else if (qual == "arrays.tx")
        {
            const std::vector<double> v = parse_numbers(value, qual);
            if (v.size() != 2)
                throw config_error("key '" + qual + "' expects two numbers");
            cfg.tx = {static_cast<Eigen::Index>(v[0]), static_cast<Eigen::Index>(v[1])};
        }
        else if (qual == "arrays.rx")
        {
            const std::vector<double> v = parse_numbers(value, qual);
            if (v.size() != 2)
                throw config_error("key '" + qual + "' expects two numbers");
            cfg.rx = {static_cast<Eigen::Index>(v[0]), static_cast<Eigen::Index>(v[1])};
        }
        else if (qual == "training.rx_chains")
            cfg.rx_chains = parse_integer(value, qual);
        else if (qual == "training.symbols")
            cfg.symbols = parse_integer(value, qual);
        else if (qual == "training.taps")
            cfg.taps = parse_integer(value, qual);
        else if (qual == "training.sampling_time_ns")
            cfg.sampling_time_ns = parse_scalar(value, qual);
        else if (qual == "training.pilot_active")
            cfg.pilot_active = parse_integer(value, qual);
        else if (qual == "training.power_dbm")
            cfg.power_dbm = parse_scalar(value, qual);
        else if (qual == "training.noise_dbm")
            cfg.noise_dbm = parse_scalar(value, qual);
        else if (qual == "solver.k_res")
            cfg.k_res = parse_scalar(value, qual);
        else if (qual == "solver.sparsity")
            cfg.sparsity = parse_integer(value, qual);
        else if (qual == "solver.refinement_sweeps")
            cfg.refinement_sweeps = parse_integer(value, qual);
        else if (qual == "solver.coarse_init_factor")
            cfg.coarse_init_factor = parse_scalar(value, qual);
        else if (qual == "solver.init_mode")
        {
            if (value == "full")
                cfg.init_mode = InitCoefficientMode::full;
            else if (value == "numerator_only")
                cfg.init_mode = InitCoefficientMode::numerator_only;
            else
                throw config_error("key '" + qual + "' must be full or numerator_only");
        }
        else if (qual == "solver.stop_tol")
            cfg.stop_tol = parse_scalar(value, qual);
        else if (qual == "locate.azimuth_threshold")
            cfg.thresholds.azimuth = parse_scalar(value, qual);
        else if (qual == "locate.elevation_threshold")
            cfg.thresholds.elevation = parse_scalar(value, qual);
        else if (qual == "sweep.k_res")
            cfg.sweep_k_res = parse_numbers(value, qual);
        else if (qual == "sweep.power_dbm")
            cfg.sweep_power_dbm = parse_numbers(value, qual);
        else if (qual == "sweep.frames")
        {
            cfg.sweep_frames.clear();
            for (double v : parse_numbers(value, qual))
                cfg.sweep_frames.push_back(static_cast<Eigen::Index>(v));
        }
        else if (qual == "run.seed")
            cfg.seed = static_cast<std::uint64_t>(parse_integer(value, qual));
        else if (qual == "run.output_dir")
            cfg.output_dir = value;
        else if (qual == "run.omp_baseline")
            cfg.omp_baseline = value;
        else if (qual == "run.tau0_mode")
            cfg.tau0_mode = value;
        else if (qual == "run.tau0_s")
            cfg.tau0_s = parse_scalar(value, qual);
        else
            throw config_error("line " + std::to_string(line_no) + ": unknown key '" + qual + "'");
    }
    return cfg;
}

ExperimentConfig load_config(const std::string &filename)
{
    std::ifstream f(filename);
    if (!f)
        throw config_error("cannot open config file: " + filename);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

namespace
{

const char *tiny_preset = R"(# Small noiseless end-to-end run; solves in under a second.
# The 2 ns sampling stretches the 8-tap window to 16 ns so the room's
# reflections land inside it, and the loose classifier thresholds absorb
# the elevation error that the coarse angle grids cause at equal heights.
[scenario]
room = 6 8 3
anchor = 3 4 1.5
positions = 1.5 2 1.5 ; 4.5 6 1.5
reflection_loss_db = 6
carrier_ghz = 60

[arrays]
tx = 2 2
rx = 4 4

[training]
rx_chains = 4
symbols = 16
taps = 8
sampling_time_ns = 2
power_dbm = 20
noise_dbm = -inf

[solver]
k_res = 4
sparsity = 3
refinement_sweeps = 3

[locate]
azimuth_threshold = 0.3
elevation_threshold = 0.7

[run]
seed = 1
output_dir = out_tiny
)";

const char *full_preset = R"(# Full-scale hybrid training setup: 4x4 device, 8x8 access point,
# 8 receive chains, 128 frames, 64-tap window at 2 GHz bandwidth.
# The measurement tensor at this scale should be consumed in factored
# form; a dense solve is far beyond the materialization cap.
[scenario]
room = 6 8 3
anchor = 3 0.2 1.3
positions = 2 4 1.3 ; 4 6 1.3
reflection_loss_db = 6
carrier_ghz = 60

[arrays]
tx = 4 4
rx = 8 8

[training]
rx_chains = 8
symbols = 96
taps = 64
sampling_time_ns = 0.5
pilot_active = 64
power_dbm = 20
noise_dbm = -81

[solver]
k_res = 16
sparsity = 5
refinement_sweeps = 3

[run]
seed = 1
output_dir = out_full
)";

} // namespace

std::vector<std::string> preset_names()
{
    return {"tiny", "full"};
}

std::string preset_text(const std::string &name)
{
    if (name == "tiny")
        return tiny_preset;
    if (name == "full")
        return full_preset;
    throw config_error("unknown preset '" + name + "'");
}

} // namespace mompkit
