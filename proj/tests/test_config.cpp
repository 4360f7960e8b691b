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

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "mompkit/config.hpp"
#include "mompkit/errors.hpp"

using namespace mompkit;

namespace
{

// Expects a config_error whose message contains the given fragment.
void expect_error(const std::string &text, const std::string &fragment)
{
    try
    {
        parse_config(text);
        FAIL("no error for: " << text);
    }
    catch (const config_error &e)
    {
        INFO(e.what());
        REQUIRE(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

void expect_invalid(ExperimentConfig cfg, const std::string &fragment)
{
    try
    {
        cfg.validate();
        FAIL("validate accepted: " << fragment);
    }
    catch (const config_error &e)
    {
        INFO(e.what());
        REQUIRE(std::string(e.what()).find(fragment) != std::string::npos);
    }
}

ExperimentConfig valid_base()
{
    ExperimentConfig cfg;
    cfg.positions = {{1.0, 1.0, 1.0}};
    return cfg;
}

struct TempFile
{
    std::string path;
    explicit TempFile(const std::string &content)
    {
        path = std::string("mompkit_cfg_") + std::to_string(std::rand()) + ".tmp";
        std::ofstream f(path, std::ios::binary);
        f << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

} // namespace

TEST_CASE("parse_config fills every documented key")
{
    const std::string text = R"(
# leading comment
[scenario]
room = 5 7 2.5        # trailing comment
anchor = 2 3 1
positions = 1 1 1 ; 2 2 2 ; 3 3 1.5
user_start = 0.5 0.5 0.5
user_end = 4 6 2
user_count = 5
reflection_loss_db = 4.5
carrier_ghz = 28
second_order = yes
paths_user = 1 2 1
paths_tau0_s = 3e-9

[arrays]
tx = 4 2
rx = 8 4

[training]
rx_chains = 8
symbols = 32
taps = 16
sampling_time_ns = 0.25
pilot_active = 20
power_dbm = 13
noise_dbm = -75

[solver]
k_res = 8
sparsity = 4
refinement_sweeps = 2
coarse_init_factor = 0.5
init_mode = numerator_only
stop_tol = 0.01

[locate]
azimuth_threshold = 0.2
elevation_threshold = 0.15

[sweep]
k_res = 2 4 8
power_dbm = -10 0 10
frames = 16 32

[run]
seed = 42
output_dir = results
omp_baseline = off
tau0_mode = fixed
tau0_s = 5e-9
)";
    const ExperimentConfig cfg = parse_config(text);
    REQUIRE(cfg.room.lx == 5.0);
    REQUIRE(cfg.room.ly == 7.0);
    REQUIRE(cfg.room.lz == 2.5);
    REQUIRE(cfg.anchor == Eigen::Vector3d(2.0, 3.0, 1.0));
    REQUIRE(cfg.positions.size() == 3);
    REQUIRE(cfg.positions[2] == Eigen::Vector3d(3.0, 3.0, 1.5));
    REQUIRE(cfg.user_start == Eigen::Vector3d(0.5, 0.5, 0.5));
    REQUIRE(cfg.user_end == Eigen::Vector3d(4.0, 6.0, 2.0));
    REQUIRE(cfg.user_count == 5);
    REQUIRE(cfg.reflection_loss_db == 4.5);
    REQUIRE(cfg.carrier_ghz == 28.0);
    REQUIRE(cfg.second_order);
    REQUIRE(cfg.paths_user == Eigen::Vector3d(1.0, 2.0, 1.0));
    REQUIRE(cfg.paths_tau0_s == 3e-9);
    REQUIRE(cfg.tx.nx == 4);
    REQUIRE(cfg.tx.ny == 2);
    REQUIRE(cfg.rx.nx == 8);
    REQUIRE(cfg.rx.ny == 4);
    REQUIRE(cfg.rx_chains == 8);
    REQUIRE(cfg.symbols == 32);
    REQUIRE(cfg.taps == 16);
    REQUIRE(cfg.sampling_time_ns == 0.25);
    REQUIRE(cfg.pilot_active == 20);
    REQUIRE(cfg.power_dbm == 13.0);
    REQUIRE(cfg.noise_dbm == -75.0);
    REQUIRE(cfg.k_res == 8.0);
    REQUIRE(cfg.sparsity == 4);
    REQUIRE(cfg.refinement_sweeps == 2);
    REQUIRE(cfg.coarse_init_factor == 0.5);
    REQUIRE(cfg.init_mode == InitCoefficientMode::numerator_only);
    REQUIRE(cfg.stop_tol == 0.01);
    REQUIRE(cfg.thresholds.azimuth == 0.2);
    REQUIRE(cfg.thresholds.elevation == 0.15);
    REQUIRE(cfg.sweep_k_res == std::vector<double>{2.0, 4.0, 8.0});
    REQUIRE(cfg.sweep_power_dbm == std::vector<double>{-10.0, 0.0, 10.0});
    REQUIRE(cfg.sweep_frames == std::vector<Eigen::Index>{16, 32});
    REQUIRE(cfg.seed == 42);
    REQUIRE(cfg.output_dir == "results");
    REQUIRE(cfg.omp_baseline == "off");
    REQUIRE(cfg.tau0_mode == "fixed");
    REQUIRE(cfg.tau0_s == 5e-9);
}

TEST_CASE("empty input keeps the documented defaults")
{
    const ExperimentConfig cfg = parse_config("");
    REQUIRE(cfg.room.lx == 6.0);
    REQUIRE(cfg.room.ly == 8.0);
    REQUIRE(cfg.room.lz == 3.0);
    REQUIRE(cfg.anchor == Eigen::Vector3d(3.0, 4.0, 1.5));
    REQUIRE(cfg.positions.empty());
    REQUIRE(cfg.user_count == 0);
    REQUIRE(cfg.reflection_loss_db == 6.0);
    REQUIRE(cfg.carrier_ghz == 60.0);
    REQUIRE_FALSE(cfg.second_order);
    REQUIRE(cfg.paths_file.empty());
    REQUIRE(cfg.tx.nx == 2);
    REQUIRE(cfg.rx.nx == 4);
    REQUIRE(cfg.rx_chains == 4);
    REQUIRE(cfg.symbols == 16);
    REQUIRE(cfg.taps == 8);
    REQUIRE(cfg.sampling_time_ns == 0.5);
    REQUIRE(cfg.pilot_active == -1);
    REQUIRE(cfg.power_dbm == 20.0);
    REQUIRE(std::isinf(cfg.noise_dbm));
    REQUIRE(cfg.noise_dbm < 0.0);
    REQUIRE(cfg.k_res == 4.0);
    REQUIRE(cfg.sparsity == 3);
    REQUIRE(cfg.refinement_sweeps == 3);
    REQUIRE(cfg.coarse_init_factor == 1.0);
    REQUIRE(cfg.init_mode == InitCoefficientMode::full);
    REQUIRE(cfg.stop_tol == 0.0);
    REQUIRE(cfg.thresholds.azimuth == 0.1);
    REQUIRE(cfg.thresholds.elevation == 0.05);
    REQUIRE(cfg.sweep_k_res.empty());
    REQUIRE(cfg.sweep_power_dbm.empty());
    REQUIRE(cfg.sweep_frames.empty());
    REQUIRE(cfg.seed == 1);
    REQUIRE(cfg.output_dir == "out");
    REQUIRE(cfg.omp_baseline == "auto");
    REQUIRE(cfg.tau0_mode == "los");
    REQUIRE(cfg.tau0_s == 0.0);
}

TEST_CASE("parse errors carry the line number and the offending token")
{
    expect_error("[bogus]\n", "line 1: unknown section [bogus]");
    expect_error("[run]\nbogus = 1\n", "line 2: unknown key 'run.bogus'");
    expect_error("[run]\nseed 1\n", "line 2: expected key = value");
    expect_error("[run\nseed = 1\n", "line 1: malformed section header");
    expect_error("seed = 1\n", "before any [section] header");
    expect_error("[run]\nseed = abc\n", "cannot parse number 'abc'");
    expect_error("[run]\nseed = 1.5\n", "expects an integer");
    expect_error("[scenario]\nanchor = 1 2\n", "expects three numbers");
    expect_error("[scenario]\nroom = 1 2 3 4\n", "expects three numbers");
    expect_error("[scenario]\nsecond_order = maybe\n", "expects a boolean");
    expect_error("[solver]\ninit_mode = fast\n", "must be full or numerator_only");
    expect_error("[arrays]\ntx = 4\n", "expects two numbers");
    expect_error("[solver]\nk_res = 2 4\n", "expects one number");
}

TEST_CASE("validate rejects inconsistent settings")
{
    valid_base().validate(); // the baseline itself must pass

    {
        ExperimentConfig c = valid_base();
        c.room.lz = 0.0;
        expect_invalid(c, "room extents");
    }
    {
        ExperimentConfig c = valid_base();
        c.rx_chains = 3; // 16 % 3 != 0
        expect_invalid(c, "rx_chains");
    }
    {
        ExperimentConfig c = valid_base();
        c.pilot_active = 17;
        expect_invalid(c, "pilot_active");
    }
    {
        ExperimentConfig c = valid_base();
        c.sampling_time_ns = 0.0;
        expect_invalid(c, "sampling_time_ns");
    }
    {
        ExperimentConfig c = valid_base();
        c.k_res = 0.0;
        expect_invalid(c, "k_res");
    }
    {
        ExperimentConfig c = valid_base();
        c.sparsity = 0;
        expect_invalid(c, "sparsity");
    }
    {
        ExperimentConfig c = valid_base();
        c.coarse_init_factor = 1.5;
        expect_invalid(c, "coarse_init_factor");
    }
    {
        ExperimentConfig c = valid_base();
        c.thresholds.elevation = 0.0;
        expect_invalid(c, "thresholds");
    }
    {
        ExperimentConfig c = valid_base();
        c.omp_baseline = "maybe";
        expect_invalid(c, "omp_baseline");
    }
    {
        ExperimentConfig c = valid_base();
        c.tau0_mode = "guess";
        expect_invalid(c, "tau0_mode");
    }
    {
        ExperimentConfig c = valid_base();
        c.output_dir.clear();
        expect_invalid(c, "output_dir");
    }
    {
        ExperimentConfig c = valid_base();
        c.anchor = {7.0, 4.0, 1.5};
        expect_invalid(c, "anchor");
    }
    {
        ExperimentConfig c = valid_base();
        c.positions = {{1.0, 1.0, 3.0}}; // on the ceiling plane
        expect_invalid(c, "outside the room");
    }
    {
        ExperimentConfig c;
        c.positions.clear();
        c.user_count = 0;
        expect_invalid(c, "no user positions");
    }
    {
        ExperimentConfig c = valid_base();
        c.sweep_k_res = {4.0, 0.0};
        expect_invalid(c, "sweep k_res");
    }
    {
        ExperimentConfig c = valid_base();
        c.sweep_frames = {16, 0};
        expect_invalid(c, "frame counts");
    }
    {
        // A paths file bypasses the placement checks entirely.
        ExperimentConfig c;
        c.positions.clear();
        c.paths_file = "paths.txt";
        c.anchor = {99.0, 99.0, 99.0};
        c.validate();
    }
}

TEST_CASE("power levels convert from dBm and support exact silence")
{
    ExperimentConfig cfg;
    cfg.power_dbm = 20.0;
    REQUIRE(cfg.transmit_power_w() == Catch::Approx(0.1).epsilon(1e-14));
    cfg.power_dbm = 30.0;
    REQUIRE(cfg.transmit_power_w() == Catch::Approx(1.0).epsilon(1e-14));
    cfg.power_dbm = 0.0;
    REQUIRE(cfg.transmit_power_w() == Catch::Approx(1e-3).epsilon(1e-14));

    cfg.noise_dbm = -30.0;
    REQUIRE(cfg.noise_variance_w() == Catch::Approx(1e-6).epsilon(1e-14));
    cfg.noise_dbm = -std::numeric_limits<double>::infinity();
    REQUIRE(cfg.noise_variance_w() == 0.0);

    cfg.sampling_time_ns = 2.0;
    REQUIRE(cfg.sampling_time_s() == Catch::Approx(2e-9).epsilon(1e-14));
    cfg.carrier_ghz = 60.0;
    REQUIRE(cfg.wavelength_m() == Catch::Approx(speed_of_light / 60e9).epsilon(1e-14));
}

TEST_CASE("positions resolve from the explicit list or the line sweep")
{
    ExperimentConfig cfg;
    cfg.user_start = {1.0, 1.0, 1.0};
    cfg.user_end = {3.0, 5.0, 1.0};
    cfg.user_count = 3;
    const std::vector<Eigen::Vector3d> line = cfg.resolved_positions();
    REQUIRE(line.size() == 3);
    REQUIRE(line[0] == Eigen::Vector3d(1.0, 1.0, 1.0));
    REQUIRE((line[1] - Eigen::Vector3d(2.0, 3.0, 1.0)).norm() <= 1e-15);
    REQUIRE(line[2] == Eigen::Vector3d(3.0, 5.0, 1.0));

    cfg.user_count = 1;
    REQUIRE(cfg.resolved_positions() == std::vector<Eigen::Vector3d>{{1.0, 1.0, 1.0}});

    // An explicit list wins over the sweep definition.
    cfg.positions = {{2.0, 2.0, 2.0}};
    REQUIRE(cfg.resolved_positions() == cfg.positions);
}

TEST_CASE("load_config reads files and reports missing ones")
{
    const std::string text = "[run]\nseed = 7\noutput_dir = somewhere\n";
    const TempFile file(text);
    const ExperimentConfig cfg = load_config(file.path);
    REQUIRE(cfg.seed == 7);
    REQUIRE(cfg.output_dir == "somewhere");

    REQUIRE_THROWS_AS(load_config("definitely_not_here.ini"), config_error);
}

TEST_CASE("presets parse, validate and differ in scale")
{
    REQUIRE(preset_names() == std::vector<std::string>{"tiny", "full"});

    const ExperimentConfig tiny = parse_config(preset_text("tiny"));
    tiny.validate();
    REQUIRE(tiny.positions.size() == 2);
    REQUIRE(tiny.noise_variance_w() == 0.0);
    REQUIRE(tiny.tx.size() == 4);
    REQUIRE(tiny.rx.size() == 16);

    const ExperimentConfig full = parse_config(preset_text("full"));
    full.validate();
    REQUIRE(full.tx.size() == 16);
    REQUIRE(full.rx.size() == 64);
    REQUIRE(full.symbols == 96);
    REQUIRE(full.taps == 64);
    REQUIRE(full.pilot_active == 64);
    REQUIRE(full.k_res == 16.0);

    REQUIRE_THROWS_AS(preset_text("medium"), config_error);
}
