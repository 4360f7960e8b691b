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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mompkit/channel.hpp"
#include "mompkit/errors.hpp"
#include "mompkit/experiment.hpp"
#include "mompkit/metrics.hpp"

using namespace mompkit;

namespace
{

struct TempDir
{
    std::filesystem::path path;
    explicit TempDir(const std::string &stem)
    {
        path = std::filesystem::path(stem + "_" + std::to_string(std::rand()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

struct TempPathFile
{
    std::string path;
    explicit TempPathFile(const std::vector<PathParams> &paths)
    {
        path = "mompkit_e2e_paths_" + std::to_string(std::rand()) + ".tmp";
        write_path_file(path, paths);
    }
    ~TempPathFile() { std::remove(path.c_str()); }
};

std::string read_file(const std::filesystem::path &p)
{
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path &p)
{
    std::istringstream iss(read_file(p));
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(iss, line))
    {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ','))
            cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

std::size_t column_of(const std::vector<std::string> &header, const std::string &name)
{
    for (std::size_t c = 0; c < header.size(); ++c)
        if (header[c] == name)
            return c;
    FAIL("no column " << name);
    return 0;
}

// Synthetic two-path scene whose parameters sit exactly on the dictionary
// grids of the default arrays at k_res 4 and whose delays satisfy the wall
// ranging identity, so the full pipeline should localize to rounding error.
// The true z components reproduce the positive-root completion so the forced
// sign at extraction is the correct one.
struct OnGridScene
{
    std::vector<PathParams> paths;
    Eigen::Vector3d anchor{3.0, 4.0, 1.5};
    Eigen::Vector3d user;
    double tau0 = 0.0;
    double rel1 = 0.0, rel2 = 0.0;

    OnGridScene()
    {
        const auto rx_grid = [](int t) { return -1.0 + 2.0 * static_cast<double>(t) / 16.0; };
        const auto tx_grid = [](int t) { return -1.0 + 2.0 * static_cast<double>(t) / 8.0; };
        const double window = 8.0 * 2e-9;
        const auto delay_grid = [&](int t) { return static_cast<double>(t) * window / 32.0; };
        const auto complete = [](double x, double y) {
            return std::sqrt(std::max(0.0, 1.0 - (x * x + y * y)));
        };
        const auto dir = [&](double x, double y) { return Eigen::Vector3d(x, y, complete(x, y)); };

        const Eigen::Vector3d doa1 = dir(rx_grid(1), rx_grid(11));
        const Eigen::Vector3d dod1 = dir(tx_grid(7), tx_grid(2));
        const Eigen::Vector3d doa2 = dir(rx_grid(3), rx_grid(2));
        const Eigen::Vector3d dod2 = dir(tx_grid(1), tx_grid(6));
        rel1 = delay_grid(4);
        rel2 = delay_grid(6);

        // Choose the clock offset so the wall identity z2*(rel2+tau0) =
        // z1*(rel1+tau0) holds exactly for these grid points.
        const double z1 = doa1.z(), z2 = doa2.z();
        tau0 = (z1 * rel1 - z2 * rel2) / (z2 - z1);
        REQUIRE(rel1 + tau0 > 0.0);
        user = anchor + speed_of_light * (rel1 + tau0) * doa1;

        PathParams los;
        los.gain = {1.0, 0.0};
        los.doa = doa1;
        los.dod = dod1;
        los.delay_s = rel1 + tau0;
        PathParams wall;
        wall.gain = {0.3, 0.0};
        wall.doa = doa2;
        wall.dod = dod2;
        wall.delay_s = rel2 + tau0;
        paths = {los, wall};
    }

    ExperimentConfig config(const std::string &paths_file, const std::string &out_dir) const
    {
        ExperimentConfig cfg; // defaults: tx 2x2, rx 4x4, 4 chains, 16 symbols, 8 taps
        cfg.sampling_time_ns = 2.0;
        cfg.k_res = 4.0;
        cfg.sparsity = 2;
        cfg.refinement_sweeps = 2;
        cfg.thresholds = {0.1, 0.75}; // wide elevation band for the steep bounce
        cfg.paths_file = paths_file;
        cfg.paths_user = user;
        cfg.paths_tau0_s = tau0;
        cfg.output_dir = out_dir;
        cfg.omp_baseline = "off";
        return cfg;
    }
};

// Room-trace configuration at demo scale with a resolution sweep.
ExperimentConfig room_sweep_config(const std::string &out_dir)
{
    ExperimentConfig cfg;
    cfg.positions = {{1.5, 2.0, 1.5}, {4.5, 6.0, 1.5}};
    cfg.sampling_time_ns = 2.0;
    cfg.sparsity = 3;
    cfg.refinement_sweeps = 3;
    cfg.thresholds = {0.3, 0.7};
    cfg.sweep_k_res = {2.0, 4.0, 8.0};
    cfg.output_dir = out_dir;
    cfg.omp_baseline = "off";
    return cfg;
}

} // namespace

TEST_CASE("on-grid two-path scene localizes to rounding error")
{
    const OnGridScene scene;
    const TempPathFile file(scene.paths);
    const TempDir out("mompkit_e2e_ongrid");
    ExperimentConfig cfg = scene.config(file.path, out.path.string());
    cfg.validate();

    std::ostringstream log;
    const ExperimentResult result = run_experiment(cfg, log);
    REQUIRE(result.sweeps.size() == 1);
    REQUIRE(result.sweeps[0].rows.size() == 1);

    const MetricsRow &row = result.sweeps[0].rows[0];
    REQUIRE(row.detected);
    REQUIRE(row.loc_error_m <= 1e-6);
    REQUIRE(row.doa_error_rad <= 1e-6);
    REQUIRE(row.dod_error_rad <= 1e-6);
    REQUIRE(row.nmse_db <= -200.0);
    REQUIRE(row.delay2_error_s <= 1e-12);
    REQUIRE(std::abs(row.tau0_est_s - scene.tau0) <= 1e-15);
    REQUIRE(row.n_wall == 1);
    REQUIRE(row.n_floor_ceiling == 0);
    REQUIRE(row.n_spurious == 0);

    const LocationFix &fix = result.sweeps[0].fixes[0];
    REQUIRE(fix.status == FixStatus::located);
    REQUIRE((fix.position - scene.user).norm() == Catch::Approx(row.loc_error_m).margin(1e-15));
}

TEST_CASE("outputs are byte-identical across runs and excluded timing varies freely")
{
    const OnGridScene scene;
    const TempPathFile file(scene.paths);
    const TempDir out_a("mompkit_e2e_det_a"), out_b("mompkit_e2e_det_b"), out_c("mompkit_e2e_det_c");

    ExperimentConfig cfg = scene.config(file.path, out_a.path.string());
    cfg.noise_dbm = -90.0; // exercise the seeded noise path
    std::ostringstream log;
    const ExperimentResult first = run_experiment(cfg, log);

    cfg.output_dir = out_b.path.string();
    const ExperimentResult second = run_experiment(cfg, log);

    REQUIRE(first.files == second.files);
    for (const std::string &f : first.files)
    {
        if (f.rfind("timing_", 0) == 0)
        {
            REQUIRE(std::filesystem::exists(out_b.path / f));
            continue; // wall times may differ
        }
        INFO(f);
        REQUIRE(read_file(out_a.path / f) == read_file(out_b.path / f));
    }

    // A different master seed draws different noise and changes the metrics.
    cfg.output_dir = out_c.path.string();
    cfg.seed = 2;
    run_experiment(cfg, log);
    bool any_difference = false;
    for (const std::string &f : first.files)
        if (f.rfind("metrics_", 0) == 0 && read_file(out_a.path / f) != read_file(out_c.path / f))
            any_difference = true;
    REQUIRE(any_difference);
}

TEST_CASE("finer dictionaries do not worsen the median angular error")
{
    const TempDir out("mompkit_e2e_kres");
    const ExperimentConfig cfg = room_sweep_config(out.path.string());
    cfg.validate();

    std::ostringstream log;
    const ExperimentResult result = run_experiment(cfg, log);
    REQUIRE(result.sweeps.size() == 3);

    std::vector<double> medians;
    for (const SweepPoint &sp : result.sweeps)
    {
        std::vector<double> errs;
        for (const MetricsRow &r : sp.rows)
            errs.push_back(r.doa_error_rad);
        medians.push_back(percentile(errs, 50.0));
    }
    REQUIRE(medians[1] <= medians[0] + 1e-12);
    REQUIRE(medians[2] <= medians[1] + 1e-12);

    // Every advertised file exists, one triple per sweep plus the summary.
    REQUIRE(result.files.size() == 3 * 3 + 1);
    for (const std::string &f : result.files)
        REQUIRE(std::filesystem::exists(out.path / f));

    // Summary percentiles are recomputable from the per-position files.
    const auto summary = read_csv(out.path / "summary.csv");
    REQUIRE(summary.size() == 1 + result.sweeps.size());
    for (std::size_t s = 0; s < result.sweeps.size(); ++s)
    {
        const SweepPoint &sp = result.sweeps[s];
        const auto metrics = read_csv(out.path / ("metrics_" + sp.tag + ".csv"));
        REQUIRE(metrics.size() == 1 + sp.rows.size());

        const std::size_t doa_col = column_of(metrics[0], "doa_error_rad");
        const std::size_t det_col = column_of(metrics[0], "detected");
        std::vector<double> doa;
        double detected = 0.0;
        for (std::size_t r = 1; r < metrics.size(); ++r)
        {
            const double v = std::stod(metrics[r][doa_col]);
            if (std::isfinite(v))
                doa.push_back(v);
            detected += std::stod(metrics[r][det_col]);
        }

        const std::vector<std::string> &srow = summary[1 + s];
        REQUIRE(srow[column_of(summary[0], "tag")] == sp.tag);
        REQUIRE(std::stod(srow[column_of(summary[0], "detection_rate")]) ==
                Catch::Approx(detected / static_cast<double>(sp.rows.size())).margin(1e-15));
        REQUIRE(std::stod(srow[column_of(summary[0], "doa_error_rad_p50")]) ==
                Catch::Approx(percentile(doa, 50.0)).margin(1e-18));
        REQUIRE(std::stod(srow[column_of(summary[0], "doa_error_rad_p90")]) ==
                Catch::Approx(percentile(doa, 90.0)).margin(1e-18));
    }
}

TEST_CASE("the flattened baseline respects the materialization cap")
{
    const OnGridScene scene;
    const TempPathFile file(scene.paths);

    // At this scale the flattened Gram matrix exceeds the cap: forcing the
    // baseline on must fail, auto must disable it with a notice.
    {
        const TempDir out("mompkit_e2e_on");
        ExperimentConfig cfg = scene.config(file.path, out.path.string());
        cfg.omp_baseline = "on";
        std::ostringstream log;
        REQUIRE_THROWS_AS(run_experiment(cfg, log), resource_error);
    }
    {
        const TempDir out("mompkit_e2e_auto");
        ExperimentConfig cfg = scene.config(file.path, out.path.string());
        cfg.omp_baseline = "auto";
        std::ostringstream log;
        const ExperimentResult result = run_experiment(cfg, log);
        REQUIRE_FALSE(result.sweeps[0].rows[0].omp_ran);
        REQUIRE(log.str().find("flattened baseline disabled") != std::string::npos);
    }
}

TEST_CASE("frame sweeps truncate the training set")
{
    const OnGridScene scene;
    const TempPathFile file(scene.paths);
    const TempDir out("mompkit_e2e_frames");
    ExperimentConfig cfg = scene.config(file.path, out.path.string());
    cfg.sweep_frames = {8, 16};

    std::ostringstream log;
    const ExperimentResult result = run_experiment(cfg, log);
    REQUIRE(result.sweeps.size() == 2);
    REQUIRE(result.sweeps[0].frames == 8);
    REQUIRE(result.sweeps[1].frames == 16);
    // The full-frame sweep keeps the exact recovery; fewer frames still
    // produce a row for every position.
    REQUIRE(result.sweeps[1].rows[0].loc_error_m <= 1e-6);
    REQUIRE(result.sweeps[0].rows.size() == 1);

    ExperimentConfig bad = scene.config(file.path, out.path.string());
    bad.sweep_frames = {32}; // more than the 16 training frames
    REQUIRE_THROWS_AS(run_experiment(bad, log), config_error);
}
